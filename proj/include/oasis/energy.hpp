#pragma once

// Semi-analytical per-frame energy, bandwidth, and latency model for a
// sensor + logic-chip vision pipeline versus a conventional baseline.
//
// In-sensor mode: the raw frame crosses the TSV to the logic chip, the
// encoder runs there, and only the Huffman-compressed activations cross the
// external interface. Baseline mode: the raw frame (or a configured payload)
// crosses the external interface and all compute happens on the back end.

#include <cmath>
#include <cstdint>
#include <string>

#include "oasis/errors.hpp"
#include "oasis/netspec.hpp"

namespace oasis {

struct EnergyConfig {
    double e_pix = 63.6e-12;       // J per pixel: readout + ADC, 8-bit pixel
    double e_byte_tsv = 6.25e-12;  // J per byte over the die-to-die TSV link
    double e_byte_inf = 100e-12;   // J per byte over MIPI or equivalent
    double e_mac = 5e-15;          // J per multiply-accumulate, 7nm-class
    double e_sram_bit = 0.23e-12;  // J per weight bit read from SRAM
    std::uint32_t weight_bits = 8;
    double e_huff_enc = 0.96e-12;  // J per byte entering the Huffman encoder
    double e_huff_dec = 1.15e-12;  // J per byte through the decoder
};

inline void validate(const EnergyConfig& cfg) {
    const double values[] = {cfg.e_pix,      cfg.e_byte_tsv, cfg.e_byte_inf, cfg.e_mac,
                             cfg.e_sram_bit, cfg.e_huff_enc, cfg.e_huff_dec};
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ValidationError("energy constants must be strictly positive");
        }
    }
    if (cfg.weight_bits < 1 || cfg.weight_bits > 32) {
        throw ValidationError("weight_bits must be in 1..32");
    }
}

enum class Mode {
    InSensor,
    Baseline,
};

inline const char* mode_name(Mode m) {
    return m == Mode::InSensor ? "insensor" : "baseline";
}

struct SystemTopology {
    Mode mode = Mode::InSensor;
    double mipi_bandwidth = 1e9;          // bytes/second
    double tsv_bandwidth_multiple = 200;  // TSV speedup over MIPI, > 1
};

struct ScenarioResult {
    double e_aps = 0;
    double e_tsv = 0;
    double e_enc = 0;
    double e_huff = 0;
    double e_inf = 0;
    double e_back = 0;
    double e_total = 0;
    std::uint64_t bytes_over_interface = 0;  // A_size
    double bandwidth_reduction = 1.0;
    double latency_transfer = 0;  // seconds
    double tops_per_watt = 0;
};

inline double aps_energy(std::uint64_t n_pix, const EnergyConfig& cfg) {
    if (n_pix < 1) {
        throw ValidationError("pixel count must be >= 1");
    }
    return static_cast<double>(n_pix) * cfg.e_pix;
}

inline double tsv_energy(std::uint64_t bytes, const EnergyConfig& cfg) {
    return static_cast<double>(bytes) * cfg.e_byte_tsv;
}

inline double interface_energy(std::uint64_t bytes, const EnergyConfig& cfg) {
    return static_cast<double>(bytes) * cfg.e_byte_inf;
}

// MAC energy plus SRAM weight-read energy for one forward pass.
inline double encoder_energy(const WorkloadSummary& w, const EnergyConfig& cfg) {
    return static_cast<double>(w.total_macs) * cfg.e_mac +
           static_cast<double>(w.total_weights) * cfg.weight_bits * cfg.e_sram_bit;
}

// Encode + decode cost over the pre-compression activation bytes (A_enc).
inline double huffman_energy(std::uint64_t bytes, const EnergyConfig& cfg) {
    return static_cast<double>(bytes) * (cfg.e_huff_enc + cfg.e_huff_dec);
}

// Raw input bits over transmitted output bits.
inline double bandwidth_reduction(const TensorShape& input, std::uint32_t input_bits,
                                  const TensorShape& output, std::uint32_t output_bits,
                                  double effective_bits) {
    if (input_bits < 1 || input_bits > 32 || output_bits < 1 || output_bits > 32) {
        throw InvalidBits("bit widths must be in 1..32");
    }
    if (!(effective_bits > 0.0) || effective_bits > static_cast<double>(output_bits)) {
        throw InvalidBits("effective bits must be in (0, output_bits]");
    }
    const double in_bits = static_cast<double>(input.element_count()) * input_bits;
    const double out_bits = static_cast<double>(output.element_count()) * effective_bits;
    return in_bits / out_bits;
}

inline double latency_transfer(std::uint64_t interface_bytes, std::uint64_t tsv_bytes,
                               const SystemTopology& topo) {
    if (!(topo.mipi_bandwidth > 0.0)) {
        throw TopologyError("mipi_bandwidth must be > 0");
    }
    if (!(topo.tsv_bandwidth_multiple > 1.0)) {
        throw TopologyError("tsv_bandwidth_multiple must be > 1");
    }
    return static_cast<double>(interface_bytes) / topo.mipi_bandwidth +
           static_cast<double>(tsv_bytes) / (topo.mipi_bandwidth * topo.tsv_bandwidth_multiple);
}

enum class TopsDefinition {
    EncoderOnly,   // denominator: e_enc
    OnSensor,      // denominator: e_enc + e_huff + e_tsv
    FullPipeline,  // denominator: e_total
};

inline double tops_per_watt(std::uint64_t macs, double joules) {
    if (!(joules > 0.0)) {
        throw ValidationError("energy must be > 0");
    }
    return static_cast<double>(macs) / joules / 1e12;
}

inline double tops_per_watt(const WorkloadSummary& w, const ScenarioResult& r,
                            TopsDefinition def) {
    switch (def) {
        case TopsDefinition::EncoderOnly: return tops_per_watt(w.total_macs, r.e_enc);
        case TopsDefinition::OnSensor:
            return tops_per_watt(w.total_macs, r.e_enc + r.e_huff + r.e_tsv);
        case TopsDefinition::FullPipeline: return tops_per_watt(w.total_macs, r.e_total);
    }
    throw ValidationError("unknown TOPS/W definition");
}

// Fully resolved scenario: workloads counted, effective bits measured.
struct Scenario {
    TensorShape input;
    std::uint32_t input_bits = 8;
    WorkloadSummary encoder;  // output_shape = compressed representation dims
    std::uint32_t quant_bits = 4;
    double effective_bits = 0;  // bits/symbol actually transmitted
    WorkloadSummary backend_insensor;  // task head running off-chip in our mode
    WorkloadSummary backend_baseline;  // whole network the baseline runs off-chip
    double backend_overhead = 0.0;     // fixed per-frame back-end adder, joules
    std::uint64_t baseline_payload_bytes = 0;  // 0 = raw frame bytes
    double roi_factor = 1.0;  // input-size reduction from ROI cropping
    EnergyConfig config;
    SystemTopology topology;
};

inline ScenarioResult evaluate(const Scenario& sc, Mode mode) {
    validate(sc.config);
    if (!(sc.topology.mipi_bandwidth > 0.0) || !(sc.topology.tsv_bandwidth_multiple > 1.0)) {
        throw TopologyError("invalid interface bandwidth configuration");
    }
    if (!(sc.roi_factor > 0.0)) {
        throw TopologyError("roi_factor must be > 0");
    }
    if (sc.quant_bits < 1 || sc.quant_bits > 32) {
        throw InvalidBits("quant_bits must be in 1..32");
    }
    if (!(sc.effective_bits > 0.0) ||
        sc.effective_bits > static_cast<double>(sc.quant_bits) + 1e-9) {
        throw InvalidBits("effective_bits must be in (0, quant_bits]");
    }

    const std::uint64_t n_pix = std::uint64_t{sc.input.height} * sc.input.width;
    const std::uint64_t raw_bytes = activation_bytes(sc.input, sc.input_bits);
    const TensorShape out = sc.encoder.output_shape;
    const std::uint64_t out_elems = out.element_count();
    const std::uint64_t quantized_bytes = activation_bytes(out, sc.quant_bits);  // A_enc
    const std::uint64_t compressed_bytes = static_cast<std::uint64_t>(
        std::ceil(static_cast<double>(out_elems) * sc.effective_bits / 8.0));  // A_size

    ScenarioResult r;
    r.e_aps = aps_energy(n_pix, sc.config);
    if (mode == Mode::InSensor) {
        r.e_tsv = tsv_energy(raw_bytes, sc.config);
        r.e_enc = encoder_energy(sc.encoder, sc.config);
        r.e_huff = huffman_energy(quantized_bytes, sc.config);
        r.e_inf = interface_energy(compressed_bytes, sc.config);
        r.e_back = encoder_energy(sc.backend_insensor, sc.config) + sc.backend_overhead;
        r.bytes_over_interface = compressed_bytes;
        r.bandwidth_reduction =
            sc.roi_factor *
            bandwidth_reduction(sc.input, sc.input_bits, out, sc.quant_bits, sc.effective_bits);
        r.latency_transfer = latency_transfer(compressed_bytes, raw_bytes, sc.topology);
    } else {
        const std::uint64_t payload =
            sc.baseline_payload_bytes > 0 ? sc.baseline_payload_bytes : raw_bytes;
        r.e_tsv = 0.0;
        r.e_enc = 0.0;
        r.e_huff = 0.0;
        r.e_inf = interface_energy(payload, sc.config);
        r.e_back = encoder_energy(sc.backend_baseline, sc.config) + sc.backend_overhead;
        r.bytes_over_interface = payload;
        r.bandwidth_reduction = static_cast<double>(raw_bytes) / static_cast<double>(payload);
        r.latency_transfer = latency_transfer(payload, 0, sc.topology);
    }
    r.e_total = r.e_aps + r.e_tsv + r.e_inf + r.e_enc + r.e_huff + r.e_back;
    if (mode == Mode::InSensor) {
        r.tops_per_watt = tops_per_watt(sc.encoder, r, TopsDefinition::OnSensor);
    } else {
        // The baseline's network runs on the back end; rate its compute there.
        const double denom = r.e_back > 0.0 ? r.e_back : r.e_total;
        r.tops_per_watt = tops_per_watt(sc.backend_baseline.total_macs, denom);
    }
    return r;
}

inline ScenarioResult total_energy(const Scenario& sc) {
    return evaluate(sc, sc.topology.mode);
}

}  // namespace oasis
