#pragma once

// Scenario files tie a network spec to the energy model: input and quantizer
// bits, how effective bits/symbol are obtained, back-end workloads for both
// topologies, and per-constant overrides.
//
// Scenario file format (one `key value...` pair per line, '#' comments):
//
//   name             <string>
//   encoder          <path to .netspec, relative to this file>
//   quant_bits       <n>
//   effective_bits   fixed <bits> | measured [sigma=<v>] [count=<n>] [seed=<n>]
//                    | tensor <path>
//   backend          <path>            # in-sensor mode task head (optional)
//   baseline_backend <path>            # baseline-mode network (optional)
//   backend_overhead <joules>
//   baseline_payload raw | <bytes>
//   roi_factor       <factor>
//   mipi_bandwidth   <bytes/s>
//   tsv_multiple     <factor>
//   topology         insensor | baseline
//   config           key=value ...     # EnergyConfig field overrides

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oasis/energy.hpp"
#include "oasis/errors.hpp"
#include "oasis/netspec.hpp"
#include "oasis/tensorio.hpp"

namespace oasis {

struct EffectiveBitsSpec {
    enum class Source { Fixed, MeasuredSynthetic, MeasuredTensor };
    Source source = Source::MeasuredSynthetic;
    double fixed_value = 0.0;
    double sigma = 0.6315;       // fitted so 4-bit streams land near 1.57 bits/symbol
    std::uint64_t count = 200000;
    std::uint64_t seed = 7;
    std::string tensor_path;
};

struct ScenarioFile {
    std::string name;
    std::string encoder_path;
    std::uint32_t quant_bits = 4;
    EffectiveBitsSpec effective;
    std::string backend_path;
    std::string baseline_backend_path;
    double backend_overhead = 0.0;
    std::uint64_t baseline_payload_bytes = 0;  // 0 = raw
    double roi_factor = 1.0;
    SystemTopology topology;
    std::vector<std::pair<std::string, std::string>> config_overrides;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

inline void apply_config_override(EnergyConfig& cfg, const std::string& key,
                                  const std::string& value, std::size_t line) {
    const double v = parse_number<double>(value, line, key);
    if (key == "e_pix") {
        cfg.e_pix = v;
    } else if (key == "e_byte_tsv") {
        cfg.e_byte_tsv = v;
    } else if (key == "e_byte_inf") {
        cfg.e_byte_inf = v;
    } else if (key == "e_mac") {
        cfg.e_mac = v;
    } else if (key == "e_sram_bit") {
        cfg.e_sram_bit = v;
    } else if (key == "weight_bits") {
        cfg.weight_bits = parse_number<std::uint32_t>(value, line, key);
    } else if (key == "e_huff_enc") {
        cfg.e_huff_enc = v;
    } else if (key == "e_huff_dec") {
        cfg.e_huff_dec = v;
    } else {
        throw ParseError(line, key, "unknown energy config field");
    }
}

}  // namespace detail

// Parse `key=value ...` override lines (also used for OASIS_CONFIG files).
inline EnergyConfig parse_config_overrides(std::string_view text,
                                           EnergyConfig base = EnergyConfig{}) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                              : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        for (const std::string& token : detail::split_ws(line)) {
            auto eq = token.find('=');
            if (eq == std::string::npos) {
                throw ParseError(line_no, token, "expected key=value");
            }
            detail::apply_config_override(base, token.substr(0, eq), token.substr(eq + 1),
                                          line_no);
        }
    }
    validate(base);
    return base;
}

inline ScenarioFile parse_scenario(std::string_view text) {
    ScenarioFile sc;
    bool saw_encoder = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                              : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const std::vector<std::string> tok = detail::split_ws(line);
        if (tok.empty()) continue;
        const std::string& key = tok[0];
        auto need = [&](std::size_t n) {
            if (tok.size() < n + 1) {
                throw ParseError(line_no, key, "missing value");
            }
        };
        if (key == "name") {
            need(1);
            sc.name = tok[1];
        } else if (key == "encoder") {
            need(1);
            sc.encoder_path = tok[1];
            saw_encoder = true;
        } else if (key == "quant_bits") {
            need(1);
            sc.quant_bits = detail::parse_number<std::uint32_t>(tok[1], line_no, key);
        } else if (key == "effective_bits") {
            need(1);
            if (tok[1] == "fixed") {
                need(2);
                sc.effective.source = EffectiveBitsSpec::Source::Fixed;
                sc.effective.fixed_value = detail::parse_number<double>(tok[2], line_no, key);
            } else if (tok[1] == "measured") {
                sc.effective.source = EffectiveBitsSpec::Source::MeasuredSynthetic;
                for (std::size_t i = 2; i < tok.size(); ++i) {
                    auto eq = tok[i].find('=');
                    if (eq == std::string::npos) {
                        throw ParseError(line_no, tok[i], "expected key=value");
                    }
                    const std::string k = tok[i].substr(0, eq);
                    const std::string v = tok[i].substr(eq + 1);
                    if (k == "sigma") {
                        sc.effective.sigma = detail::parse_number<double>(v, line_no, k);
                    } else if (k == "count") {
                        sc.effective.count =
                            detail::parse_number<std::uint64_t>(v, line_no, k);
                    } else if (k == "seed") {
                        sc.effective.seed = detail::parse_number<std::uint64_t>(v, line_no, k);
                    } else {
                        throw ParseError(line_no, k, "unknown measured-bits parameter");
                    }
                }
            } else if (tok[1] == "tensor") {
                need(2);
                sc.effective.source = EffectiveBitsSpec::Source::MeasuredTensor;
                sc.effective.tensor_path = tok[2];
            } else {
                throw ParseError(line_no, key, "expected fixed|measured|tensor");
            }
        } else if (key == "backend") {
            need(1);
            sc.backend_path = tok[1] == "none" ? "" : tok[1];
        } else if (key == "baseline_backend") {
            need(1);
            sc.baseline_backend_path = tok[1] == "none" ? "" : tok[1];
        } else if (key == "backend_overhead") {
            need(1);
            sc.backend_overhead = detail::parse_number<double>(tok[1], line_no, key);
        } else if (key == "baseline_payload") {
            need(1);
            sc.baseline_payload_bytes =
                tok[1] == "raw" ? 0 : detail::parse_number<std::uint64_t>(tok[1], line_no, key);
        } else if (key == "roi_factor") {
            need(1);
            sc.roi_factor = detail::parse_number<double>(tok[1], line_no, key);
        } else if (key == "mipi_bandwidth") {
            need(1);
            sc.topology.mipi_bandwidth = detail::parse_number<double>(tok[1], line_no, key);
        } else if (key == "tsv_multiple") {
            need(1);
            sc.topology.tsv_bandwidth_multiple =
                detail::parse_number<double>(tok[1], line_no, key);
        } else if (key == "topology") {
            need(1);
            if (tok[1] == "insensor") {
                sc.topology.mode = Mode::InSensor;
            } else if (tok[1] == "baseline") {
                sc.topology.mode = Mode::Baseline;
            } else {
                throw TopologyError("unknown topology '" + tok[1] + "'");
            }
        } else if (key == "config") {
            for (std::size_t i = 1; i < tok.size(); ++i) {
                auto eq = tok[i].find('=');
                if (eq == std::string::npos) {
                    throw ParseError(line_no, tok[i], "expected key=value");
                }
                sc.config_overrides.emplace_back(tok[i].substr(0, eq), tok[i].substr(eq + 1));
            }
        } else {
            throw ParseError(line_no, key, "unknown scenario key");
        }
    }
    if (!saw_encoder) {
        throw ParseError(line_no, "encoder", "scenario does not reference an encoder spec");
    }
    return sc;
}

// Measure bits/symbol from an actual Huffman build, never assume them.
inline double measure_effective_bits(const EffectiveBitsSpec& eff, std::uint32_t quant_bits,
                                     const std::filesystem::path& base_dir) {
    switch (eff.source) {
        case EffectiveBitsSpec::Source::Fixed:
            return eff.fixed_value;
        case EffectiveBitsSpec::Source::MeasuredSynthetic: {
            SyntheticDistribution dist{SyntheticDistribution::Kind::DiscretizedGaussian,
                                       eff.sigma, quant_bits, {}};
            const auto stream = sample_symbols(dist, eff.count, eff.seed);
            const SymbolHistogram hist = histogram(stream);
            return huffman::avg_code_length(huffman::build_codebook(hist), hist);
        }
        case EffectiveBitsSpec::Source::MeasuredTensor: {
            const TensorFile t = read_tensor(read_file(base_dir / eff.tensor_path));
            const auto syms = t.symbols();
            const int limit = max_symbol(quant_bits);
            for (Symbol s : syms) {
                if (s > limit || s < -limit) {
                    throw SymbolOutOfRange("tensor symbol " + std::to_string(int{s}) +
                                           " outside the " + std::to_string(quant_bits) +
                                           "-bit range");
                }
            }
            const SymbolHistogram hist = histogram(syms);
            return huffman::avg_code_length(huffman::build_codebook(hist), hist);
        }
    }
    throw ValidationError("unhandled effective-bits source");
}

struct LoadedScenario {
    ScenarioFile file;
    NetworkSpec encoder;
    Scenario scenario;  // fully resolved
};

inline LoadedScenario resolve_scenario(const ScenarioFile& file,
                                       const std::filesystem::path& base_dir,
                                       const EnergyConfig& base_cfg = EnergyConfig{}) {
    LoadedScenario loaded;
    loaded.file = file;
    loaded.encoder = parse_spec(read_text_file(base_dir / file.encoder_path));
    if (loaded.encoder.name.empty()) {
        loaded.encoder.name = std::filesystem::path(file.encoder_path).stem().string();
    }

    Scenario sc;
    sc.input = loaded.encoder.input;
    sc.input_bits = loaded.encoder.input_bits;
    sc.encoder = count_macs(loaded.encoder);
    sc.quant_bits = file.quant_bits;
    sc.effective_bits = measure_effective_bits(file.effective, file.quant_bits, base_dir);
    if (!file.backend_path.empty()) {
        sc.backend_insensor = count_macs(parse_spec(read_text_file(base_dir / file.backend_path)));
    }
    if (!file.baseline_backend_path.empty()) {
        sc.backend_baseline =
            count_macs(parse_spec(read_text_file(base_dir / file.baseline_backend_path)));
    }
    sc.backend_overhead = file.backend_overhead;
    sc.baseline_payload_bytes = file.baseline_payload_bytes;
    sc.roi_factor = file.roi_factor;
    sc.topology = file.topology;
    sc.config = base_cfg;
    std::size_t line = 0;
    for (const auto& [key, value] : file.config_overrides) {
        detail::apply_config_override(sc.config, key, value, ++line);
    }
    validate(sc.config);
    loaded.scenario = sc;
    return loaded;
}

inline LoadedScenario load_scenario(const std::filesystem::path& path,
                                    const EnergyConfig& base_cfg = EnergyConfig{}) {
    ScenarioFile file = parse_scenario(read_text_file(path));
    if (file.name.empty()) {
        file.name = path.stem().string();
    }
    return resolve_scenario(file, path.parent_path(), base_cfg);
}

namespace detail {

inline std::string format_uj(double joules) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", joules * 1e6);
    return buf;
}

inline std::string format_sig(double v, const char* fmt = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace detail

// Plain-text breakdown used by the CLI `energy` command: both topologies,
// the energy ratio, bandwidth-reduction readings, and TOPS/W definitions.
inline std::string build_energy_report(const LoadedScenario& loaded) {
    const Scenario& sc = loaded.scenario;
    const ScenarioResult ours = evaluate(sc, Mode::InSensor);
    const ScenarioResult base = evaluate(sc, Mode::Baseline);
    const TensorShape out = sc.encoder.output_shape;

    std::ostringstream os;
    os << "scenario: " << loaded.file.name << "\n";
    os << "  encoder " << loaded.encoder.name << ": " << sc.encoder.total_macs << " MACs, "
       << sc.encoder.total_weights << " weights, output " << out.channels << "x" << out.height
       << "x" << out.width << " @ " << sc.quant_bits << "b\n";
    os << "  effective bits/symbol: " << detail::format_sig(sc.effective_bits, "%.4f") << "\n\n";

    auto row = [&os](const char* label, const ScenarioResult& r) {
        os << "  " << label << "\n";
        os << "    e_aps   " << detail::format_uj(r.e_aps) << " uJ\n";
        os << "    e_tsv   " << detail::format_uj(r.e_tsv) << " uJ\n";
        os << "    e_enc   " << detail::format_uj(r.e_enc) << " uJ\n";
        os << "    e_huff  " << detail::format_uj(r.e_huff) << " uJ\n";
        os << "    e_inf   " << detail::format_uj(r.e_inf) << " uJ\n";
        os << "    e_back  " << detail::format_uj(r.e_back) << " uJ\n";
        os << "    e_total " << detail::format_uj(r.e_total) << " uJ\n";
        os << "    interface bytes " << r.bytes_over_interface << ", transfer latency "
           << detail::format_sig(r.latency_transfer * 1e6) << " us\n";
    };
    row("in-sensor", ours);
    row("baseline", base);

    os << "\n  baseline/in-sensor energy ratio: "
       << detail::format_sig(base.e_total / ours.e_total, "%.3f") << "x\n";

    const double raw_reduction = bandwidth_reduction(
        sc.input, sc.input_bits, out, sc.quant_bits, static_cast<double>(sc.quant_bits));
    const double huff_reduction =
        bandwidth_reduction(sc.input, sc.input_bits, out, sc.quant_bits, sc.effective_bits);
    os << "  bandwidth reduction (raw " << sc.quant_bits
       << "-bit symbols): " << detail::format_sig(raw_reduction, "%.1f") << "x\n";
    os << "  bandwidth reduction (huffman, "
       << detail::format_sig(sc.effective_bits, "%.4g")
       << " bits/symbol): " << detail::format_sig(huff_reduction, "%.1f") << "x\n";
    if (sc.roi_factor != 1.0) {
        os << "  with roi factor " << detail::format_sig(sc.roi_factor, "%.3g") << ": raw "
           << detail::format_sig(raw_reduction * sc.roi_factor, "%.1f") << "x, huffman "
           << detail::format_sig(huff_reduction * sc.roi_factor, "%.1f") << "x\n";
    }

    os << "  tops/W (encoder only): "
       << detail::format_sig(tops_per_watt(sc.encoder, ours, TopsDefinition::EncoderOnly),
                             "%.3g")
       << "\n";
    os << "  tops/W (enc+huff+tsv): "
       << detail::format_sig(tops_per_watt(sc.encoder, ours, TopsDefinition::OnSensor), "%.3g")
       << "\n";
    os << "  tops/W (full pipeline): "
       << detail::format_sig(tops_per_watt(sc.encoder, ours, TopsDefinition::FullPipeline),
                             "%.3g")
       << "\n";
    return os.str();
}

}  // namespace oasis
