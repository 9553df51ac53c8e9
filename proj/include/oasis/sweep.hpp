#pragma once

// Design-space-exploration driver: sweep encoder output dims and quantizer
// bit-widths over a base scenario, one report row per grid point.
//
// Grid file format ('#' comments):
//
//   name      <string>
//   scenario  <path to .scenario, relative to this file>
//   template  <path to a netspec with $d / $s placeholders>
//   d         <v> <v> ...
//   s         <v> <v> ...
//   bits      <v> <v> ...
//   topology  insensor baseline
//   seed      <n>
//
// The template replaces the scenario's encoder at every (d, s) point. Rows
// are emitted in lexicographic scenario-id order, and synthetic effective
// bits are seeded by (seed, bits) only, so points sharing a bit-width see
// the identical measured stream.

#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vendor_json.hpp"

#include "oasis/scenario.hpp"

namespace oasis {

struct SweepGrid {
    std::string name;
    std::string scenario_path;
    std::string template_path;
    std::vector<std::uint32_t> d_values;
    std::vector<std::uint32_t> s_values;
    std::vector<std::uint32_t> bit_values;
    std::vector<Mode> topologies;
    std::uint64_t seed = 1;
};

struct ReportRow {
    std::string id;
    std::string topology;
    std::uint32_t d = 0;
    std::uint32_t s = 0;
    std::uint32_t bits = 0;
    double effective_bits = 0.0;
    ScenarioResult result;
    double bandwidth_reduction_raw = 0.0;
    std::string source = "modeled";  // "literature" rows carry fixed constants
    std::string status = "ok";
};

struct Report {
    std::vector<ReportRow> rows;
};

inline SweepGrid parse_grid(std::string_view text) {
    SweepGrid grid;
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
        auto values_u32 = [&](std::vector<std::uint32_t>& out) {
            if (tok.size() < 2) throw ParseError(line_no, key, "expected at least one value");
            out.clear();
            for (std::size_t i = 1; i < tok.size(); ++i) {
                out.push_back(detail::parse_number<std::uint32_t>(tok[i], line_no, key));
            }
        };
        if (key == "name") {
            if (tok.size() != 2) throw ParseError(line_no, key, "expected one value");
            grid.name = tok[1];
        } else if (key == "scenario") {
            if (tok.size() != 2) throw ParseError(line_no, key, "expected one path");
            grid.scenario_path = tok[1];
        } else if (key == "template") {
            if (tok.size() != 2) throw ParseError(line_no, key, "expected one path");
            grid.template_path = tok[1];
        } else if (key == "d") {
            values_u32(grid.d_values);
        } else if (key == "s") {
            values_u32(grid.s_values);
        } else if (key == "bits") {
            values_u32(grid.bit_values);
        } else if (key == "topology") {
            if (tok.size() < 2) throw ParseError(line_no, key, "expected at least one value");
            for (std::size_t i = 1; i < tok.size(); ++i) {
                if (tok[i] == "insensor") {
                    grid.topologies.push_back(Mode::InSensor);
                } else if (tok[i] == "baseline") {
                    grid.topologies.push_back(Mode::Baseline);
                } else {
                    throw ParseError(line_no, key, "unknown topology '" + tok[i] + "'");
                }
            }
        } else if (key == "seed") {
            if (tok.size() != 2) throw ParseError(line_no, key, "expected one value");
            grid.seed = detail::parse_number<std::uint64_t>(tok[1], line_no, key);
        } else {
            throw ParseError(line_no, key, "unknown grid key");
        }
    }
    if (grid.scenario_path.empty()) throw ValidationError("grid has no scenario reference");
    if (grid.template_path.empty()) throw ValidationError("grid has no template reference");
    if (grid.d_values.empty() || grid.s_values.empty() || grid.bit_values.empty()) {
        throw ValidationError("grid value lists must be nonempty");
    }
    if (grid.topologies.empty()) {
        grid.topologies = {Mode::InSensor, Mode::Baseline};
    }
    return grid;
}

namespace detail {

inline std::string substitute_placeholders(std::string text, std::uint32_t d, std::uint32_t s) {
    auto replace_all = [](std::string& str, const std::string& from, const std::string& to) {
        std::size_t at = 0;
        while ((at = str.find(from, at)) != std::string::npos) {
            str.replace(at, from.size(), to);
            at += to.size();
        }
    };
    replace_all(text, "$d", std::to_string(d));
    replace_all(text, "$s", std::to_string(s));
    return text;
}

}  // namespace detail

inline Report run_sweep(const SweepGrid& grid, const std::filesystem::path& base_dir,
                        const EnergyConfig& base_cfg = EnergyConfig{}) {
    const std::filesystem::path scenario_path = base_dir / grid.scenario_path;
    const ScenarioFile base_file = parse_scenario(read_text_file(scenario_path));
    const std::filesystem::path scenario_dir = scenario_path.parent_path();
    const std::string template_text = read_text_file(base_dir / grid.template_path);

    // One measured stream per bit-width: points that share `bits` must see
    // identical effective bits (output element count does not enter).
    std::map<std::uint32_t, double> effective_by_bits;
    auto effective_for = [&](std::uint32_t bits) {
        auto it = effective_by_bits.find(bits);
        if (it != effective_by_bits.end()) return it->second;
        EffectiveBitsSpec eff = base_file.effective;
        eff.seed = detail::mix64(grid.seed ^ (0x5851F42D4C957F2Dull * bits));
        const double v = measure_effective_bits(eff, bits, scenario_dir);
        effective_by_bits.emplace(bits, v);
        return v;
    };

    Report report;
    for (std::uint32_t d : grid.d_values) {
        for (std::uint32_t s : grid.s_values) {
            for (std::uint32_t bits : grid.bit_values) {
                for (Mode mode : grid.topologies) {
                    ReportRow row;
                    row.id = grid.name + "/d" + std::to_string(d) + "_s" + std::to_string(s) +
                             "_b" + std::to_string(bits) + "/" + mode_name(mode);
                    row.topology = mode_name(mode);
                    row.d = d;
                    row.s = s;
                    row.bits = bits;
                    try {
                        ScenarioFile point = base_file;
                        point.quant_bits = bits;
                        NetworkSpec encoder = parse_spec(
                            detail::substitute_placeholders(template_text, d, s));

                        Scenario sc;
                        sc.input = encoder.input;
                        sc.input_bits = encoder.input_bits;
                        sc.encoder = count_macs(encoder);
                        sc.quant_bits = bits;
                        sc.effective_bits =
                            point.effective.source == EffectiveBitsSpec::Source::Fixed
                                ? point.effective.fixed_value
                                : effective_for(bits);
                        if (!point.backend_path.empty()) {
                            sc.backend_insensor = count_macs(
                                parse_spec(read_text_file(scenario_dir / point.backend_path)));
                        }
                        if (!point.baseline_backend_path.empty()) {
                            sc.backend_baseline = count_macs(parse_spec(
                                read_text_file(scenario_dir / point.baseline_backend_path)));
                        }
                        sc.backend_overhead = point.backend_overhead;
                        sc.baseline_payload_bytes = point.baseline_payload_bytes;
                        sc.roi_factor = point.roi_factor;
                        sc.topology = point.topology;
                        sc.config = base_cfg;
                        std::size_t line = 0;
                        for (const auto& [k, v] : point.config_overrides) {
                            detail::apply_config_override(sc.config, k, v, ++line);
                        }

                        row.effective_bits = sc.effective_bits;
                        row.result = evaluate(sc, mode);
                        row.bandwidth_reduction_raw = bandwidth_reduction(
                            sc.input, sc.input_bits, sc.encoder.output_shape, sc.quant_bits,
                            static_cast<double>(sc.quant_bits));
                    } catch (const Error& e) {
                        row.status = e.what();
                    }
                    report.rows.push_back(std::move(row));
                }
            }
        }
    }

    // Published in-pixel processing reference point, not produced by this
    // model: first-conv-block bandwidth reduction of 21x on 224x224 inputs.
    ReportRow p2m;
    p2m.id = "reference/p2m_vww";
    p2m.topology = "insensor";
    p2m.source = "literature";
    p2m.result.bandwidth_reduction = 21.0;
    p2m.bandwidth_reduction_raw = 21.0;
    report.rows.push_back(std::move(p2m));

    std::sort(report.rows.begin(), report.rows.end(),
              [](const ReportRow& a, const ReportRow& b) { return a.id < b.id; });
    return report;
}

inline std::string report_csv(const Report& report) {
    std::ostringstream os;
    os << "id,topology,d,s,bits,effective_bits,e_aps_uj,e_tsv_uj,e_enc_uj,e_huff_uj,e_inf_uj,"
          "e_back_uj,e_total_uj,interface_bytes,bandwidth_reduction,bandwidth_reduction_raw,"
          "latency_us,tops_per_watt,source,status\n";
    for (const ReportRow& row : report.rows) {
        const ScenarioResult& r = row.result;
        os << row.id << ',' << row.topology << ',' << row.d << ',' << row.s << ',' << row.bits
           << ',' << detail::format_sig(row.effective_bits, "%.4f") << ','
           << detail::format_uj(r.e_aps) << ',' << detail::format_uj(r.e_tsv) << ','
           << detail::format_uj(r.e_enc) << ',' << detail::format_uj(r.e_huff) << ','
           << detail::format_uj(r.e_inf) << ',' << detail::format_uj(r.e_back) << ','
           << detail::format_uj(r.e_total) << ',' << r.bytes_over_interface << ','
           << detail::format_sig(r.bandwidth_reduction) << ','
           << detail::format_sig(row.bandwidth_reduction_raw) << ','
           << detail::format_sig(r.latency_transfer * 1e6) << ','
           << detail::format_sig(r.tops_per_watt) << ',' << row.source << ','
           << (row.status == "ok" ? "ok" : row.status) << "\n";
    }
    return os.str();
}

inline std::string report_json(const Report& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ReportRow& row : report.rows) {
        const ScenarioResult& r = row.result;
        rows.push_back({{"id", row.id},
                        {"topology", row.topology},
                        {"d", row.d},
                        {"s", row.s},
                        {"bits", row.bits},
                        {"effective_bits", row.effective_bits},
                        {"e_aps", r.e_aps},
                        {"e_tsv", r.e_tsv},
                        {"e_enc", r.e_enc},
                        {"e_huff", r.e_huff},
                        {"e_inf", r.e_inf},
                        {"e_back", r.e_back},
                        {"e_total", r.e_total},
                        {"interface_bytes", r.bytes_over_interface},
                        {"bandwidth_reduction", r.bandwidth_reduction},
                        {"bandwidth_reduction_raw", row.bandwidth_reduction_raw},
                        {"latency_transfer", r.latency_transfer},
                        {"tops_per_watt", r.tops_per_watt},
                        {"source", row.source},
                        {"status", row.status}});
    }
    return rows.dump(2) + "\n";
}

}  // namespace oasis
