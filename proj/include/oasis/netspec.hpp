#pragma once

// Network workload description: a line-oriented spec format for encoder /
// back-end architectures, shape inference, and MAC/weight accounting.
//
// Spec file format (UTF-8 text, '#' starts a comment, ',' or newline
// separates statements):
//
//   input <C>x<H>x<W> [bits=<n>]
//   conv        c<out> k<kernel> [s<stride>]
//   residual    c<out> [s<stride>]          # two 3x3 convs + 1x1 projection
//   patch_embed c<out> k<patch> [s<stride>] # stride defaults to patch size
//   window_attn c<out> w<window> h<heads> [mlp<ratio>]
//   linear      c<out>                      # flattens input
//   pool        global | to=<s> | k<kernel> s<stride>
//   upsample    x<scale>
//   downsample  x<scale>
//
// Keys also accept long form (out_channels=128, kernel=7, ...). Spatial
// arithmetic uses "same" padding: output = ceil(input / stride).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "oasis/errors.hpp"

namespace oasis {

struct TensorShape {
    std::uint32_t channels = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;

    [[nodiscard]] std::uint64_t element_count() const {
        return std::uint64_t{channels} * height * width;
    }
    bool operator==(const TensorShape&) const = default;
};

enum class LayerKind {
    Conv2d,
    ResidualBlock,
    PatchEmbed,
    WindowAttentionBlock,
    Linear,
    Pool,
    Upsample,
    Downsample,
};

inline const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv2d: return "conv";
        case LayerKind::ResidualBlock: return "residual";
        case LayerKind::PatchEmbed: return "patch_embed";
        case LayerKind::WindowAttentionBlock: return "window_attn";
        case LayerKind::Linear: return "linear";
        case LayerKind::Pool: return "pool";
        case LayerKind::Upsample: return "upsample";
        case LayerKind::Downsample: return "downsample";
    }
    return "?";
}

struct LayerSpec {
    LayerKind kind = LayerKind::Conv2d;
    std::uint32_t out_channels = 0;  // 0 = inherit input channels (pool/up/down)
    std::uint32_t kernel = 1;
    std::uint32_t stride = 1;
    std::uint32_t window = 0;     // WindowAttentionBlock only
    std::uint32_t heads = 0;      // WindowAttentionBlock only
    double mlp_ratio = 4.0;       // WindowAttentionBlock only
    std::uint32_t scale = 1;      // Upsample/Downsample factor
    bool global_pool = false;     // Pool: collapse spatial dims to 1x1
    std::uint32_t pool_target = 0;  // Pool: adaptive target spatial size
};

struct NetworkSpec {
    std::string name;
    TensorShape input;
    std::uint32_t input_bits = 8;
    std::vector<LayerSpec> layers;
};

struct LayerWork {
    TensorShape output;
    std::uint64_t macs = 0;
    std::uint64_t weights = 0;
};

struct WorkloadSummary {
    std::vector<LayerWork> per_layer;
    std::uint64_t total_macs = 0;
    std::uint64_t total_weights = 0;
    TensorShape output_shape;
};

namespace detail {

inline std::uint32_t ceil_div(std::uint32_t a, std::uint32_t b) {
    return (a + b - 1) / b;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, const std::string& field) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    std::from_chars_result r{};
    if constexpr (std::is_floating_point_v<T>) {
        // from_chars<double> is unreliable pre-GCC11 for some locales; strtod
        // on a bounded copy keeps this header dependency-free.
        std::string copy(text);
        char* end = nullptr;
        value = static_cast<T>(std::strtod(copy.c_str(), &end));
        if (end != copy.c_str() + copy.size() || copy.empty()) {
            throw ParseError(line, field, "expected a number, got '" + copy + "'");
        }
        return value;
    } else {
        r = std::from_chars(first, last, value);
        if (r.ec != std::errc{} || r.ptr != last) {
            throw ParseError(line, field, "expected an integer, got '" + std::string(text) + "'");
        }
        return value;
    }
}

struct KeyValue {
    std::string key;
    std::string value;  // empty for bare flags ("global")
};

// Accepts "key=value", compact "k7"/"c128"/"mlp4", and bare flags.
inline KeyValue split_token(std::string_view tok, std::size_t line) {
    if (auto eq = tok.find('='); eq != std::string_view::npos) {
        return {std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1))};
    }
    std::size_t i = 0;
    while (i < tok.size() && (std::isalpha(static_cast<unsigned char>(tok[i])) || tok[i] == '_')) {
        ++i;
    }
    if (i == tok.size()) {
        return {std::string(tok), ""};
    }
    if (i == 0) {
        throw ParseError(line, "", "malformed token '" + std::string(tok) + "'");
    }
    return {std::string(tok.substr(0, i)), std::string(tok.substr(i))};
}

inline std::string canonical_key(const std::string& key) {
    if (key == "c" || key == "channels" || key == "out_channels") return "c";
    if (key == "k" || key == "kernel") return "k";
    if (key == "s" || key == "stride") return "s";
    if (key == "w" || key == "window") return "w";
    if (key == "h" || key == "heads") return "h";
    if (key == "mlp" || key == "mlp_ratio" || key == "ratio") return "mlp";
    if (key == "x" || key == "scale") return "x";
    if (key == "to") return "to";
    if (key == "global") return "global";
    if (key == "bits") return "bits";
    return key;
}

}  // namespace detail

inline std::uint64_t activation_bytes(const TensorShape& shape, std::uint32_t bits) {
    if (bits < 1 || bits > 32) {
        throw InvalidBits("activation bits must be in 1..32, got " + std::to_string(bits));
    }
    return (shape.element_count() * bits + 7) / 8;
}

inline NetworkSpec parse_spec(std::string_view text) {
    NetworkSpec net;
    bool saw_input = false;
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

        // Commas separate statements within one line.
        std::size_t spos = 0;
        while (spos <= line.size()) {
            std::size_t comma = line.find(',', spos);
            std::string_view stmt = detail::trim(line.substr(
                spos, comma == std::string_view::npos ? line.size() - spos : comma - spos));
            spos = (comma == std::string_view::npos) ? line.size() + 1 : comma + 1;
            if (stmt.empty()) continue;

            std::vector<std::string_view> tokens;
            std::size_t t = 0;
            while (t < stmt.size()) {
                while (t < stmt.size() && (stmt[t] == ' ' || stmt[t] == '\t')) ++t;
                std::size_t start = t;
                while (t < stmt.size() && stmt[t] != ' ' && stmt[t] != '\t') ++t;
                if (t > start) tokens.push_back(stmt.substr(start, t - start));
            }
            if (tokens.empty()) continue;

            std::string head(tokens.front());
            if (head == "input") {
                if (saw_input) throw ParseError(line_no, "input", "duplicate input line");
                if (tokens.size() < 2) throw ParseError(line_no, "input", "missing dimensions");
                std::string dims(tokens[1]);
                std::uint32_t c = 0, h = 0, w = 0;
                std::size_t x1 = dims.find('x');
                std::size_t x2 = (x1 == std::string::npos) ? std::string::npos
                                                           : dims.find('x', x1 + 1);
                if (x1 == std::string::npos || x2 == std::string::npos) {
                    throw ParseError(line_no, "input", "expected <C>x<H>x<W>, got '" + dims + "'");
                }
                c = detail::parse_number<std::uint32_t>(dims.substr(0, x1), line_no, "channels");
                h = detail::parse_number<std::uint32_t>(dims.substr(x1 + 1, x2 - x1 - 1), line_no,
                                                        "height");
                w = detail::parse_number<std::uint32_t>(dims.substr(x2 + 1), line_no, "width");
                net.input = TensorShape{c, h, w};
                for (std::size_t i = 2; i < tokens.size(); ++i) {
                    auto kv = detail::split_token(tokens[i], line_no);
                    if (detail::canonical_key(kv.key) == "bits") {
                        net.input_bits =
                            detail::parse_number<std::uint32_t>(kv.value, line_no, "bits");
                    } else if (detail::canonical_key(kv.key) == "name") {
                        net.name = kv.value;
                    } else {
                        throw ParseError(line_no, kv.key, "unexpected key on input line");
                    }
                }
                if (c < 1 || h < 1 || w < 1) {
                    throw ValidationError("input dimensions must all be >= 1");
                }
                if (net.input_bits < 1 || net.input_bits > 32) {
                    throw ValidationError("input bits must be in 1..32");
                }
                saw_input = true;
                continue;
            }
            if (head == "name") {
                if (tokens.size() != 2) throw ParseError(line_no, "name", "expected one value");
                net.name = std::string(tokens[1]);
                continue;
            }

            LayerSpec layer;
            if (head == "conv" || head == "conv2d") {
                layer.kind = LayerKind::Conv2d;
            } else if (head == "residual" || head == "resblock") {
                layer.kind = LayerKind::ResidualBlock;
            } else if (head == "patch_embed" || head == "patchembed") {
                layer.kind = LayerKind::PatchEmbed;
            } else if (head == "window_attn" || head == "window_attention") {
                layer.kind = LayerKind::WindowAttentionBlock;
            } else if (head == "linear" || head == "fc") {
                layer.kind = LayerKind::Linear;
            } else if (head == "pool") {
                layer.kind = LayerKind::Pool;
            } else if (head == "upsample") {
                layer.kind = LayerKind::Upsample;
            } else if (head == "downsample") {
                layer.kind = LayerKind::Downsample;
            } else {
                throw ParseError(line_no, head, "unknown layer kind");
            }

            bool have_c = false, have_k = false, have_s = false, have_w = false, have_h = false,
                 have_x = false;
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                auto kv = detail::split_token(tokens[i], line_no);
                std::string key = detail::canonical_key(kv.key);
                auto expect = [&](std::initializer_list<LayerKind> kinds) {
                    for (LayerKind k : kinds) {
                        if (layer.kind == k) return;
                    }
                    throw ParseError(line_no, kv.key,
                                     std::string("key not valid for ") +
                                         layer_kind_name(layer.kind));
                };
                if (key == "c") {
                    expect({LayerKind::Conv2d, LayerKind::ResidualBlock, LayerKind::PatchEmbed,
                            LayerKind::WindowAttentionBlock, LayerKind::Linear});
                    layer.out_channels =
                        detail::parse_number<std::uint32_t>(kv.value, line_no, "out_channels");
                    have_c = true;
                } else if (key == "k") {
                    expect({LayerKind::Conv2d, LayerKind::PatchEmbed, LayerKind::Pool});
                    layer.kernel = detail::parse_number<std::uint32_t>(kv.value, line_no, "kernel");
                    have_k = true;
                } else if (key == "s") {
                    expect({LayerKind::Conv2d, LayerKind::ResidualBlock, LayerKind::PatchEmbed,
                            LayerKind::Pool});
                    layer.stride = detail::parse_number<std::uint32_t>(kv.value, line_no, "stride");
                    have_s = true;
                } else if (key == "w") {
                    expect({LayerKind::WindowAttentionBlock});
                    layer.window = detail::parse_number<std::uint32_t>(kv.value, line_no, "window");
                    have_w = true;
                } else if (key == "h") {
                    expect({LayerKind::WindowAttentionBlock});
                    layer.heads = detail::parse_number<std::uint32_t>(kv.value, line_no, "heads");
                    have_h = true;
                } else if (key == "mlp") {
                    expect({LayerKind::WindowAttentionBlock});
                    layer.mlp_ratio = detail::parse_number<double>(kv.value, line_no, "mlp_ratio");
                } else if (key == "x") {
                    expect({LayerKind::Upsample, LayerKind::Downsample});
                    layer.scale = detail::parse_number<std::uint32_t>(kv.value, line_no, "scale");
                    have_x = true;
                } else if (key == "to") {
                    expect({LayerKind::Pool});
                    layer.pool_target =
                        detail::parse_number<std::uint32_t>(kv.value, line_no, "to");
                } else if (key == "global") {
                    expect({LayerKind::Pool});
                    layer.global_pool = true;
                } else {
                    throw ParseError(line_no, kv.key, "unknown key");
                }
            }

            auto require = [&](bool have, const char* field) {
                if (!have) {
                    throw ParseError(line_no, field,
                                     std::string("missing required field for ") +
                                         layer_kind_name(layer.kind));
                }
            };
            switch (layer.kind) {
                case LayerKind::Conv2d:
                    require(have_c, "out_channels");
                    require(have_k, "kernel");
                    break;
                case LayerKind::ResidualBlock:
                    require(have_c, "out_channels");
                    layer.kernel = 3;
                    break;
                case LayerKind::PatchEmbed:
                    require(have_c, "out_channels");
                    require(have_k, "kernel");
                    if (!have_s) layer.stride = layer.kernel;
                    break;
                case LayerKind::WindowAttentionBlock:
                    require(have_c, "out_channels");
                    require(have_w, "window");
                    require(have_h, "heads");
                    break;
                case LayerKind::Linear:
                    require(have_c, "out_channels");
                    break;
                case LayerKind::Pool:
                    if (!layer.global_pool && layer.pool_target == 0) {
                        require(have_k, "kernel");
                        if (!have_s) layer.stride = layer.kernel;
                    }
                    break;
                case LayerKind::Upsample:
                case LayerKind::Downsample:
                    require(have_x, "scale");
                    break;
            }

            if (layer.kernel < 1) throw ValidationError("kernel must be >= 1");
            if (layer.stride < 1) throw ValidationError("stride must be >= 1");
            if (layer.scale < 1) throw ValidationError("scale must be >= 1");
            if (layer.kind == LayerKind::WindowAttentionBlock) {
                if (layer.window < 1) throw ValidationError("window must be >= 1");
                if (layer.heads < 1) throw ValidationError("heads must be >= 1");
                if (layer.mlp_ratio <= 0.0) throw ValidationError("mlp_ratio must be > 0");
                if (layer.out_channels % layer.heads != 0) {
                    throw ValidationError("heads (" + std::to_string(layer.heads) +
                                          ") must divide out_channels (" +
                                          std::to_string(layer.out_channels) + ")");
                }
            }
            net.layers.push_back(layer);
        }
    }

    if (!saw_input) {
        throw ParseError(line_no, "input", "spec has no input line");
    }
    return net;
}

// Per-layer output shapes under the "same"-padding convention.
inline std::vector<TensorShape> infer_shapes(const NetworkSpec& net) {
    std::vector<TensorShape> shapes;
    shapes.reserve(net.layers.size());
    TensorShape cur = net.input;
    for (const LayerSpec& layer : net.layers) {
        TensorShape out = cur;
        switch (layer.kind) {
            case LayerKind::Conv2d:
            case LayerKind::ResidualBlock:
            case LayerKind::PatchEmbed:
                out.channels = layer.out_channels;
                out.height = detail::ceil_div(cur.height, layer.stride);
                out.width = detail::ceil_div(cur.width, layer.stride);
                break;
            case LayerKind::WindowAttentionBlock:
                out.channels = layer.out_channels;
                break;
            case LayerKind::Linear:
                out = TensorShape{layer.out_channels, 1, 1};
                break;
            case LayerKind::Pool:
                if (layer.global_pool) {
                    out.height = out.width = 1;
                } else if (layer.pool_target > 0) {
                    out.height = layer.pool_target;
                    out.width = layer.pool_target;
                } else {
                    out.height = detail::ceil_div(cur.height, layer.stride);
                    out.width = detail::ceil_div(cur.width, layer.stride);
                }
                break;
            case LayerKind::Upsample: {
                std::uint64_t h = std::uint64_t{cur.height} * layer.scale;
                std::uint64_t w = std::uint64_t{cur.width} * layer.scale;
                if (h > std::numeric_limits<std::uint32_t>::max() ||
                    w > std::numeric_limits<std::uint32_t>::max()) {
                    throw ShapeError("upsample overflows spatial dimensions");
                }
                out.height = static_cast<std::uint32_t>(h);
                out.width = static_cast<std::uint32_t>(w);
                break;
            }
            case LayerKind::Downsample:
                out.height = detail::ceil_div(cur.height, layer.scale);
                out.width = detail::ceil_div(cur.width, layer.scale);
                break;
        }
        if (out.channels < 1 || out.height < 1 || out.width < 1) {
            throw ShapeError("layer would produce a zero-sized dimension");
        }
        shapes.push_back(out);
        cur = out;
    }
    return shapes;
}

// MACs and weight counts per layer. Biases and normalization are not counted.
inline WorkloadSummary count_macs(const NetworkSpec& net) {
    WorkloadSummary summary;
    std::vector<TensorShape> shapes = infer_shapes(net);
    TensorShape in = net.input;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& layer = net.layers[i];
        const TensorShape& out = shapes[i];
        LayerWork work;
        work.output = out;
        const std::uint64_t out_hw = std::uint64_t{out.height} * out.width;
        switch (layer.kind) {
            case LayerKind::Conv2d:
            case LayerKind::PatchEmbed: {
                const std::uint64_t k2 = std::uint64_t{layer.kernel} * layer.kernel;
                work.macs = out_hw * out.channels * in.channels * k2;
                work.weights = k2 * in.channels * out.channels;
                break;
            }
            case LayerKind::ResidualBlock: {
                // Two 3x3 convs; a 1x1 projection when channels or stride change.
                work.macs = out_hw * out.channels * in.channels * 9 +
                            out_hw * out.channels * out.channels * 9;
                work.weights = 9ull * in.channels * out.channels +
                               9ull * out.channels * out.channels;
                if (layer.stride != 1 || in.channels != out.channels) {
                    work.macs += out_hw * out.channels * in.channels;
                    work.weights += std::uint64_t{in.channels} * out.channels;
                }
                break;
            }
            case LayerKind::WindowAttentionBlock: {
                const std::uint64_t tokens = std::uint64_t{in.height} * in.width;
                const std::uint64_t c = layer.out_channels;
                // Windows are clamped to the feature-map extent.
                const std::uint64_t win_area =
                    std::uint64_t{std::min(layer.window, in.height)} *
                    std::min(layer.window, in.width);
                const std::uint64_t hidden =
                    static_cast<std::uint64_t>(layer.mlp_ratio * static_cast<double>(c) + 0.5);
                work.macs = 3 * tokens * c * c        // qkv projection
                            + 2 * tokens * win_area * c  // scores + weighted sum
                            + tokens * c * c             // output projection
                            + 2 * tokens * c * hidden;   // MLP
                work.weights = 4 * c * c + 2 * c * hidden;
                break;
            }
            case LayerKind::Linear: {
                const std::uint64_t in_features = in.element_count();
                work.macs = in_features * layer.out_channels;
                work.weights = in_features * layer.out_channels;
                break;
            }
            case LayerKind::Pool:
            case LayerKind::Upsample:
            case LayerKind::Downsample:
                break;  // no MACs, no weights
        }
        summary.total_macs += work.macs;
        summary.total_weights += work.weights;
        summary.per_layer.push_back(work);
        in = out;
    }
    summary.output_shape = net.layers.empty() ? net.input : shapes.back();
    return summary;
}

}  // namespace oasis
