#pragma once

// Binary tensor file I/O plus deterministic synthetic activation generation.
//
// Tensor file format (little-endian): magic "OAST", version u8=1,
// dtype u8 (0=i8, 1=f32), ndim u8 (1..4), dims u32 each, payload row-major.
//
// Synthetic symbols are drawn from a discretized Gaussian over the n-bit
// symmetric symbol set with a counter-based generator, so a given seed
// reproduces the same stream on any platform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "oasis/errors.hpp"
#include "oasis/huffman.hpp"
#include "oasis/quantizer.hpp"

namespace oasis {

enum class Dtype : std::uint8_t {
    I8 = 0,
    F32 = 1,
};

struct TensorFile {
    Dtype dtype = Dtype::I8;
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> payload;

    [[nodiscard]] std::uint64_t element_count() const {
        std::uint64_t n = 1;
        for (std::uint32_t d : dims) {
            n *= d;
        }
        return dims.empty() ? 0 : n;
    }

    [[nodiscard]] std::span<const Symbol> symbols() const {
        if (dtype != Dtype::I8) {
            throw ValidationError("tensor is not i8");
        }
        return {reinterpret_cast<const Symbol*>(payload.data()), payload.size()};
    }

    [[nodiscard]] std::vector<float> floats() const {
        if (dtype != Dtype::F32) {
            throw ValidationError("tensor is not f32");
        }
        std::vector<float> out(payload.size() / 4);
        std::memcpy(out.data(), payload.data(), payload.size());
        return out;
    }

    static TensorFile from_symbols(std::span<const Symbol> syms,
                                   std::vector<std::uint32_t> dims_) {
        TensorFile t;
        t.dtype = Dtype::I8;
        t.dims = std::move(dims_);
        t.payload.assign(reinterpret_cast<const std::uint8_t*>(syms.data()),
                         reinterpret_cast<const std::uint8_t*>(syms.data()) + syms.size());
        return t;
    }

    static TensorFile from_floats(std::span<const float> vals,
                                  std::vector<std::uint32_t> dims_) {
        TensorFile t;
        t.dtype = Dtype::F32;
        t.dims = std::move(dims_);
        t.payload.resize(vals.size() * 4);
        std::memcpy(t.payload.data(), vals.data(), t.payload.size());
        return t;
    }
};

namespace detail {

inline std::size_t dtype_size(Dtype d) {
    return d == Dtype::I8 ? 1 : 4;
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

}  // namespace detail

inline std::vector<std::uint8_t> write_tensor(const TensorFile& t) {
    if (t.dims.empty() || t.dims.size() > 4) {
        throw DimOverflow("tensor must have 1..4 dimensions");
    }
    for (std::uint32_t d : t.dims) {
        if (d == 0) throw ValidationError("tensor dimensions must be positive");
    }
    if (t.payload.size() != t.element_count() * detail::dtype_size(t.dtype)) {
        throw ValidationError("payload length does not match dims and dtype");
    }
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'O', 'A', 'S', 'T'});
    out.push_back(1);
    out.push_back(static_cast<std::uint8_t>(t.dtype));
    out.push_back(static_cast<std::uint8_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) {
        detail::put_u32(out, d);
    }
    out.insert(out.end(), t.payload.begin(), t.payload.end());
    return out;
}

inline TensorFile read_tensor(std::span<const std::uint8_t> data) {
    if (data.size() < 4 || data[0] != 'O' || data[1] != 'A' || data[2] != 'S' ||
        data[3] != 'T') {
        throw BadMagic("not an OAST tensor");
    }
    if (data.size() < 7) {
        throw TruncatedPayload("tensor header truncated");
    }
    if (data[4] != 1) {
        throw CorruptStream("unsupported tensor version " + std::to_string(int{data[4]}));
    }
    TensorFile t;
    if (data[5] > 1) {
        throw CorruptStream("unknown dtype tag " + std::to_string(int{data[5]}));
    }
    t.dtype = static_cast<Dtype>(data[5]);
    const std::uint8_t ndim = data[6];
    if (ndim < 1 || ndim > 4) {
        throw DimOverflow("tensor rank must be 1..4, got " + std::to_string(int{ndim}));
    }
    std::size_t pos = 7;
    if (data.size() < pos + 4ull * ndim) {
        throw TruncatedPayload("tensor dims truncated");
    }
    std::uint64_t elements = 1;
    for (std::uint8_t i = 0; i < ndim; ++i) {
        std::uint32_t d = 0;
        for (int b = 0; b < 4; ++b) {
            d |= std::uint32_t{data[pos + b]} << (8 * b);
        }
        pos += 4;
        if (d == 0) throw ValidationError("tensor dimension is zero");
        if (elements > (std::uint64_t{1} << 40) / d) {
            throw DimOverflow("tensor element count too large");
        }
        elements *= d;
        t.dims.push_back(d);
    }
    const std::uint64_t expect = elements * detail::dtype_size(t.dtype);
    if (data.size() - pos != expect) {
        throw TruncatedPayload("payload length " + std::to_string(data.size() - pos) +
                               " does not match expected " + std::to_string(expect));
    }
    t.payload.assign(data.begin() + static_cast<std::ptrdiff_t>(pos), data.end());
    return t;
}

// --- plain file helpers ---

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

inline std::string read_text_file(const std::filesystem::path& path) {
    auto bytes = read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

// --- synthetic activation streams ---

struct SyntheticDistribution {
    enum class Kind { DiscretizedGaussian, Custom };
    Kind kind = Kind::DiscretizedGaussian;
    double sigma = 1.0;       // in symbol units
    std::uint32_t bits = 4;   // confines support to the n-bit symbol set
    std::vector<double> custom_pmf;  // index 0 -> symbol -(2^(n-1)-1)

    // Normalized probability per symbol, ordered from -limit to +limit.
    [[nodiscard]] std::vector<double> pmf() const {
        const int limit = max_symbol(bits);
        const std::size_t support = static_cast<std::size_t>(2 * limit + 1);
        std::vector<double> p(support, 0.0);
        if (kind == Kind::Custom) {
            if (custom_pmf.size() != support) {
                throw ValidationError("custom pmf must cover the full symbol set");
            }
            p = custom_pmf;
        } else {
            if (!(sigma > 0.0) || !std::isfinite(sigma)) {
                throw ValidationError("sigma must be positive and finite");
            }
            for (int k = -limit; k <= limit; ++k) {
                p[static_cast<std::size_t>(k + limit)] =
                    std::exp(-(static_cast<double>(k) * k) / (2.0 * sigma * sigma));
            }
        }
        double total = 0.0;
        for (double v : p) {
            if (v < 0.0 || !std::isfinite(v)) {
                throw ValidationError("pmf entries must be finite and >= 0");
            }
            total += v;
        }
        if (total <= 0.0) {
            // All mass underflowed (sigma -> 0): degenerate distribution at 0.
            p.assign(support, 0.0);
            p[static_cast<std::size_t>(limit)] = 1.0;
            return p;
        }
        for (double& v : p) {
            v /= total;
        }
        return p;
    }
};

namespace detail {

// SplitMix64 finalizer in counter mode: hash(seed, i) is a pure function.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline double uniform01(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t x = mix64(seed + index * 0x9E3779B97F4A7C15ull);
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline std::vector<Symbol> sample_symbols(const SyntheticDistribution& dist, std::uint64_t count,
                                          std::uint64_t seed) {
    if (count < 1) {
        throw ValidationError("sample count must be >= 1");
    }
    const int limit = max_symbol(dist.bits);
    const std::vector<double> p = dist.pmf();
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    std::vector<Symbol> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const double u = detail::uniform01(seed, i);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const int idx = static_cast<int>(it - cdf.begin());
        out.push_back(static_cast<Symbol>(idx - limit));
    }
    return out;
}

// Binary search for the Gaussian width whose sampled stream reaches a target
// Huffman rate. Monotone in sigma: wider bells carry more entropy.
inline double fit_sigma(std::uint32_t bits, double target_bits_per_symbol, std::uint64_t count,
                        std::uint64_t seed, int iterations = 44) {
    if (target_bits_per_symbol < 1.0 || target_bits_per_symbol > bits) {
        throw InvalidBits("target rate must lie in [1, bits]");
    }
    double lo = 0.02, hi = 4.0;
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        SyntheticDistribution dist{SyntheticDistribution::Kind::DiscretizedGaussian, mid, bits,
                                   {}};
        const auto stream = sample_symbols(dist, count, seed);
        const SymbolHistogram hist = histogram(stream);
        const double rate = huffman::avg_code_length(huffman::build_codebook(hist), hist);
        if (rate < target_bits_per_symbol) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace oasis
