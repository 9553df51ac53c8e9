#pragma once

// Symmetric uniform quantization with a momentum-tracked dynamic range.
//
// Symbols live in the signed set {-(2^(n-1)-1), ..., +(2^(n-1)-1)}: 2^n - 1
// levels, symmetric about zero, matching the scale denominator 2^n - 1.
// Rounding is half-away-from-zero so sign symmetry is exact.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "oasis/errors.hpp"

namespace oasis {

using Symbol = std::int8_t;

struct QuantizerState {
    std::uint32_t bits = 4;     // n, 2..8
    double range_max = 0.0;     // running |activation| maximum
    double momentum = 0.9;      // in [0, 1)
};

inline QuantizerState make_quantizer(std::uint32_t bits, double range_max,
                                     double momentum = 0.9) {
    if (bits < 2 || bits > 8) {
        throw ValidationError("quantizer bits must be in 2..8, got " + std::to_string(bits));
    }
    if (!std::isfinite(range_max) || range_max < 0.0) {
        throw ValidationError("range_max must be finite and >= 0");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw ValidationError("momentum must be in [0, 1)");
    }
    return QuantizerState{bits, range_max, momentum};
}

inline int max_symbol(std::uint32_t bits) {
    return (1 << (bits - 1)) - 1;
}

inline double q_scale(const QuantizerState& state) {
    if (state.range_max <= 0.0) {
        throw DegenerateRange("quantization range is zero");
    }
    return 2.0 * state.range_max / static_cast<double>((1u << state.bits) - 1);
}

inline Symbol quantize_value(double z, const QuantizerState& state) {
    if (!std::isfinite(z)) {
        throw NonFiniteInput("cannot quantize a non-finite value");
    }
    const double scale = q_scale(state);
    const int limit = max_symbol(state.bits);
    double q = std::round(z / scale);  // rounds halfway cases away from zero
    if (q > limit) q = limit;
    if (q < -limit) q = -limit;
    return static_cast<Symbol>(q);
}

inline std::vector<Symbol> quantize(std::span<const float> z, const QuantizerState& state) {
    std::vector<Symbol> out;
    out.reserve(z.size());
    for (float v : z) {
        out.push_back(quantize_value(v, state));
    }
    return out;
}

inline double dequantize_value(Symbol q, const QuantizerState& state) {
    const int limit = max_symbol(state.bits);
    if (q > limit || q < -limit) {
        throw SymbolOutOfRange("symbol " + std::to_string(int{q}) + " outside +/-" +
                               std::to_string(limit));
    }
    return static_cast<double>(q) * q_scale(state);
}

inline std::vector<float> dequantize(std::span<const Symbol> q, const QuantizerState& state) {
    std::vector<float> out;
    out.reserve(q.size());
    for (Symbol s : q) {
        out.push_back(static_cast<float>(dequantize_value(s, state)));
    }
    return out;
}

// Momentum update of the running range; returns a new state.
inline QuantizerState update_range(const QuantizerState& state, std::span<const float> batch) {
    if (batch.empty()) {
        throw EmptyBatch("update_range needs at least one sample");
    }
    double batch_max = 0.0;
    for (float v : batch) {
        batch_max = std::max(batch_max, std::abs(static_cast<double>(v)));
    }
    QuantizerState next = state;
    next.range_max = state.momentum * state.range_max + (1.0 - state.momentum) * batch_max;
    return next;
}

}  // namespace oasis
