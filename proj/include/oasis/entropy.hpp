#pragma once

// Histogram-based distribution estimation, empirical entropy, the hinged
// entropy loss, MSE, and the joint loss forward value.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>

#include "oasis/errors.hpp"
#include "oasis/quantizer.hpp"

namespace oasis {

struct SymbolHistogram {
    std::map<Symbol, std::uint64_t> counts;
    std::uint64_t total = 0;

    void add(Symbol sym, std::uint64_t n = 1) {
        counts[sym] += n;
        total += n;
    }

    // Pointwise count addition; associative, so shards can merge in any order.
    void merge(const SymbolHistogram& other) {
        for (auto [sym, n] : other.counts) {
            counts[sym] += n;
        }
        total += other.total;
    }
};

inline SymbolHistogram histogram(std::span<const Symbol> symbols) {
    if (symbols.empty()) {
        throw EmptyInput("histogram of an empty symbol stream");
    }
    SymbolHistogram h;
    for (Symbol s : symbols) {
        h.add(s);
    }
    return h;
}

// Shannon entropy in bits/symbol. Zero-count bins contribute nothing.
inline double empirical_entropy(const SymbolHistogram& h) {
    if (h.total == 0) return 0.0;
    double entropy = 0.0;
    const double total = static_cast<double>(h.total);
    for (auto [sym, n] : h.counts) {
        if (n == 0) continue;
        const double p = static_cast<double>(n) / total;
        entropy -= p * std::log2(p);
    }
    return entropy < 0.0 ? 0.0 : entropy;
}

// Hinged rate penalty: entropy above h_ref, zero below.
inline double entropy_loss(const SymbolHistogram& h, double h_ref) {
    if (h_ref < 0.0) {
        throw ValidationError("h_ref must be >= 0");
    }
    return std::max(empirical_entropy(h) - h_ref, 0.0);
}

inline double mse(std::span<const float> x, std::span<const float> x_hat) {
    if (x.size() != x_hat.size()) {
        throw ShapeMismatch("mse operands differ in size: " + std::to_string(x.size()) + " vs " +
                            std::to_string(x_hat.size()));
    }
    if (x.empty()) {
        throw EmptyInput("mse of empty tensors");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(x[i]) - static_cast<double>(x_hat[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(x.size());
}

struct LossWeights {
    double beta = 2.0;
    double gamma = 2.0;
    double h_ref = 0.7;
};

inline LossWeights make_loss_weights(double beta, double gamma, double h_ref) {
    if (beta < 0.0 || gamma < 0.0 || h_ref < 0.0) {
        throw ValidationError("loss weights must all be >= 0");
    }
    return LossWeights{beta, gamma, h_ref};
}

// Forward value of the combined objective: mse + beta*entropy + gamma*task.
inline double joint_loss(double mse_val, double ent_loss, double task_loss,
                         const LossWeights& w) {
    if (!std::isfinite(mse_val) || !std::isfinite(ent_loss) || !std::isfinite(task_loss)) {
        throw NonFiniteInput("joint_loss components must be finite");
    }
    return mse_val + w.beta * ent_loss + w.gamma * task_loss;
}

}  // namespace oasis
