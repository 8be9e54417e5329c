// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "klkit/grid.hpp"

namespace klkit {

enum class SpectrumSource { nystrom, analytic, counterexample };

inline std::string to_string(SpectrumSource s) {
    switch (s) {
        case SpectrumSource::nystrom: return "nystrom";
        case SpectrumSource::analytic: return "analytic";
        case SpectrumSource::counterexample: return "counterexample";
    }
    return "nystrom";
}

inline SpectrumSource spectrum_source_from_string(const std::string& s) {
    if (s == "nystrom") return SpectrumSource::nystrom;
    if (s == "analytic") return SpectrumSource::analytic;
    if (s == "counterexample") return SpectrumSource::counterexample;
    throw std::invalid_argument("unknown spectrum source: " + s);
}

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> values;  // f sampled at the grid nodes
};

/// Identifies an exactly reconstructible spectrum family, so evaluators can
/// be rebuilt after a JSON round trip.
struct AnalyticFamily {
    enum class Kind { tent_failing, tent_passing, brownian_sine };
    Kind kind;
    std::size_t n_terms = 0;
};

/// Ordered sequence of (lambda_n, f_n) pairs over a quadrature grid.
///
/// Invariants: lambdas strictly positive and non-increasing; sampled values
/// discretely orthonormal in the grid's weighted inner product (within 1e-6).
/// Analytic families additionally carry pointwise evaluators, per-term sups
/// of f^2, feature points diagnostics should resolve, and a tail bound
/// sum_{j > size} lambda_j * sup f_j^2 when it is finite.
struct Spectrum {
    Grid grid;
    std::vector<EigenPair> pairs;
    SpectrumSource source = SpectrumSource::nystrom;

    std::vector<std::function<double(double)>> analytic;  // empty if unavailable
    std::vector<double> sup_f_squared;                    // empty if unavailable
    std::vector<double> features;                         // empty if none
    std::optional<double> tail_bound;
    std::optional<AnalyticFamily> family;

    std::size_t size() const { return pairs.size(); }
    bool has_analytic() const { return analytic.size() == pairs.size() && !pairs.empty(); }
    double lambda(std::size_t j) const { return pairs[j].lambda; }

    /// lambda_{n+1} + ... + lambda_m coefficient sum over a 1-based count gap.
    double lambda_sum(std::size_t from_count, std::size_t to_count) const {
        double s = 0.0;
        for (std::size_t j = from_count; j < to_count; ++j) s += pairs[j].lambda;
        return s;
    }

    void check_term_count(std::size_t n) const {
        if (n < 1 || n > pairs.size())
            throw std::invalid_argument("term count out of range for spectrum");
    }

    /// Tail bound for a truncation at the leading n terms:
    /// sum_{j>n, j<=size} lambda_j sup f_j^2 plus the stored beyond-spectrum
    /// tail. Empty when per-term sups are unknown (grid samples cannot bound
    /// sup f^2 from above).
    std::optional<double> truncation_tail(std::size_t n) const {
        if (n > pairs.size()) return std::nullopt;
        if (n == pairs.size()) return tail_bound;
        if (sup_f_squared.size() != pairs.size()) return std::nullopt;
        if (!tail_bound) return std::nullopt;
        double s = *tail_bound;
        for (std::size_t j = n; j < pairs.size(); ++j) s += pairs[j].lambda * sup_f_squared[j];
        return s;
    }
};

/// Evaluate every analytic eigenfunction on a new grid. Requires evaluators.
inline Spectrum resample(const Spectrum& s, const Grid& g) {
    if (!s.has_analytic())
        throw std::invalid_argument("resample: spectrum has no analytic evaluators");
    Spectrum out = s;
    out.grid = g;
    for (std::size_t j = 0; j < s.pairs.size(); ++j) {
        out.pairs[j].values.assign(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            out.pairs[j].values[i] = s.analytic[j](g.node(i));
    }
    return out;
}

/// max_{i,j} |sum_k w_k f_i(x_k) f_j(x_k) - delta_ij| over all housed pairs.
inline double orthonormality_defect(const Spectrum& s) {
    double worst = 0.0;
    const auto& w = s.grid.weights();
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i; j < s.size(); ++j) {
            double dot = 0.0;
            const auto& fi = s.pairs[i].values;
            const auto& fj = s.pairs[j].values;
            for (std::size_t k = 0; k < w.size(); ++k) dot += w[k] * fi[k] * fj[k];
            worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

} // namespace klkit
