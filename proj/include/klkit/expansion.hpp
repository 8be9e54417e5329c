// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "klkit/grid.hpp"
#include "klkit/matrix.hpp"
#include "klkit/spectrum.hpp"

namespace klkit {

namespace detail {

/// Single expansion term, in the one fixed association used everywhere:
/// (lambda * f(x)) * f(y). Partial kernels and v_n share it, summed in
/// ascending j, so the kernel diagonal equals v_n bitwise.
inline double expansion_term(double lambda, double fx, double fy) {
    return (lambda * fx) * fy;
}

} // namespace detail

/// Partial-sum kernel K_n(x_i, x_j) = sum_{j <= n} lambda_j f_j(x_i) f_j(x_j)
/// materialized over a node set.
struct PartialKernel {
    Grid grid;
    std::size_t n_terms = 0;
    Matrix values;
};

/// All partial diagonals v_1 .. v_N at the grid nodes,
/// v_n = sum_{j <= n} lambda_j f_j^2.
struct VnSequence {
    Grid grid;
    std::vector<std::vector<double>> rows;  // rows[n-1][i] = v_n(x_i)

    const std::vector<double>& row(std::size_t n) const { return rows.at(n - 1); }
};

inline PartialKernel partial_kernel(const Spectrum& s, std::size_t n) {
    s.check_term_count(n);
    const std::size_t m = s.grid.size();
    PartialKernel out{s.grid, n, Matrix(m, m)};
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t)
                acc += detail::expansion_term(s.pairs[t].lambda, s.pairs[t].values[i],
                                              s.pairs[t].values[j]);
            out.values(i, j) = acc;
            out.values(j, i) = acc;
        }
    }
    return out;
}

/// Evaluation-grid overload for analytic spectra; counterexample diagnostics
/// need node sets finer than the stored grid.
inline PartialKernel partial_kernel(const Spectrum& s, std::size_t n, const Grid& eval) {
    if (eval == s.grid) return partial_kernel(s, n);
    return partial_kernel(resample(s, eval), n);
}

inline VnSequence vn_sequence(const Spectrum& s, std::size_t N) {
    s.check_term_count(N);
    const std::size_t m = s.grid.size();
    VnSequence out{s.grid, {}};
    out.rows.reserve(N);
    std::vector<double> acc(m, 0.0);
    for (std::size_t t = 0; t < N; ++t) {
        const auto& f = s.pairs[t].values;
        const double lambda = s.pairs[t].lambda;
        for (std::size_t i = 0; i < m; ++i)
            acc[i] += detail::expansion_term(lambda, f[i], f[i]);
        out.rows.push_back(acc);
    }
    return out;
}

inline VnSequence vn_sequence(const Spectrum& s, std::size_t N, const Grid& eval) {
    if (eval == s.grid) return vn_sequence(s, N);
    return vn_sequence(resample(s, eval), N);
}

/// L1 gap identity: integral |v_n - v_m| equals the coefficient sum over the
/// index gap, because the f_j are orthonormal and the integrand is a sum of
/// non-negative terms.
struct L1Gap {
    double quadrature = 0.0;       // trapezoid value of integral |v_n - v_m|
    double coefficient_sum = 0.0;  // sum of lambda_j over the gap, exact
};

inline L1Gap l1_gap(const Spectrum& s, std::size_t n, std::size_t m) {
    s.check_term_count(std::max(n, m));
    const std::size_t lo = std::min(n, m), hi = std::max(n, m);
    const std::size_t nodes = s.grid.size();
    std::vector<double> gap(nodes, 0.0);
    for (std::size_t t = lo; t < hi; ++t) {
        const auto& f = s.pairs[t].values;
        for (std::size_t i = 0; i < nodes; ++i)
            gap[i] += detail::expansion_term(s.pairs[t].lambda, f[i], f[i]);
    }
    for (double& g : gap) g = std::abs(g);
    return {integrate(s.grid, gap), s.lambda_sum(lo, hi)};
}

inline L1Gap l1_gap(const Spectrum& s, std::size_t n, std::size_t m, const Grid& eval) {
    if (eval == s.grid) return l1_gap(s, n, m);
    return l1_gap(resample(s, eval), n, m);
}

/// Uniform-Cauchy gap bound: the sup over node pairs of |K_n - K_m| is
/// dominated by ||v_n - v_m||_inf (Cauchy-Schwarz, term by term).
struct SupGap {
    double kernel_gap = 0.0;  // sup over node pairs of |K_n - K_m|
    double vn_gap = 0.0;      // max over nodes of v_n - v_m
};

inline SupGap sup_gap(const Spectrum& s, std::size_t n, std::size_t m) {
    s.check_term_count(std::max(n, m));
    const std::size_t lo = std::min(n, m), hi = std::max(n, m);
    const std::size_t nodes = s.grid.size();
    SupGap out;
    if (lo == hi) return out;
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = i; j < nodes; ++j) {
            double acc = 0.0;
            for (std::size_t t = lo; t < hi; ++t)
                acc += detail::expansion_term(s.pairs[t].lambda, s.pairs[t].values[i],
                                              s.pairs[t].values[j]);
            out.kernel_gap = std::max(out.kernel_gap, std::abs(acc));
            if (j == i) out.vn_gap = std::max(out.vn_gap, acc);
        }
    }
    return out;
}

inline SupGap sup_gap(const Spectrum& s, std::size_t n, std::size_t m, const Grid& eval) {
    if (eval == s.grid) return sup_gap(s, n, m);
    return sup_gap(resample(s, eval), n, m);
}

} // namespace klkit
