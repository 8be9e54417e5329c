// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "klkit/grid.hpp"
#include "klkit/kernels.hpp"
#include "klkit/matrix.hpp"
#include "klkit/spectrum.hpp"

namespace klkit {

/// Thrown when the Jacobi sweep budget runs out before the off-diagonal
/// norm target is met. Carries the residual off-diagonal norm.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double offdiag)
        : std::runtime_error(msg), offdiag_norm_(offdiag) {}
    double offdiag_norm() const { return offdiag_norm_; }

private:
    double offdiag_norm_;
};

struct EigenResult {
    std::vector<double> eigenvalues;  // non-increasing
    Matrix eigenvectors;              // matching columns, orthonormal
    std::size_t sweeps_used = 0;
    double offdiag_norm = 0.0;
};

namespace detail {

inline double offdiag_frobenius(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

} // namespace detail

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps row-cyclically, rotating away each off-diagonal entry, until the
/// off-diagonal Frobenius norm drops below tol * ||A||_F or the sweep budget
/// is exhausted (ConvergenceError). Eigenvalues are returned non-increasing
/// with matching eigenvector columns.
inline EigenResult jacobi_eigen(const Matrix& A, double tol = 1e-12,
                                std::size_t max_sweeps = 50) {
    if (A.rows() != A.cols()) throw std::invalid_argument("jacobi_eigen: matrix not square");
    if (!(tol > 0.0)) throw std::invalid_argument("jacobi_eigen: requires tol > 0");
    const std::size_t n = A.rows();

    // Symmetry within 1e-12, scaled by the magnitude of the entries.
    const double sym_tol = 1e-12 * std::max(1.0, A.max_abs());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(A(i, j) - A(j, i)) > sym_tol)
                throw std::invalid_argument("jacobi_eigen: matrix not symmetric");

    // Work on the symmetrized copy so roundoff asymmetry cannot drift.
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (A(i, j) + A(j, i));
    Matrix v = Matrix::identity(n);

    const double norm_f = a.frobenius_norm();
    const double target = tol * norm_f;

    std::size_t sweeps = 0;
    double off = detail::offdiag_frobenius(a);
    while (off > target && sweeps < max_sweeps) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = aip - s * (aiq + tau * aip);
                    a(i, q) = aiq + s * (aip - tau * aiq);
                    a(p, i) = a(i, p);
                    a(q, i) = a(i, q);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = vip - s * (viq + tau * vip);
                    v(i, q) = viq + s * (vip - tau * viq);
                }
            }
        }
        ++sweeps;
        off = detail::offdiag_frobenius(a);
    }
    if (off > target)
        throw ConvergenceError("jacobi_eigen: no convergence after sweep budget", off);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenResult r;
    r.eigenvalues.resize(n);
    r.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        r.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) r.eigenvectors(i, k) = v(i, order[k]);
    }
    r.sweeps_used = sweeps;
    r.offdiag_norm = off;
    return r;
}

/// Nystrom discretization of the kernel eigenproblem
/// lambda f(x) = integral K(x, y) f(y) dy over the grid.
///
/// Forms B = W^{1/2} G W^{1/2} (G the Gram matrix, W = diag(weights)), which
/// keeps the eigenproblem symmetric, eigendecomposes it, and maps the
/// orthonormal eigenvectors back to grid samples f(x_k) = u(x_k) / sqrt(w_k),
/// rescaled to unit discrete L2 norm. Pairs with lambda <= drop_tol are
/// discarded (default drop_tol: 1e-12 * lambda_max); at most n_terms are
/// kept. Sign is fixed so the first component with |f| > 1e-8 is positive.
inline Spectrum nystrom_decompose(const KernelSpec& k, const Grid& g, std::size_t n_terms,
                                  std::optional<double> drop_tol = std::nullopt) {
    if (n_terms < 1) throw std::invalid_argument("nystrom_decompose: requires n_terms >= 1");
    if (drop_tol && !(*drop_tol > 0.0))
        throw std::invalid_argument("nystrom_decompose: requires drop_tol > 0");

    const std::size_t n = g.size();
    std::vector<double> sw(n);
    for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(g.weight(i));

    Matrix b = gram_matrix(k, g);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) *= sw[i] * sw[j];

    const EigenResult eig = jacobi_eigen(b);

    const double lambda_max = eig.eigenvalues.empty() ? 0.0 : std::max(eig.eigenvalues[0], 0.0);
    const double cut = drop_tol ? *drop_tol : 1e-12 * lambda_max;

    Spectrum s{g, {}, SpectrumSource::nystrom, {}, {}, {}, std::nullopt, std::nullopt};
    for (std::size_t j = 0; j < n && s.pairs.size() < n_terms; ++j) {
        const double lambda = eig.eigenvalues[j];
        if (!(lambda > cut)) break;  // sorted non-increasing
        EigenPair pair;
        pair.lambda = lambda;
        pair.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) pair.values[i] = eig.eigenvectors(i, j) / sw[i];

        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            norm2 += g.weight(i) * pair.values[i] * pair.values[i];
        const double inv_norm = 1.0 / std::sqrt(norm2);
        for (double& x : pair.values) x *= inv_norm;

        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(pair.values[i]) > 1e-8) {
                if (pair.values[i] < 0.0)
                    for (double& x : pair.values) x = -x;
                break;
            }
        }
        s.pairs.push_back(std::move(pair));
    }
    if (s.pairs.empty())
        throw std::runtime_error("nystrom_decompose: no eigenvalue above drop tolerance");
    return s;
}

/// max_i |lambda_n f_n(x_i) - sum_k w_k K(x_i, x_k) f_n(x_k)|:
/// how well a housed pair satisfies the discretized eigen equation.
/// `term_index` is 0-based.
inline double eigen_residual(const Spectrum& s, const KernelSpec& k, std::size_t term_index) {
    if (term_index >= s.size())
        throw std::invalid_argument("eigen_residual: term index out of range");
    const Grid& g = s.grid;
    const auto& f = s.pairs[term_index].values;
    const double lambda = s.pairs[term_index].lambda;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double quad = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            quad += g.weight(j) * k.eval(g.node(i), g.node(j)) * f[j];
        worst = std::max(worst, std::abs(lambda * f[i] - quad));
    }
    return worst;
}

} // namespace klkit
