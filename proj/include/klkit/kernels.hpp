// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "klkit/grid.hpp"
#include "klkit/matrix.hpp"

namespace klkit {

/// Closed-form bivariate covariance kernel.
///
/// `eval` must be symmetric in its arguments. `sup_norm` is the exact
/// sup of |K| over D x D when known in closed form; leave it empty for
/// user-supplied kernels and use estimate_sup_norm, which reports flag it
/// as an estimate.
struct KernelSpec {
    std::string name;
    std::function<double(double, double)> eval;
    std::optional<double> sup_norm;
    bool continuous = true;
};

/// K(x, y) = min(x, y); the Brownian-motion covariance on [0, 1].
inline KernelSpec brownian() {
    return {"brownian", [](double x, double y) { return std::min(x, y); }, 1.0, true};
}

/// K(x, y) = exp(-|x - y| / ell).
inline KernelSpec exponential(double ell) {
    if (!(ell > 0.0)) throw std::invalid_argument("exponential: requires ell > 0");
    return {"exponential",
            [ell](double x, double y) { return std::exp(-std::abs(x - y) / ell); },
            1.0, true};
}

/// K(x, y) = exp(-(x - y)^2 / (2 ell^2)).
inline KernelSpec squared_exponential(double ell) {
    if (!(ell > 0.0)) throw std::invalid_argument("squared_exponential: requires ell > 0");
    const double inv2 = 1.0 / (2.0 * ell * ell);
    return {"squared-exponential",
            [inv2](double x, double y) { return std::exp(-(x - y) * (x - y) * inv2); },
            1.0, true};
}

/// K(x, y) = 1; rank-one projector kernel. Useful as an exactly solvable case.
inline KernelSpec constant_one() {
    return {"one", [](double, double) { return 1.0; }, 1.0, true};
}

/// M_ij = K(x_i, x_j), evaluated once per unordered pair so the result is
/// exactly symmetric.
inline Matrix gram_matrix(const KernelSpec& k, const Grid& g) {
    const std::size_t n = g.size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = k.eval(g.node(i), g.node(j));
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

/// K(x,x) - 2 K(x,y) + K(y,y): the variance of the increment between x and y.
/// Non-negative (up to roundoff) for positive-definite kernels.
inline double second_difference(const KernelSpec& k, double x, double y) {
    return k.eval(x, x) - 2.0 * k.eval(x, y) + k.eval(y, y);
}

/// max |K| over the grid's node pairs. A lower bound on the true sup norm;
/// callers must flag it as an estimate.
inline double estimate_sup_norm(const KernelSpec& k, const Grid& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i; j < g.size(); ++j)
            m = std::max(m, std::abs(k.eval(g.node(i), g.node(j))));
    return m;
}

} // namespace klkit
