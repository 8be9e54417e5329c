// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace klkit {

/// Quadrature grid on a compact interval [a, b].
///
/// Nodes are strictly increasing, contain both endpoints, and carry positive
/// composite-trapezoid weights summing to b - a. Immutable after
/// construction; all grid operations are pure.
class Grid {
public:
    Grid(double a, double b, std::vector<double> nodes, std::vector<double> weights)
        : a_(a), b_(b), nodes_(std::move(nodes)), weights_(std::move(weights)) {
        validate();
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double length() const { return b_ - a_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    bool operator==(const Grid& o) const = default;

private:
    void validate() const {
        if (!(a_ < b_)) throw std::invalid_argument("Grid: requires a < b");
        if (nodes_.size() < 2) throw std::invalid_argument("Grid: requires at least 2 nodes");
        if (nodes_.size() != weights_.size())
            throw std::invalid_argument("Grid: nodes/weights length mismatch");
        if (nodes_.front() != a_ || nodes_.back() != b_)
            throw std::invalid_argument("Grid: nodes must span [a, b] inclusive");
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (!(nodes_[i - 1] < nodes_[i]))
                throw std::invalid_argument("Grid: nodes must be strictly increasing");
        for (double w : weights_)
            if (!(w > 0.0)) throw std::invalid_argument("Grid: weights must be positive");
    }

    double a_ = 0.0;
    double b_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

namespace detail {

/// Trapezoid weights for an arbitrary strictly increasing node set:
/// w_i = (x_{i+1} - x_{i-1}) / 2 with one-sided halves at the ends.
inline std::vector<double> trapezoid_weights(const std::vector<double>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<double> w(n);
    w[0] = 0.5 * (nodes[1] - nodes[0]);
    w[n - 1] = 0.5 * (nodes[n - 1] - nodes[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (nodes[i + 1] - nodes[i - 1]);
    return w;
}

} // namespace detail

/// n equispaced nodes on [a, b] with composite-trapezoid weights
/// h * (1/2, 1, ..., 1, 1/2), h = (b - a) / (n - 1).
inline Grid uniform_grid(double a, double b, std::size_t n) {
    if (n < 2) throw std::invalid_argument("uniform_grid: requires n >= 2");
    if (!(a < b)) throw std::invalid_argument("uniform_grid: requires a < b");
    const double h = (b - a) / static_cast<double>(n - 1);
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = a + static_cast<double>(i) * h;
    nodes.front() = a;
    nodes.back() = b;
    std::vector<double> weights(n, h);
    weights.front() = 0.5 * h;
    weights.back() = 0.5 * h;
    return Grid(a, b, std::move(nodes), std::move(weights));
}

/// Merge extra points into the node set (deduplicated, sorted) and recompute
/// trapezoid weights from the merged spacing. Points closer than
/// 1e-14 * (b - a) to an existing node are treated as duplicates and dropped.
/// If nothing new is inserted the grid is returned unchanged, so refining
/// twice with the same point set is exactly idempotent.
inline Grid refine_with(const Grid& g, std::span<const double> extra) {
    const double tol = 1e-14 * g.length();
    for (double x : extra)
        if (!(x >= g.a() && x <= g.b()))
            throw std::invalid_argument("refine_with: point outside [a, b]");

    std::vector<double> add(extra.begin(), extra.end());
    std::sort(add.begin(), add.end());

    std::vector<double> merged = g.nodes();
    bool changed = false;
    for (double x : add) {
        auto it = std::lower_bound(merged.begin(), merged.end(), x);
        const bool near_next = it != merged.end() && std::abs(*it - x) < tol;
        const bool near_prev = it != merged.begin() && std::abs(*(it - 1) - x) < tol;
        if (near_next || near_prev) continue;
        merged.insert(it, x);
        changed = true;
    }
    if (!changed) return g;
    auto weights = detail::trapezoid_weights(merged);
    return Grid(g.a(), g.b(), std::move(merged), std::move(weights));
}

/// Insert the midpoint of every adjacent node pair. Used by diagnostics for
/// witness-persistence checks.
inline Grid midpoint_refine(const Grid& g) {
    const auto& x = g.nodes();
    std::vector<double> mids;
    mids.reserve(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) mids.push_back(0.5 * (x[i - 1] + x[i]));
    return refine_with(g, mids);
}

/// Quadrature sum over the grid's weights (compensated summation, so the
/// constant-integrand identity holds to ~1e-15 even on large merged grids).
inline double integrate(const Grid& g, std::span<const double> values) {
    if (values.size() != g.size())
        throw std::invalid_argument("integrate: values length must match node count");
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double term = g.weight(i) * values[i] - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

} // namespace klkit
