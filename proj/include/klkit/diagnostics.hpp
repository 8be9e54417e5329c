// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "klkit/expansion.hpp"
#include "klkit/grid.hpp"
#include "klkit/kernels.hpp"
#include "klkit/spectrum.hpp"

namespace klkit {

enum class Verdict { pass, fail, inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

/// Node pair attaining a failing modulus. n is the 1-based truncation level.
struct Witness {
    double x = 0.0;
    double y = 0.0;
    std::size_t n = 0;
    double value = 0.0;
    double delta = 0.0;
};

/// Equicontinuity moduli of the partial diagonals v_1..v_N over a dyadic
/// delta ladder, with the three-valued verdict.
///
/// The criterion quantifies over all n and all delta; a finite computation
/// cannot decide it, so the verdict is an explicit finite-scale surrogate,
/// evaluated at the deepest ladder row that contains node pairs (rows finer
/// than the grid resolution measure nothing and must not decide anything):
///   FAIL  if the envelope there >= fail_threshold and the witness survives
///         one midpoint refinement of the evaluation grid;
///   PASS  if the envelope there + tail_bound <= pass_threshold;
///   INCONCLUSIVE otherwise (always, when no row is measurable).
/// Default thresholds: pass = 1e-3 * max v_N, fail = 10x pass. Reports
/// without a tail bound (no analytic sup f^2) can never output PASS.
struct ModulusReport {
    std::vector<double> deltas;                // decreasing, (b-a)/2^k
    std::vector<std::vector<double>> moduli;   // [n-1][k] = omega_n(delta_k)
    std::vector<double> envelope;              // [k] = max_n omega_n(delta_k)
    std::vector<std::size_t> pair_counts;      // node pairs within delta_k
    std::optional<double> tail_bound;
    double scale = 0.0;                        // max v_N on the evaluation grid
    double pass_threshold = 0.0;
    double fail_threshold = 0.0;
    double verdict_delta = 0.0;                // ladder delta the verdict used
    Verdict verdict = Verdict::inconclusive;
    std::optional<Witness> witness;
};

struct DiagnosticsOptions {
    std::optional<double> pass_threshold;  // absolute override
    std::optional<double> fail_threshold;  // absolute override
    std::size_t prerefine = 0;  // midpoint refinements applied before measuring
};

namespace detail {

struct ModulusResult {
    double value = 0.0;
    std::size_t i = 0;  // argmax pair
    std::size_t j = 0;
};

/// Largest |v(x_i) - v(x_j)| over node pairs with |x_i - x_j| <= delta,
/// via max/min monotonic deques over the sliding window [x_i, x_i + delta].
/// Exact: every within-delta pair lies in the window anchored at its left
/// node, and every window max/min pair is within delta of each other.
inline ModulusResult sliding_modulus(std::span<const double> nodes,
                                     std::span<const double> values, double delta) {
    ModulusResult best;
    std::deque<std::size_t> maxq, minq;
    std::size_t right = 0;
    for (std::size_t left = 0; left < nodes.size(); ++left) {
        while (right < nodes.size() && nodes[right] - nodes[left] <= delta) {
            while (!maxq.empty() && values[maxq.back()] <= values[right]) maxq.pop_back();
            maxq.push_back(right);
            while (!minq.empty() && values[minq.back()] >= values[right]) minq.pop_back();
            minq.push_back(right);
            ++right;
        }
        while (!maxq.empty() && maxq.front() < left) maxq.pop_front();
        while (!minq.empty() && minq.front() < left) minq.pop_front();
        if (!maxq.empty()) {
            const double inc = values[maxq.front()] - values[minq.front()];
            if (inc > best.value) {
                best.value = inc;
                best.i = minq.front();
                best.j = maxq.front();
            }
        }
    }
    return best;
}

inline std::size_t pairs_within(std::span<const double> nodes, double delta) {
    std::size_t count = 0, j = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (j < i + 1) j = i + 1;
        while (j < nodes.size() && nodes[j] - nodes[i] <= delta) ++j;
        count += j - i - 1;
    }
    return count;
}

/// Evaluation grid for moduli: the spectrum grid refined with feature points
/// and, per ladder delta, probe offsets feature +- delta. The offsets give
/// every ladder row real node pairs at its own scale next to each feature,
/// so deep rows measure the true local moduli instead of being vacuous.
inline Grid diagnostics_grid(const Spectrum& s, std::span<const double> deltas) {
    if (!s.has_analytic() || s.features.empty()) return s.grid;
    std::vector<double> extra;
    for (double f : s.features) {
        extra.push_back(f);
        for (double d : deltas) {
            if (f - d >= s.grid.a()) extra.push_back(f - d);
            if (f + d <= s.grid.b()) extra.push_back(f + d);
        }
    }
    return refine_with(s.grid, extra);
}

struct EnvelopeAtDelta {
    double value = 0.0;
    Witness witness;
};

/// Envelope over n = 1..N of the measured modulus at a single delta.
inline EnvelopeAtDelta envelope_at(const Spectrum& s, std::size_t N, const Grid& g,
                                   double delta) {
    Spectrum eval = (g == s.grid) ? s : resample(s, g);
    const std::size_t nodes = g.size();
    std::vector<double> acc(nodes, 0.0);
    EnvelopeAtDelta out;
    for (std::size_t t = 0; t < N; ++t) {
        const auto& f = eval.pairs[t].values;
        for (std::size_t i = 0; i < nodes; ++i)
            acc[i] += expansion_term(eval.pairs[t].lambda, f[i], f[i]);
        const ModulusResult r = sliding_modulus(g.nodes(), acc, delta);
        if (r.value > out.value) {
            out.value = r.value;
            out.witness = {g.node(r.i), g.node(r.j), t + 1, r.value, delta};
        }
    }
    return out;
}

} // namespace detail

/// Discrete modulus of continuity: max over node pairs within delta of the
/// sampled-function increment.
inline double modulus(const Grid& g, std::span<const double> values, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("modulus: requires delta > 0");
    if (values.size() != g.size())
        throw std::invalid_argument("modulus: values length must match node count");
    return detail::sliding_modulus(g.nodes(), values, delta).value;
}

inline ModulusReport equicontinuity_report(const Spectrum& s, std::size_t N,
                                           std::size_t ladder_depth,
                                           const DiagnosticsOptions& opt = {}) {
    s.check_term_count(N);
    if (ladder_depth < 2)
        throw std::invalid_argument("equicontinuity_report: requires ladder_depth >= 2");

    ModulusReport rep;
    rep.deltas.resize(ladder_depth);
    for (std::size_t k = 0; k < ladder_depth; ++k)
        rep.deltas[k] = s.grid.length() / std::ldexp(1.0, static_cast<int>(k) + 1);

    Grid g = detail::diagnostics_grid(s, rep.deltas);
    for (std::size_t r = 0; r < opt.prerefine && s.has_analytic(); ++r) g = midpoint_refine(g);
    const Spectrum eval = (g == s.grid) ? s : resample(s, g);

    const std::size_t nodes = g.size();
    rep.moduli.assign(N, std::vector<double>(ladder_depth, 0.0));
    rep.envelope.assign(ladder_depth, 0.0);
    rep.pair_counts.resize(ladder_depth);
    for (std::size_t k = 0; k < ladder_depth; ++k)
        rep.pair_counts[k] = detail::pairs_within(g.nodes(), rep.deltas[k]);

    // Deepest row that has anything to measure (counts shrink with delta).
    std::optional<std::size_t> kstar;
    for (std::size_t k = 0; k < ladder_depth; ++k)
        if (rep.pair_counts[k] > 0) kstar = k;

    std::vector<double> acc(nodes, 0.0);
    std::vector<detail::ModulusResult> best_at_kstar(N);
    for (std::size_t t = 0; t < N; ++t) {
        const auto& f = eval.pairs[t].values;
        const double lambda = eval.pairs[t].lambda;
        for (std::size_t i = 0; i < nodes; ++i)
            acc[i] += detail::expansion_term(lambda, f[i], f[i]);
        for (std::size_t k = 0; k < ladder_depth; ++k) {
            const auto r = detail::sliding_modulus(g.nodes(), acc, rep.deltas[k]);
            rep.moduli[t][k] = r.value;
            if (kstar && k == *kstar) best_at_kstar[t] = r;
        }
    }
    for (std::size_t k = 0; k < ladder_depth; ++k)
        for (std::size_t t = 0; t < N; ++t)
            rep.envelope[k] = std::max(rep.envelope[k], rep.moduli[t][k]);

    rep.scale = *std::max_element(acc.begin(), acc.end());
    rep.tail_bound = s.truncation_tail(N);
    rep.pass_threshold = opt.pass_threshold.value_or(1e-3 * rep.scale);
    rep.fail_threshold = opt.fail_threshold.value_or(10.0 * rep.pass_threshold);

    if (!kstar) {
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    rep.verdict_delta = rep.deltas[*kstar];
    const double env = rep.envelope[*kstar];

    if (env >= rep.fail_threshold) {
        // Guard against grid artifacts: the witness must survive one
        // midpoint refinement of the evaluation grid.
        double refined_env = env;
        if (s.has_analytic())
            refined_env = detail::envelope_at(s, N, midpoint_refine(g), rep.verdict_delta).value;
        if (refined_env >= rep.fail_threshold) {
            rep.verdict = Verdict::fail;
            std::size_t t_best = 0;
            for (std::size_t t = 1; t < N; ++t)
                if (best_at_kstar[t].value > best_at_kstar[t_best].value) t_best = t;
            const auto& r = best_at_kstar[t_best];
            rep.witness = Witness{g.node(r.i), g.node(r.j), t_best + 1, r.value,
                                  rep.verdict_delta};
            return rep;
        }
    }
    if (rep.tail_bound && env + *rep.tail_bound <= rep.pass_threshold) {
        rep.verdict = Verdict::pass;
        return rep;
    }
    rep.verdict = Verdict::inconclusive;
    return rep;
}

/// Margin of the necessity bound
///   |v_n(x) - v_n(y)| <= 2 sqrt(||K||_inf) sqrt(K(x,x) - 2K(x,y) + K(y,y)):
/// min over all node pairs of RHS - LHS. Non-negative (within roundoff)
/// whenever the spectrum expands a continuous positive-definite kernel.
struct NecessityBound {
    double residual = 0.0;
    double sup_norm = 0.0;
    bool sup_norm_is_estimate = false;
};

inline NecessityBound necessity_bound_residual(const Spectrum& s, const KernelSpec& k,
                                               std::size_t n) {
    s.check_term_count(n);
    NecessityBound out;
    if (k.sup_norm) {
        out.sup_norm = *k.sup_norm;
    } else {
        out.sup_norm = estimate_sup_norm(k, s.grid);
        out.sup_norm_is_estimate = true;
    }
    const double two_sqrt_sup = 2.0 * std::sqrt(out.sup_norm);

    const std::size_t nodes = s.grid.size();
    std::vector<double> v(nodes, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& f = s.pairs[t].values;
        for (std::size_t i = 0; i < nodes; ++i)
            v[i] += detail::expansion_term(s.pairs[t].lambda, f[i], f[i]);
    }

    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = i; j < nodes; ++j) {
            const double sd = std::max(0.0, second_difference(k, s.grid.node(i), s.grid.node(j)));
            const double rhs = two_sqrt_sup * std::sqrt(sd);
            const double lhs = std::abs(v[i] - v[j]);
            min_margin = std::min(min_margin, rhs - lhs);
        }
    }
    out.residual = min_margin;
    return out;
}

/// Largest ladder delta certifying sup_n omega_n(delta) + tail <= epsilon,
/// or empty when no measured ladder delta (or no tail bound) certifies it.
inline std::optional<double> epsilon_delta_certificate(const ModulusReport& rep,
                                                       double epsilon) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("epsilon_delta_certificate: requires epsilon > 0");
    if (!rep.tail_bound) return std::nullopt;
    for (std::size_t k = 0; k < rep.deltas.size(); ++k) {
        if (rep.pair_counts[k] == 0) break;  // finer rows measure nothing
        if (rep.envelope[k] + *rep.tail_bound <= epsilon) return rep.deltas[k];
    }
    return std::nullopt;
}

} // namespace klkit
