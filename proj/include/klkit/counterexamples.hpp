// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "klkit/grid.hpp"
#include "klkit/spectrum.hpp"

namespace klkit {

enum class TentRegime { failing, passing };

/// Family of piecewise-linear "tent" bumps on (0, 1].
///
/// Tent n sits on the support [c_n, c_n + h_n] with c_n = 2^-n and
/// h_n = 4^-(n+1), rising linearly to peak p_n = sqrt(3 / h_n) at the
/// midpoint, which makes each tent exactly unit-norm in L2
/// (integral of t^2 = p^2 h / 3 = 1). Supports are pairwise disjoint
/// (4^-(n+1) < 2^-(n+1)), so orthonormality is exact, not numerical.
///
/// The regimes differ only in the coefficients:
///   failing: lambda_n = h_n, so lambda_n p_n^2 = 3 for every n — the
///            weighted peaks do not decay and equicontinuity fails;
///   passing: lambda_n = 8^-n, so lambda_n p_n^2 = 12 * 2^-n — geometric
///            decay, summable tail 12 * 2^-N after N terms.
///
/// Start index: failing families begin at n = 2, passing families at n = 1
/// (the passing tail formula above counts terms 1..N).
struct TentFamily {
    TentRegime regime;
    int first_index = 1;
    std::vector<double> centers;       // support left endpoints c_n
    std::vector<double> widths;        // h_n
    std::vector<double> peaks;         // p_n
    std::vector<double> coefficients;  // lambda_n

    std::size_t size() const { return centers.size(); }
    double apex(std::size_t j) const { return centers[j] + 0.5 * widths[j]; }
    double support_end(std::size_t j) const { return centers[j] + widths[j]; }

    double evaluate(std::size_t j, double x) const {
        const double half = 0.5 * widths[j];
        const double d = std::abs(x - apex(j));
        if (d >= half) return 0.0;
        return peaks[j] * (1.0 - d / half);
    }
};

inline TentFamily make_tent_family(TentRegime regime, std::size_t n_terms) {
    if (n_terms < 1) throw std::invalid_argument("tent family: requires n_terms >= 1");
    TentFamily fam;
    fam.regime = regime;
    fam.first_index = (regime == TentRegime::failing) ? 2 : 1;
    for (std::size_t t = 0; t < n_terms; ++t) {
        const int n = fam.first_index + static_cast<int>(t);
        const double c = std::ldexp(1.0, -n);         // 2^-n
        const double h = std::ldexp(1.0, -2 * n - 2); // 4^-(n+1)
        fam.centers.push_back(c);
        fam.widths.push_back(h);
        fam.peaks.push_back(std::sqrt(3.0 / h));
        fam.coefficients.push_back(regime == TentRegime::failing ? h : std::ldexp(1.0, -3 * n));
    }
    return fam;
}

/// k-th eigenvalue of the min-kernel integral operator on [0, 1]:
/// lambda_k = ((k - 1/2) pi)^-2, 1-based.
inline double brownian_eigenvalue(std::size_t k) {
    const double a = (static_cast<double>(k) - 0.5) * std::numbers::pi;
    return 1.0 / (a * a);
}

/// Rebuild the analytic side of a family spectrum (evaluators, sup f^2,
/// feature points, tail bound, source) from its family tag. Grid and sampled
/// values are left untouched, so this also restores a spectrum loaded from
/// JSON to full analytic strength.
inline void attach_family_analytics(Spectrum& s, const AnalyticFamily& fam) {
    s.analytic.clear();
    s.sup_f_squared.clear();
    s.features.clear();
    s.family = fam;

    if (fam.kind == AnalyticFamily::Kind::brownian_sine) {
        s.source = SpectrumSource::analytic;
        const double sqrt2 = std::numbers::sqrt2;
        double lambda_sum = 0.0;
        for (std::size_t k = 1; k <= fam.n_terms; ++k) {
            const double freq = (static_cast<double>(k) - 0.5) * std::numbers::pi;
            lambda_sum += brownian_eigenvalue(k);
            s.analytic.push_back([freq, sqrt2](double x) { return sqrt2 * std::sin(freq * x); });
            s.sup_f_squared.push_back(2.0);
        }
        // Trace identity: sum over all k of lambda_k = integral of x dx = 1/2,
        // so the tail of lambda_j sup f_j^2 = 2 lambda_j is 1 - 2 * partial sum.
        s.tail_bound = 1.0 - 2.0 * lambda_sum;
        return;
    }

    const TentRegime regime = (fam.kind == AnalyticFamily::Kind::tent_failing)
                                  ? TentRegime::failing
                                  : TentRegime::passing;
    const TentFamily tents = make_tent_family(regime, fam.n_terms);
    s.source = SpectrumSource::counterexample;
    for (std::size_t j = 0; j < tents.size(); ++j) {
        s.analytic.push_back([tents, j](double x) { return tents.evaluate(j, x); });
        s.sup_f_squared.push_back(tents.peaks[j] * tents.peaks[j]);
        s.features.push_back(tents.centers[j]);
        s.features.push_back(tents.apex(j));
        s.features.push_back(tents.support_end(j));
    }
    if (regime == TentRegime::passing) {
        // sum_{n > N} 12 * 2^-n = 12 * 2^-N with terms indexed 1..N.
        const int last = tents.first_index + static_cast<int>(fam.n_terms) - 1;
        s.tail_bound = 12.0 * std::ldexp(1.0, -last);
    } else {
        // lambda_n * sup f_n^2 = 3 per term, forever: no finite tail bound.
        s.tail_bound = std::nullopt;
    }
}

/// Grid construction knobs for tent-family spectra. rise_subdivisions is the
/// node count per linear rise; the trapezoid error of integral t^2 is
/// 1 / (2 k^2), so the default k = 1024 keeps the discrete orthonormality
/// defect below 5e-7.
struct FamilyGridOptions {
    std::size_t background_nodes = 257;
    std::size_t rise_subdivisions = 1024;
};

namespace detail {

inline Spectrum tent_spectrum(TentRegime regime, std::size_t n_terms,
                              const FamilyGridOptions& opt) {
    const TentFamily fam = make_tent_family(regime, n_terms);

    std::vector<double> extra;
    for (std::size_t j = 0; j < fam.size(); ++j) {
        const double step = 0.5 * fam.widths[j] / static_cast<double>(opt.rise_subdivisions);
        for (std::size_t i = 0; i <= 2 * opt.rise_subdivisions; ++i)
            extra.push_back(fam.centers[j] + static_cast<double>(i) * step);
    }
    const Grid grid = refine_with(uniform_grid(0.0, 1.0, opt.background_nodes), extra);

    Spectrum s{grid};
    for (std::size_t j = 0; j < fam.size(); ++j)
        s.pairs.push_back(EigenPair{fam.coefficients[j], {}});
    attach_family_analytics(s, AnalyticFamily{regime == TentRegime::failing
                                                  ? AnalyticFamily::Kind::tent_failing
                                                  : AnalyticFamily::Kind::tent_passing,
                                              n_terms});
    for (std::size_t j = 0; j < fam.size(); ++j) {
        s.pairs[j].values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            s.pairs[j].values[i] = s.analytic[j](grid.node(i));
    }
    return s;
}

} // namespace detail

/// Orthonormal tent family whose weighted peaks stay at 3: the partial sums
/// v_n are not equicontinuous and the synthesized kernel limit is
/// discontinuous at 0 (K(a_n, a_n) = 3 at apexes a_n -> 0 while K(0,0) = 0).
inline Spectrum failing_family(std::size_t n_terms, const FamilyGridOptions& opt = {}) {
    return detail::tent_spectrum(TentRegime::failing, n_terms, opt);
}

/// Same tent geometry with geometrically shrunk coefficients: equicontinuous
/// v_n, continuous limit kernel, finite tail bound 12 * 2^-N.
inline Spectrum passing_family(std::size_t n_terms, const FamilyGridOptions& opt = {}) {
    return detail::tent_spectrum(TentRegime::passing, n_terms, opt);
}

/// Closed-form eigenexpansion of K(x, y) = min(x, y) on [0, 1]:
/// f_k(x) = sqrt(2) sin((k - 1/2) pi x), lambda_k = ((k - 1/2) pi)^-2.
inline Spectrum analytic_brownian_spectrum(std::size_t n_terms, std::size_t grid_nodes = 513) {
    if (n_terms < 1)
        throw std::invalid_argument("analytic_brownian_spectrum: requires n_terms >= 1");
    Spectrum s{uniform_grid(0.0, 1.0, grid_nodes)};
    for (std::size_t k = 1; k <= n_terms; ++k)
        s.pairs.push_back(EigenPair{brownian_eigenvalue(k), {}});
    attach_family_analytics(s, AnalyticFamily{AnalyticFamily::Kind::brownian_sine, n_terms});
    for (std::size_t j = 0; j < n_terms; ++j) {
        s.pairs[j].values.resize(s.grid.size());
        for (std::size_t i = 0; i < s.grid.size(); ++i)
            s.pairs[j].values[i] = s.analytic[j](s.grid.node(i));
    }
    return s;
}

} // namespace klkit
