// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "klkit/counterexamples.hpp"
#include "klkit/expansion.hpp"

using namespace klkit;

TEST_CASE("tent family geometry") {
    for (TentRegime regime : {TentRegime::failing, TentRegime::passing}) {
        const TentFamily fam = make_tent_family(regime, 8);
        CHECK(fam.first_index == (regime == TentRegime::failing ? 2 : 1));
        for (std::size_t j = 0; j < fam.size(); ++j) {
            const int n = fam.first_index + static_cast<int>(j);
            CHECK(fam.centers[j] == std::ldexp(1.0, -n));
            CHECK(fam.widths[j] == std::ldexp(1.0, -2 * n - 2));
            // unit L2 norm in closed form: peak^2 h / 3 = 1
            CHECK(fam.peaks[j] * fam.peaks[j] * fam.widths[j] / 3.0 ==
                  Catch::Approx(1.0).epsilon(1e-14));
            CHECK(fam.support_end(j) > fam.centers[j]);
            CHECK(fam.support_end(j) <= 1.0);
            if (j > 0) CHECK(fam.support_end(j) < fam.centers[j - 1]);  // disjoint
        }
    }
}

TEST_CASE("failing family has constant weighted peaks of 3") {
    const TentFamily fam = make_tent_family(TentRegime::failing, 10);
    for (std::size_t j = 0; j < fam.size(); ++j) {
        const double peak_contribution =
            fam.coefficients[j] * fam.evaluate(j, fam.apex(j)) * fam.evaluate(j, fam.apex(j));
        CHECK(peak_contribution == Catch::Approx(3.0).epsilon(1e-14));
    }
}

TEST_CASE("passing family peaks decay geometrically") {
    const TentFamily fam = make_tent_family(TentRegime::passing, 10);
    for (std::size_t j = 0; j < fam.size(); ++j) {
        const int n = fam.first_index + static_cast<int>(j);
        const double peak_contribution =
            fam.coefficients[j] * fam.peaks[j] * fam.peaks[j];
        CHECK(peak_contribution == Catch::Approx(12.0 * std::ldexp(1.0, -n)).epsilon(1e-14));
    }
}

TEST_CASE("failing family spectrum: v at apexes and at the origin") {
    const FamilyGridOptions light{129, 128};
    const Spectrum s = failing_family(6, light);
    CHECK(s.source == SpectrumSource::counterexample);
    REQUIRE(s.has_analytic());
    REQUIRE(s.size() == 6);
    CHECK_FALSE(s.tail_bound.has_value());

    const TentFamily fam = make_tent_family(TentRegime::failing, 6);
    const VnSequence v = vn_sequence(s, 6);
    for (std::size_t j = 0; j < 6; ++j) {
        // v_N at the apex of tent j equals its single-term contribution:
        // every other tent vanishes there (disjoint supports).
        double vn_at_apex = 0.0;
        for (std::size_t t = 0; t < 6; ++t) {
            const double f = s.analytic[t](fam.apex(j));
            vn_at_apex += (s.pairs[t].lambda * f) * f;
        }
        CHECK(vn_at_apex == Catch::Approx(3.0).margin(1e-12));
    }
    // x = 0 is outside every support, exactly
    CHECK(s.grid.node(0) == 0.0);
    for (const auto& row : v.rows) CHECK(row[0] == 0.0);
}

TEST_CASE("tent spectra are orthonormal: exactly in closed form, 5e-7 by quadrature") {
    const Spectrum s = failing_family(5);
    // quadrature orthonormality on the stored grid
    CHECK(orthonormality_defect(s) <= 5e-7);

    // cross terms are exactly zero on the grid (no shared support nodes)
    const auto& w = s.grid.weights();
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < w.size(); ++k)
                dot += w[k] * s.pairs[i].values[k] * s.pairs[j].values[k];
            CHECK(dot == 0.0);
        }

    const Spectrum p = passing_family(5);
    CHECK(orthonormality_defect(p) <= 5e-7);
}

TEST_CASE("passing family tail bound is the geometric remainder") {
    const Spectrum s10 = passing_family(10, FamilyGridOptions{65, 64});
    REQUIRE(s10.tail_bound.has_value());
    CHECK(*s10.tail_bound == 12.0 * std::ldexp(1.0, -10));  // ~0.01171875

    const Spectrum s12 = passing_family(12, FamilyGridOptions{65, 64});
    CHECK(*s12.tail_bound == 12.0 * std::ldexp(1.0, -12));

    // truncating at n inside the family extends the tail consistently
    const auto t8 = s12.truncation_tail(8);
    REQUIRE(t8.has_value());
    CHECK(*t8 == Catch::Approx(12.0 * std::ldexp(1.0, -8)).epsilon(1e-14));
}

TEST_CASE("passing family is continuous at the origin") {
    const Spectrum s = passing_family(12, FamilyGridOptions{257, 64});
    const VnSequence v = vn_sequence(s, 12);
    const auto& last = v.rows.back();
    CHECK(last[0] == 0.0);
    for (int m = 3; m <= 6; ++m) {
        const double cutoff = std::ldexp(1.0, -m);
        double sup = 0.0;
        for (std::size_t i = 0; i < s.grid.size() && s.grid.node(i) <= cutoff; ++i)
            sup = std::max(sup, last[i]);
        CHECK(sup <= 12.0 * cutoff + 1e-15);
    }
}

TEST_CASE("analytic brownian spectrum") {
    const Spectrum s = analytic_brownian_spectrum(20);
    CHECK(s.source == SpectrumSource::analytic);
    CHECK(s.grid.size() == 513);
    CHECK(s.pairs[0].lambda == Catch::Approx(4.0 / (M_PI * M_PI)).epsilon(1e-14));
    CHECK(orthonormality_defect(s) <= 1e-10);
    REQUIRE(s.tail_bound.has_value());
    CHECK(*s.tail_bound > 0.0);

    // trace identity: partial eigenvalue sums approach 1/2
    double sum = 0.0;
    for (std::size_t k = 1; k <= 2000; ++k) sum += brownian_eigenvalue(k);
    CHECK(0.5 - sum > 0.0);
    CHECK(0.5 - sum <= 1e-4);

    // residual of the tail bound bookkeeping: tail = 1 - 2 sum(lambda)
    double lam20 = 0.0;
    for (std::size_t k = 1; k <= 20; ++k) lam20 += brownian_eigenvalue(k);
    CHECK(*s.tail_bound == Catch::Approx(1.0 - 2.0 * lam20).margin(1e-15));
}

TEST_CASE("family constructors validate term counts") {
    CHECK_THROWS_AS(failing_family(0), std::invalid_argument);
    CHECK_THROWS_AS(analytic_brownian_spectrum(0), std::invalid_argument);
}
