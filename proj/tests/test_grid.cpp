// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "klkit/grid.hpp"

using namespace klkit;

TEST_CASE("uniform grid produces trapezoid nodes and weights") {
    const Grid g = uniform_grid(0.0, 1.0, 3);
    CHECK(g.nodes() == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(g.weights() == std::vector<double>{0.25, 0.5, 0.25});

    const Grid g2 = uniform_grid(0.0, 1.0, 2);
    CHECK(g2.nodes() == std::vector<double>{0.0, 1.0});
    CHECK(g2.weights() == std::vector<double>{0.5, 0.5});

    const Grid g5 = uniform_grid(-1.0, 1.0, 5);
    double sum = 0.0;
    for (double w : g5.weights()) sum += w;
    CHECK(sum == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("uniform grid rejects bad input") {
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(uniform_grid(2.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("refine_with merges, dedups and recomputes weights") {
    const Grid base = uniform_grid(0.0, 1.0, 2);
    const double mid[] = {0.5};
    const Grid refined = refine_with(base, mid);
    CHECK(refined == uniform_grid(0.0, 1.0, 3));

    const Grid g3 = uniform_grid(0.0, 1.0, 3);
    CHECK(refine_with(g3, {}) == g3);
    CHECK(refine_with(g3, mid) == g3);  // duplicate dropped

    const double bad[] = {1.5};
    CHECK_THROWS_AS(refine_with(g3, bad), std::invalid_argument);
}

TEST_CASE("refine_with is idempotent") {
    const Grid base = uniform_grid(0.0, 2.0, 9);
    const std::vector<double> extras{0.1, 0.7, 1.31, 1.99, 0.1 + 1e-16};
    const Grid once = refine_with(base, extras);
    const Grid twice = refine_with(once, extras);
    CHECK(once == twice);
}

TEST_CASE("integrate is the weighted node sum") {
    const Grid g9 = uniform_grid(0.0, 1.0, 9);
    CHECK(integrate(g9, std::vector<double>(9, 1.0)) == Catch::Approx(1.0).epsilon(1e-14));

    const Grid g3 = uniform_grid(0.0, 1.0, 3);
    CHECK(integrate(g3, g3.nodes()) == Catch::Approx(0.5).margin(1e-15));

    // x^2 on [0,1]: trapezoid error (b-a) h^2 f'' / 12 = 1.7e-5 at h = 0.01.
    const Grid g101 = uniform_grid(0.0, 1.0, 101);
    std::vector<double> sq(101);
    for (std::size_t i = 0; i < 101; ++i) sq[i] = g101.node(i) * g101.node(i);
    CHECK(integrate(g101, sq) == Catch::Approx(1.0 / 3.0).margin(1e-4));

    CHECK_THROWS_AS(integrate(g3, std::vector<double>(4, 1.0)), std::invalid_argument);
}

TEST_CASE("weights sum to the interval length on constructed grids") {
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> endpoint(-4.0, 4.0);
    std::uniform_int_distribution<int> count(2, 700);
    for (int trial = 0; trial < 40; ++trial) {
        double a = endpoint(gen), b = endpoint(gen);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        Grid g = uniform_grid(a, b, static_cast<std::size_t>(count(gen)));

        std::uniform_real_distribution<double> inside(a, b);
        std::vector<double> extras;
        for (int e = 0; e < 50; ++e) extras.push_back(inside(gen));
        g = refine_with(g, extras);

        const double total = integrate(g, std::vector<double>(g.size(), 1.0));
        CHECK(std::abs(total - (b - a)) <= 1e-12 * (b - a));
    }
}

TEST_CASE("trapezoid quadrature is exact for linear integrands on uniform grids") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double c0 = coef(gen), c1 = coef(gen);
        const Grid g = uniform_grid(-1.5, 2.5, 2 + trial * 7);
        std::vector<double> vals(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) vals[i] = c0 + c1 * g.node(i);
        const double len = g.length();
        const double exact = c0 * len + 0.5 * c1 * (g.b() * g.b() - g.a() * g.a());
        CHECK(integrate(g, vals) == Catch::Approx(exact).margin(1e-12));
    }
}

TEST_CASE("midpoint refinement doubles resolution") {
    const Grid g = uniform_grid(0.0, 1.0, 5);
    const Grid r = midpoint_refine(g);
    CHECK(r.size() == 9);
    CHECK(r == uniform_grid(0.0, 1.0, 9));
}
