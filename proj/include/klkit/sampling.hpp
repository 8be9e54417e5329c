// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "klkit/matrix.hpp"
#include "klkit/rng.hpp"
#include "klkit/spectrum.hpp"

namespace klkit {

/// Monte Carlo sample paths of the truncated expansion
/// Z_p(x_i) = sum_{j <= n_terms} sqrt(lambda_j) xi_{p,j} f_j(x_i),
/// with xi drawn from the counter-based stream in rng.hpp. Reproducible:
/// identical (spectrum, n_terms, n_paths, seed) gives bitwise-identical
/// paths, independent of the worker count.
struct PathEnsemble {
    Grid grid;
    std::size_t n_terms = 0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    Matrix paths;  // path x node
};

inline PathEnsemble sample_paths(const Spectrum& s, std::size_t n_terms, std::size_t n_paths,
                                 std::uint64_t seed, unsigned n_workers = 1) {
    s.check_term_count(n_terms);
    if (n_paths < 1) throw std::invalid_argument("sample_paths: requires n_paths >= 1");
    if (n_terms >= (std::size_t{1} << rng::kTermBits))
        throw std::invalid_argument("sample_paths: term count exceeds stream addressing");
    if (n_workers < 1) n_workers = 1;

    const std::size_t nodes = s.grid.size();
    PathEnsemble e{s.grid, n_terms, n_paths, seed, Matrix(n_paths, nodes)};

    std::vector<double> sqrt_lambda(n_terms);
    for (std::size_t j = 0; j < n_terms; ++j) sqrt_lambda[j] = std::sqrt(s.pairs[j].lambda);

    auto run = [&](std::size_t p_begin, std::size_t p_end) {
        for (std::size_t p = p_begin; p < p_end; ++p) {
            double* row = e.paths.row(p);
            for (std::size_t j = 0; j < n_terms; ++j) {
                const double coef = sqrt_lambda[j] * rng::normal_draw(seed, p, j);
                const auto& f = s.pairs[j].values;
                for (std::size_t i = 0; i < nodes; ++i) row[i] += coef * f[i];
            }
        }
    };

    if (n_workers == 1 || n_paths < 2 * n_workers) {
        run(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_paths + n_workers - 1) / n_workers;
        for (unsigned w = 0; w < n_workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(n_paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    return e;
}

/// Sample covariance across paths with its asymptotic standard error
/// sqrt((C_ii C_jj + C_ij^2) / M).
struct CovarianceEstimate {
    Matrix covariance;
    Matrix stderr_;
};

inline CovarianceEstimate empirical_covariance(const PathEnsemble& e) {
    if (e.n_paths < 2)
        throw std::invalid_argument("empirical_covariance: requires at least 2 paths");
    const std::size_t nodes = e.grid.size();
    const std::size_t m = e.n_paths;

    std::vector<double> mean(nodes, 0.0);
    for (std::size_t p = 0; p < m; ++p) {
        const double* row = e.paths.row(p);
        for (std::size_t i = 0; i < nodes; ++i) mean[i] += row[i];
    }
    for (double& v : mean) v /= static_cast<double>(m);

    CovarianceEstimate out{Matrix(nodes, nodes), Matrix(nodes, nodes)};
    for (std::size_t p = 0; p < m; ++p) {
        const double* row = e.paths.row(p);
        for (std::size_t i = 0; i < nodes; ++i) {
            const double di = row[i] - mean[i];
            for (std::size_t j = i; j < nodes; ++j)
                out.covariance(i, j) += di * (row[j] - mean[j]);
        }
    }
    const double inv = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t j = i; j < nodes; ++j) {
            out.covariance(i, j) *= inv;
            out.covariance(j, i) = out.covariance(i, j);
        }
    for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t j = 0; j < nodes; ++j) {
            const double cii = out.covariance(i, i);
            const double cjj = out.covariance(j, j);
            const double cij = out.covariance(i, j);
            out.stderr_(i, j) = std::sqrt((cii * cjj + cij * cij) / static_cast<double>(m));
        }
    return out;
}

/// Node-wise sample mean of the ensemble.
inline std::vector<double> path_mean(const PathEnsemble& e) {
    std::vector<double> mean(e.grid.size(), 0.0);
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        const double* row = e.paths.row(p);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
    }
    for (double& v : mean) v /= static_cast<double>(e.n_paths);
    return mean;
}

} // namespace klkit
