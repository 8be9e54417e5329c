// SPDX-License-Identifier: Apache-2.0
//
// klkit command line: decompose kernels into spectra, synthesize partial
// kernels, run the equicontinuity check, generate counterexample families,
// sample paths, and verify the analytic bounds. Emits JSON/CSV.
//
// Exit codes: 0 pass/ok, 1 criterion fail, 2 bad input, 3 numerical failure,
// 4 inconclusive.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "klkit/klkit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCriterionFail = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInconclusive = 4;

unsigned worker_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("KLKIT_THREADS")) {
        try {
            const unsigned cap = static_cast<unsigned>(std::stoul(env));
            if (cap >= 1) hw = std::min(hw, cap);
        } catch (const std::exception&) {
            throw std::invalid_argument("KLKIT_THREADS must be a positive integer");
        }
    }
    return hw;
}

klkit::KernelSpec kernel_by_name(const std::string& name, double ell) {
    if (name == "brownian") return klkit::brownian();
    if (name == "exponential") return klkit::exponential(ell);
    if (name == "squared-exponential") return klkit::squared_exponential(ell);
    throw std::invalid_argument("unknown kernel: " + name);
}

// Deterministic (n, m) schedule spread over the spectrum length.
std::vector<std::pair<std::size_t, std::size_t>> gap_schedule(std::size_t len,
                                                              std::size_t target) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (len < 2) return out;
    for (std::size_t t = 0; t < 4 * target && out.size() < target; ++t) {
        const std::size_t n = 2 + (t * 7919) % (len - 1);
        const std::size_t m = 1 + (t * 104729) % (n - 1 + 1);
        if (n <= len && m < n && !std::count(out.begin(), out.end(), std::make_pair(n, m)))
            out.emplace_back(n, m);
    }
    if (out.empty()) out.emplace_back(len, len / 2 + 1);
    return out;
}

struct CheckArgs {
    std::string spectrum_path;
    std::string out_path;
    std::string moduli_csv;
    std::size_t depth = 28;
    std::size_t terms = 0;  // 0: full spectrum
    std::size_t prerefine = 0;
    std::optional<double> pass_threshold;
    std::optional<double> fail_threshold;
};

int run_check(const CheckArgs& a) {
    const klkit::Spectrum s = klkit::load_spectrum(a.spectrum_path);
    const std::size_t n = a.terms == 0 ? s.size() : a.terms;
    klkit::DiagnosticsOptions opt;
    opt.pass_threshold = a.pass_threshold;
    opt.fail_threshold = a.fail_threshold;
    opt.prerefine = a.prerefine;
    const klkit::ModulusReport rep = klkit::equicontinuity_report(s, n, a.depth, opt);
    if (!a.out_path.empty()) klkit::save_json(a.out_path, klkit::report_to_json(rep));
    if (!a.moduli_csv.empty()) klkit::write_moduli_csv(a.moduli_csv, rep);
    std::cout << "verdict: " << klkit::to_string(rep.verdict) << "\n";
    switch (rep.verdict) {
        case klkit::Verdict::pass: return kExitOk;
        case klkit::Verdict::fail: return kExitCriterionFail;
        case klkit::Verdict::inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mercer expansion toolkit: kernel eigendecomposition, synthesis, "
                 "equicontinuity diagnostics, counterexample families, path sampling"};
    app.require_subcommand(0, 1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON file holding {\"command\": ..., \"<flag>\": ...}; unknown keys rejected");

    // decompose
    auto* dec = app.add_subcommand("decompose", "Nystrom-decompose a catalog kernel");
    std::string dec_kernel = "brownian";
    double dec_ell = 1.0, dec_a = 0.0, dec_b = 1.0;
    std::size_t dec_grid = 512, dec_terms = 10;
    std::optional<double> dec_drop;
    std::string dec_out = "spectrum.json", dec_gram_out;
    dec->add_option("--kernel", dec_kernel, "brownian | exponential | squared-exponential");
    dec->add_option("--ell", dec_ell, "length scale for the exponential families");
    dec->add_option("--a", dec_a, "domain left endpoint");
    dec->add_option("--b", dec_b, "domain right endpoint");
    dec->add_option("--grid", dec_grid, "node count");
    dec->add_option("--terms", dec_terms, "eigenpairs to keep");
    dec->add_option("--drop-tol", dec_drop, "absolute eigenvalue cutoff");
    dec->add_option("--out", dec_out, "output spectrum JSON");
    dec->add_option("--gram-out", dec_gram_out, "optional Gram matrix CSV");

    // synthesize
    auto* syn = app.add_subcommand("synthesize", "materialize the partial-sum kernel");
    std::string syn_spectrum, syn_out = "kernel.csv", syn_vn_out;
    std::size_t syn_terms = 0;
    syn->add_option("--spectrum", syn_spectrum, "input spectrum JSON")->required();
    syn->add_option("--terms", syn_terms, "terms to sum (default: all)");
    syn->add_option("--out", syn_out, "output kernel CSV");
    syn->add_option("--vn-out", syn_vn_out, "optional v_n table CSV");

    // check
    auto* chk = app.add_subcommand("check", "equicontinuity verdict for a spectrum");
    CheckArgs chk_args;
    chk->add_option("--spectrum", chk_args.spectrum_path, "input spectrum JSON")->required();
    chk->add_option("--depth", chk_args.depth, "dyadic delta-ladder depth");
    chk->add_option("--terms", chk_args.terms, "truncation level (default: all)");
    chk->add_option("--prerefine", chk_args.prerefine,
                    "midpoint refinements of the evaluation grid before measuring");
    chk->add_option("--pass-threshold", chk_args.pass_threshold,
                    "absolute pass threshold (default 1e-3 * max v_N)");
    chk->add_option("--fail-threshold", chk_args.fail_threshold,
                    "absolute fail threshold (default 10x pass)");
    chk->add_option("--out", chk_args.out_path, "output report JSON");
    chk->add_option("--moduli-csv", chk_args.moduli_csv, "flat (n, delta, omega) CSV");

    // counterexample
    auto* cex = app.add_subcommand("counterexample", "generate a constructed family");
    std::string cex_family = "failing", cex_out = "family.json";
    std::size_t cex_terms = 12, cex_background = 257, cex_subdiv = 1024, cex_grid_nodes = 513;
    cex->add_option("--family", cex_family, "failing | passing | brownian");
    cex->add_option("--terms", cex_terms, "family size");
    cex->add_option("--out", cex_out, "output spectrum JSON");
    cex->add_option("--background-nodes", cex_background, "uniform background node count");
    cex->add_option("--subdivisions", cex_subdiv, "nodes per tent rise");
    cex->add_option("--grid-nodes", cex_grid_nodes, "grid size for the brownian family");

    // sample
    auto* smp = app.add_subcommand("sample", "draw truncated-expansion Gaussian paths");
    std::string smp_spectrum, smp_out = "paths.csv", smp_cov, smp_se;
    std::size_t smp_paths = 100, smp_terms = 0;
    std::uint64_t smp_seed = 1;
    smp->add_option("--spectrum", smp_spectrum, "input spectrum JSON")->required();
    smp->add_option("--paths", smp_paths, "number of sample paths");
    smp->add_option("--terms", smp_terms, "terms to use (default: all)");
    smp->add_option("--seed", smp_seed, "stream seed");
    smp->add_option("--out", smp_out, "paths CSV (first column: node coordinate)");
    smp->add_option("--covariance", smp_cov, "optional empirical covariance CSV");
    smp->add_option("--stderr-out", smp_se, "optional covariance stderr CSV");

    // verify-bounds
    auto* vfy = app.add_subcommand("verify-bounds",
                                   "residuals of the increment bound and the uniform-Cauchy bound");
    std::string vfy_spectrum, vfy_kernel = "brownian", vfy_out = "bounds.json";
    double vfy_ell = 1.0;
    std::size_t vfy_max_terms = 50;
    vfy->add_option("--spectrum", vfy_spectrum, "input spectrum JSON")->required();
    vfy->add_option("--kernel", vfy_kernel, "limit kernel name");
    vfy->add_option("--ell", vfy_ell, "length scale for the exponential families");
    vfy->add_option("--max-terms", vfy_max_terms, "check truncations up to this n");
    vfy->add_option("--out", vfy_out, "output report JSON");

    // --config: translate the JSON object into an argv and reparse, so the
    // schema stays identical to the flags and unknown keys are rejected.
    std::vector<std::string> reparse;
    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            const klkit::json cfg = klkit::load_json(config_path);
            if (!cfg.is_object() || !cfg.contains("command"))
                throw klkit::FormatError("config JSON: missing field \"command\"");
            reparse.push_back(cfg.at("command").get<std::string>());
            for (const auto& [key, value] : cfg.items()) {
                if (key == "command") continue;
                reparse.push_back("--" + key);
                reparse.push_back(value.is_string() ? value.get<std::string>()
                                                    : value.dump());
            }
            std::vector<const char*> cargv{argv[0]};
            for (const auto& s : reparse) cargv.push_back(s.c_str());
            app.clear();
            app.parse(static_cast<int>(cargv.size()), cargv.data());
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    try {
        if (dec->parsed()) {
            const klkit::KernelSpec kernel = kernel_by_name(dec_kernel, dec_ell);
            const klkit::Grid grid = klkit::uniform_grid(dec_a, dec_b, dec_grid);
            const klkit::Spectrum s =
                klkit::nystrom_decompose(kernel, grid, dec_terms, dec_drop);
            klkit::save_spectrum(dec_out, s);
            if (!dec_gram_out.empty())
                klkit::write_matrix_csv(dec_gram_out, grid.nodes(),
                                        klkit::gram_matrix(kernel, grid));
            std::cout << "kept " << s.size() << " eigenpairs; lambda_1 = "
                      << s.pairs.front().lambda << "\n";
            return kExitOk;
        }
        if (syn->parsed()) {
            const klkit::Spectrum s = klkit::load_spectrum(syn_spectrum);
            const std::size_t n = syn_terms == 0 ? s.size() : syn_terms;
            const klkit::PartialKernel k = klkit::partial_kernel(s, n);
            klkit::write_matrix_csv(syn_out, k.grid.nodes(), k.values);
            if (!syn_vn_out.empty())
                klkit::write_vn_csv(syn_vn_out, klkit::vn_sequence(s, n));
            return kExitOk;
        }
        if (chk->parsed()) return run_check(chk_args);
        if (cex->parsed()) {
            klkit::Spectrum s = [&] {
                if (cex_family == "failing" || cex_family == "passing") {
                    klkit::FamilyGridOptions opt;
                    opt.background_nodes = cex_background;
                    opt.rise_subdivisions = cex_subdiv;
                    return cex_family == "failing" ? klkit::failing_family(cex_terms, opt)
                                                   : klkit::passing_family(cex_terms, opt);
                }
                if (cex_family == "brownian")
                    return klkit::analytic_brownian_spectrum(cex_terms, cex_grid_nodes);
                throw std::invalid_argument("unknown family: " + cex_family);
            }();
            klkit::save_spectrum(cex_out, s);
            return kExitOk;
        }
        if (smp->parsed()) {
            const klkit::Spectrum s = klkit::load_spectrum(smp_spectrum);
            const std::size_t n = smp_terms == 0 ? s.size() : smp_terms;
            const klkit::PathEnsemble e =
                klkit::sample_paths(s, n, smp_paths, smp_seed, worker_cap());
            klkit::write_paths_csv(smp_out, e);
            if (!smp_cov.empty() || !smp_se.empty()) {
                const klkit::CovarianceEstimate c = klkit::empirical_covariance(e);
                if (!smp_cov.empty())
                    klkit::write_matrix_csv(smp_cov, e.grid.nodes(), c.covariance);
                if (!smp_se.empty())
                    klkit::write_matrix_csv(smp_se, e.grid.nodes(), c.stderr_);
            }
            return kExitOk;
        }
        if (vfy->parsed()) {
            const klkit::Spectrum s = klkit::load_spectrum(vfy_spectrum);
            const klkit::KernelSpec kernel = kernel_by_name(vfy_kernel, vfy_ell);
            if (std::abs(s.grid.a()) > 0.0 && vfy_kernel == "brownian")
                throw std::invalid_argument("brownian limit kernel expects domain [0, 1]");

            klkit::json rep;
            rep["kernel"] = kernel.name;
            bool ok = true;
            double worst_margin = std::numeric_limits<double>::infinity();

            rep["eq5"] = klkit::json::array();
            const std::size_t n_max = std::min(vfy_max_terms, s.size());
            bool estimated = false;
            for (std::size_t n = 1; n <= n_max; ++n) {
                const klkit::NecessityBound b = klkit::necessity_bound_residual(s, kernel, n);
                estimated = b.sup_norm_is_estimate;
                rep["eq5"].push_back({{"n", n}, {"margin", b.residual}});
                worst_margin = std::min(worst_margin, b.residual);
                if (b.residual < -1e-8) ok = false;
            }
            rep["sup_norm_is_estimate"] = estimated;

            rep["eq9"] = klkit::json::array();
            for (const auto& [n, m] : gap_schedule(s.size(), 20)) {
                const klkit::SupGap g = klkit::sup_gap(s, n, m);
                const klkit::L1Gap l = klkit::l1_gap(s, n, m);
                rep["eq9"].push_back({{"n", n},
                                      {"m", m},
                                      {"sup_gap", g.kernel_gap},
                                      {"vn_gap", g.vn_gap},
                                      {"l1_quadrature", l.quadrature},
                                      {"l1_exact", l.coefficient_sum}});
                if (g.kernel_gap > g.vn_gap + 1e-12) ok = false;
            }
            rep["worst_eq5_margin"] = worst_margin;
            rep["all_ok"] = ok;
            klkit::save_json(vfy_out, rep);
            std::cout << (ok ? "bounds hold" : "bound violated") << "\n";
            return ok ? kExitOk : kExitCriterionFail;
        }
        std::cout << app.help() << "\n";
        return kExitOk;
    } catch (const klkit::ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what()
                  << " (offdiag " << e.offdiag_norm() << ")\n";
        return kExitNumerical;
    } catch (const klkit::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const klkit::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
