// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "klkit/counterexamples.hpp"
#include "klkit/diagnostics.hpp"
#include "klkit/expansion.hpp"
#include "klkit/matrix.hpp"
#include "klkit/sampling.hpp"
#include "klkit/spectrum.hpp"

namespace klkit {

using json = nlohmann::json;

/// Malformed or inconsistent spectrum/report file content.
class FormatError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const json& require_field(const json& j, const char* field, const char* what) {
    if (!j.contains(field))
        throw FormatError(std::string(what) + ": missing field \"" + field + "\"");
    return j.at(field);
}

inline std::string family_kind_name(AnalyticFamily::Kind k) {
    switch (k) {
        case AnalyticFamily::Kind::tent_failing: return "tent-failing";
        case AnalyticFamily::Kind::tent_passing: return "tent-passing";
        case AnalyticFamily::Kind::brownian_sine: return "brownian-sine";
    }
    return "tent-failing";
}

inline AnalyticFamily::Kind family_kind_from_name(const std::string& s) {
    if (s == "tent-failing") return AnalyticFamily::Kind::tent_failing;
    if (s == "tent-passing") return AnalyticFamily::Kind::tent_passing;
    if (s == "brownian-sine") return AnalyticFamily::Kind::brownian_sine;
    throw FormatError("spectrum JSON: unknown family kind \"" + s + "\"");
}

} // namespace detail

inline json spectrum_to_json(const Spectrum& s) {
    json j;
    j["domain"] = {{"a", s.grid.a()}, {"b", s.grid.b()}};
    j["grid"] = {{"nodes", s.grid.nodes()}, {"weights", s.grid.weights()}};
    j["source"] = to_string(s.source);
    j["pairs"] = json::array();
    for (std::size_t t = 0; t < s.size(); ++t) {
        json p = {{"lambda", s.pairs[t].lambda}, {"values", s.pairs[t].values}};
        if (s.sup_f_squared.size() == s.size()) p["sup_f_sq"] = s.sup_f_squared[t];
        j["pairs"].push_back(std::move(p));
    }
    if (s.tail_bound) j["tail_bound"] = *s.tail_bound;
    if (!s.features.empty()) j["features"] = s.features;
    if (s.family)
        j["family"] = {{"kind", detail::family_kind_name(s.family->kind)},
                       {"terms", s.family->n_terms}};
    return j;
}

inline Spectrum spectrum_from_json(const json& j) {
    const char* what = "spectrum JSON";
    const json& dom = detail::require_field(j, "domain", what);
    const json& grid_j = detail::require_field(j, "grid", what);
    const double a = detail::require_field(dom, "a", what).get<double>();
    const double b = detail::require_field(dom, "b", what).get<double>();
    auto nodes = detail::require_field(grid_j, "nodes", what).get<std::vector<double>>();
    auto weights = detail::require_field(grid_j, "weights", what).get<std::vector<double>>();

    Grid grid = [&] {
        try {
            return Grid(a, b, std::move(nodes), std::move(weights));
        } catch (const std::invalid_argument& e) {
            throw FormatError(std::string(what) + ": bad grid: " + e.what());
        }
    }();

    Spectrum s{std::move(grid)};
    s.source = spectrum_source_from_string(
        detail::require_field(j, "source", what).get<std::string>());

    const json& pairs = detail::require_field(j, "pairs", what);
    if (!pairs.is_array() || pairs.empty())
        throw FormatError(std::string(what) + ": \"pairs\" must be a non-empty array");
    bool have_sups = true;
    std::vector<double> sups;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& p : pairs) {
        EigenPair pair;
        pair.lambda = detail::require_field(p, "lambda", what).get<double>();
        pair.values = detail::require_field(p, "values", what).get<std::vector<double>>();
        if (!(pair.lambda > 0.0))
            throw FormatError(std::string(what) + ": lambdas must be strictly positive");
        if (pair.lambda > prev)
            throw FormatError(std::string(what) + ": lambdas must be non-increasing");
        prev = pair.lambda;
        if (pair.values.size() != s.grid.size())
            throw FormatError(std::string(what) + ": values length must match grid nodes");
        if (p.contains("sup_f_sq"))
            sups.push_back(p.at("sup_f_sq").get<double>());
        else
            have_sups = false;
        s.pairs.push_back(std::move(pair));
    }
    if (have_sups && sups.size() == s.pairs.size()) s.sup_f_squared = std::move(sups);
    if (j.contains("tail_bound") && !j.at("tail_bound").is_null())
        s.tail_bound = j.at("tail_bound").get<double>();
    if (j.contains("features")) s.features = j.at("features").get<std::vector<double>>();
    if (j.contains("family")) {
        const json& f = j.at("family");
        const AnalyticFamily fam{
            detail::family_kind_from_name(detail::require_field(f, "kind", what).get<std::string>()),
            detail::require_field(f, "terms", what).get<std::size_t>()};
        if (fam.n_terms != s.pairs.size())
            throw FormatError(std::string(what) + ": family terms do not match pairs");
        attach_family_analytics(s, fam);
    }
    return s;
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open: " + path);
    return json::parse(in);  // nlohmann reports position diagnostics on failure
}

inline void save_spectrum(const std::string& path, const Spectrum& s) {
    save_json(path, spectrum_to_json(s));
}

inline Spectrum load_spectrum(const std::string& path) {
    return spectrum_from_json(load_json(path));
}

inline json report_to_json(const ModulusReport& r) {
    json j;
    j["deltas"] = r.deltas;
    j["moduli"] = r.moduli;
    j["envelope"] = r.envelope;
    j["pair_counts"] = r.pair_counts;
    j["tail_bound"] = r.tail_bound ? json(*r.tail_bound) : json(nullptr);
    j["scale"] = r.scale;
    j["pass_threshold"] = r.pass_threshold;
    j["fail_threshold"] = r.fail_threshold;
    j["verdict_delta"] = r.verdict_delta;
    j["verdict"] = to_string(r.verdict);
    j["witness"] = r.witness ? json{{"x", r.witness->x}, {"y", r.witness->y},
                                    {"n", r.witness->n}}
                             : json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// CSV (floats as %.17g so text round trips recover the exact doubles)

namespace detail {

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : f_(std::fopen(path.c_str(), "w")) {
        if (!f_) throw std::runtime_error("cannot open for writing: " + path);
    }
    ~CsvWriter() {
        if (f_) std::fclose(f_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(std::span<const double> values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            std::fprintf(f_, i + 1 < values.size() ? "%.17g," : "%.17g\n", values[i]);
    }
    void raw(const char* text) { std::fputs(text, f_); }
    std::FILE* handle() { return f_; }

private:
    std::FILE* f_;
};

} // namespace detail

/// Matrix as CSV, row-major, with a header row of node coordinates.
inline void write_matrix_csv(const std::string& path, std::span<const double> header,
                             const Matrix& m) {
    detail::CsvWriter out(path);
    out.row(header);
    for (std::size_t i = 0; i < m.rows(); ++i)
        out.row(std::span<const double>(m.row(i), m.cols()));
}

struct CsvMatrix {
    std::vector<double> header;
    Matrix values;
};

inline CsvMatrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw FormatError("CSV too short: " + path);
    CsvMatrix out;
    out.header = rows.front();
    out.values = Matrix(rows.size() - 1, out.header.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != out.header.size())
            throw FormatError("ragged CSV row in " + path);
        for (std::size_t j = 0; j < rows[i].size(); ++j) out.values(i - 1, j) = rows[i][j];
    }
    return out;
}

/// Paths as CSV: first column node coordinate, one column per path.
inline void write_paths_csv(const std::string& path, const PathEnsemble& e) {
    detail::CsvWriter out(path);
    std::vector<double> row(1 + e.n_paths);
    for (std::size_t i = 0; i < e.grid.size(); ++i) {
        row[0] = e.grid.node(i);
        for (std::size_t p = 0; p < e.n_paths; ++p) row[1 + p] = e.paths(p, i);
        out.row(row);
    }
}

/// v_n table as CSV: header row of node coordinates, then one row per n.
inline void write_vn_csv(const std::string& path, const VnSequence& v) {
    detail::CsvWriter out(path);
    out.row(v.grid.nodes());
    for (const auto& row : v.rows) out.row(row);
}

/// Flat (n, delta, omega) rows for plotting.
inline void write_moduli_csv(const std::string& path, const ModulusReport& r) {
    detail::CsvWriter out(path);
    out.raw("n,delta,omega\n");
    for (std::size_t t = 0; t < r.moduli.size(); ++t)
        for (std::size_t k = 0; k < r.deltas.size(); ++k)
            std::fprintf(out.handle(), "%zu,%.17g,%.17g\n", t + 1, r.deltas[k],
                         r.moduli[t][k]);
}

} // namespace klkit
