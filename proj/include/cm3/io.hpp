#pragma once

// File formats: parameter-set JSON (exact round-trip), series CSV with a
// metadata sidecar, block lists and estimation reports as JSON.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cm3/blocks.hpp"
#include "cm3/evaluate.hpp"
#include "cm3/fit.hpp"
#include "cm3/parameters.hpp"
#include "cm3/simulate.hpp"

namespace cm3 {

using json = nlohmann::json;

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

inline json load_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

namespace detail {
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}
}  // namespace detail

// {"K":..,"L":..,"D":..,"sites":[[..]]?,"values":[[[a]]]} with values
// ordered pattern-major, then lag, then site.
inline json params_to_json(const ParameterSet& p) {
    json values = json::array();
    for (int j = 0; j < p.L; ++j) {
        json pat = json::array();
        for (int i = 0; i < p.K; ++i) {
            json row = json::array();
            for (int d = 0; d < p.D; ++d) row.push_back(p.a(j, i, d));
            pat.push_back(std::move(row));
        }
        values.push_back(std::move(pat));
    }
    json out = {{"K", p.K}, {"L", p.L}, {"D", p.D}, {"values", std::move(values)}};
    if (p.sites) out["sites"] = *p.sites;
    return out;
}

inline ParameterSet params_from_json(const json& j) {
    ParameterSet p;
    p.K = j.at("K").get<int>();
    p.L = j.at("L").get<int>();
    p.D = j.at("D").get<int>();
    if (p.K < 1 || p.L < 1 || p.D < 1)
        throw std::runtime_error("parameter set: K, L, D must be positive");
    p.values.resize(static_cast<std::size_t>(p.K) * p.L * p.D);
    const json& values = j.at("values");
    if (static_cast<int>(values.size()) != p.L)
        throw std::runtime_error("parameter set: expected L patterns");
    for (int jj = 0; jj < p.L; ++jj) {
        if (static_cast<int>(values[jj].size()) != p.K)
            throw std::runtime_error("parameter set: expected K lags per pattern");
        for (int i = 0; i < p.K; ++i) {
            if (static_cast<int>(values[jj][i].size()) != p.D)
                throw std::runtime_error("parameter set: expected D sites per lag");
            for (int d = 0; d < p.D; ++d) p.a(jj, i, d) = values[jj][i][d].get<double>();
        }
    }
    if (j.contains("sites")) p.sites = j.at("sites").get<std::vector<std::vector<double>>>();
    return p;
}

inline void write_params(const std::string& path, const ParameterSet& p) {
    write_text_file(path, params_to_json(p).dump(2) + "\n");
}
inline ParameterSet read_params(const std::string& path) {
    return params_from_json(load_json_file(path));
}

// Header "t,d1,..,dD"; one row per time step, 17-significant-digit decimals.
inline std::string series_to_csv(const SeriesSample& s) {
    std::string out = "t";
    for (int d = 1; d <= s.D; ++d) out += ",d" + std::to_string(d);
    out += "\n";
    for (int t = 0; t < s.T; ++t) {
        out += std::to_string(t + 1);
        for (int d = 0; d < s.D; ++d) out += "," + detail::fmt17(s.at(t, d));
        out += "\n";
    }
    return out;
}

inline SeriesSample series_from_csv(const std::string& text) {
    SeriesSample s;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("series CSV: empty file");
    int commas = 0;
    for (char c : line) commas += c == ',';
    s.D = commas;
    if (s.D < 1 || line.rfind("t,", 0) != 0)
        throw std::runtime_error("series CSV: expected header t,d1,..,dD");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');  // t column
        int got = 0;
        while (std::getline(row, cell, ',')) {
            s.values.push_back(std::strtod(cell.c_str(), nullptr));
            ++got;
        }
        if (got != s.D) throw std::runtime_error("series CSV: ragged row");
        ++s.T;
    }
    if (s.T < 1) throw std::runtime_error("series CSV: no data rows");
    return s;
}

inline void write_series_csv(const std::string& path, const SeriesSample& s) {
    write_text_file(path, series_to_csv(s));
}

inline SeriesSample read_series_csv(const std::string& path) {
    return series_from_csv(read_text_file(path));
}

inline json series_meta_to_json(const SeriesSample& s) {
    return {{"T", s.T}, {"D", s.D}, {"sigma", s.sigma}, {"seed", s.seed}};
}

inline void write_series_meta(const std::string& path, const SeriesSample& s) {
    write_text_file(path, series_meta_to_json(s).dump(2) + "\n");
}

inline void apply_series_meta(const std::string& path, SeriesSample& s) {
    json j = load_json_file(path);
    if (j.at("T").get<int>() != s.T || j.at("D").get<int>() != s.D)
        throw std::runtime_error("series sidecar does not match the CSV dimensions");
    s.sigma = j.at("sigma").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
}

// Blocks as an array of {start, norm, matrix}; matrix rows are time steps.
inline json blocks_to_json(const std::vector<BlockShape>& blocks) {
    json out = json::array();
    for (const auto& b : blocks) {
        json m = json::array();
        for (int r = 0; r < b.matrix.rows; ++r) {
            json row = json::array();
            for (int c = 0; c < b.matrix.cols; ++c) row.push_back(b.matrix(r, c));
            m.push_back(std::move(row));
        }
        out.push_back({{"start", b.start}, {"norm", b.norm}, {"matrix", std::move(m)}});
    }
    return out;
}

inline std::vector<BlockShape> blocks_from_json(const json& j) {
    std::vector<BlockShape> out;
    for (const auto& e : j) {
        BlockShape b;
        b.start = e.at("start").get<int>();
        b.norm = e.at("norm").get<double>();
        const json& m = e.at("matrix");
        int rows = static_cast<int>(m.size());
        int cols = rows > 0 ? static_cast<int>(m[0].size()) : 0;
        b.matrix = Mat(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) b.matrix(r, c) = m[r][c].get<double>();
        out.push_back(std::move(b));
    }
    return out;
}

inline json trace_to_json(const FixedPointTrace& t) {
    json iters = json::array();
    for (const auto& step : t.iterations)
        iters.push_back({{"p", step.p}, {"error", step.error}});
    return {{"converged", t.converged},
            {"final_alphas", t.final_alphas},
            {"per_site_alpha", t.per_site_alpha},
            {"iterations", std::move(iters)}};
}

inline FixedPointTrace trace_from_json(const json& j) {
    FixedPointTrace t;
    t.converged = j.at("converged").get<bool>();
    t.final_alphas = j.at("final_alphas").get<std::vector<double>>();
    t.per_site_alpha = j.at("per_site_alpha").get<std::vector<double>>();
    for (const auto& e : j.at("iterations"))
        t.iterations.push_back({e.at("p").get<std::vector<double>>(), e.at("error").get<double>()});
    return t;
}

inline json report_to_json(const EstimationReport& r) {
    json out = {{"K", r.k_hat},
                {"L", r.l_hat},
                {"fitted", params_to_json(r.fitted)},
                {"frequencies", r.frequencies},
                {"trace", trace_to_json(r.trace)},
                {"flags", r.flags}};
    if (r.hausdorff) out["hausdorff"] = *r.hausdorff;
    return out;
}

inline EstimationReport report_from_json(const json& j) {
    EstimationReport r;
    r.k_hat = j.at("K").get<int>();
    r.l_hat = j.at("L").get<int>();
    r.fitted = params_from_json(j.at("fitted"));
    r.frequencies = j.at("frequencies").get<std::vector<double>>();
    r.trace = trace_from_json(j.at("trace"));
    r.flags = j.at("flags").get<std::vector<std::string>>();
    if (j.contains("hausdorff")) r.hausdorff = j.at("hausdorff").get<double>();
    return r;
}

inline json scored_to_json(const ScoredReport& s) {
    json out = report_to_json(s.report);
    out["k_correct"] = s.k_correct;
    out["l_correct"] = s.l_correct;
    if (s.hausdorff) out["hausdorff"] = *s.hausdorff;
    return out;
}

}  // namespace cm3
