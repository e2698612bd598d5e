#pragma once

// Seeded benchmark harness reproducing the experimental protocols: success
// curves for the K and L estimators, block-profile counts against their
// closed-form expectations, and Hausdorff-distance samples.  Trials run in
// a worker pool; every trial derives its own stream from (experiment, T,
// trial index), so results are independent of execution order.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cm3/blocks.hpp"
#include "cm3/cluster.hpp"
#include "cm3/decluster.hpp"
#include "cm3/evaluate.hpp"
#include "cm3/fit.hpp"
#include "cm3/io.hpp"
#include "cm3/parameters.hpp"
#include "cm3/simulate.hpp"
#include "cm3/theory.hpp"

namespace cm3 {

struct BenchmarkConfig {
    std::string experiment;  // k-success | l-success | block-count | hausdorff-hist
    std::vector<double> c_grid;
    std::vector<int> d_grid;
    std::vector<int> k_grid;
    std::vector<int> l_grid;
    std::vector<int> t_grid;
    int trials = 1;  // N per T value
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::optional<int> block_count;  // fixed Q; unset means the auto rule
    std::vector<int> variants;       // estimator subset; empty means all
    std::string algorithm = "pam";   // clustering used by hausdorff-hist
    int threads = 0;                 // 0 = hardware concurrency
};

inline void validate_experiment(const std::string& name) {
    if (name != "k-success" && name != "l-success" && name != "block-count" &&
        name != "hausdorff-hist")
        throw std::runtime_error("unknown experiment: " + name);
}

inline BenchmarkConfig config_from_json(const json& j) {
    BenchmarkConfig c;
    if (j.contains("experiment")) c.experiment = j.at("experiment").get<std::string>();
    c.c_grid = j.at("C").get<std::vector<double>>();
    c.d_grid = j.at("D").get<std::vector<int>>();
    c.k_grid = j.at("K").get<std::vector<int>>();
    c.l_grid = j.at("L").get<std::vector<int>>();
    c.t_grid = j.at("T").get<std::vector<int>>();
    c.trials = j.at("trials").get<int>();
    if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("Q")) c.block_count = j.at("Q").get<int>();
    if (j.contains("variants")) c.variants = j.at("variants").get<std::vector<int>>();
    if (j.contains("algorithm")) c.algorithm = j.at("algorithm").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (!c.experiment.empty()) validate_experiment(c.experiment);
    if (c.c_grid.empty() || c.d_grid.empty() || c.k_grid.empty() || c.l_grid.empty() ||
        c.t_grid.empty())
        throw std::runtime_error("benchmark config: grids must be nonempty");
    if (c.trials < 1) throw std::runtime_error("benchmark config: trials must be >= 1");
    for (double cv : c.c_grid)
        if (!(cv >= 1.0)) throw std::runtime_error("benchmark config: C values must be >= 1");
    return c;
}

struct BenchmarkResult {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> log;

    std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i)
            out += (i ? "," : "") + columns[i];
        out += "\n";
        char buf[40];
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                if (row[i] == std::floor(row[i]) && std::abs(row[i]) < 1e15)
                    out += std::to_string(static_cast<long long>(row[i]));
                else {
                    std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
                    out += buf;
                }
            }
            out += "\n";
        }
        return out;
    }

    double cell(std::size_t row, const std::string& column) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == column) return rows[row][i];
        throw std::out_of_range("no column " + column);
    }
};

namespace detail {

struct Cell {
    double C;
    int D, K, L;
};

inline std::vector<Cell> grid_cells(const BenchmarkConfig& cfg, std::optional<int> t_cap) {
    std::vector<Cell> cells;
    for (double C : cfg.c_grid)
        for (int D : cfg.d_grid)
            for (int K : cfg.k_grid)
                for (int L : cfg.l_grid) {
                    if (t_cap && (K + 1) * L > *t_cap) continue;
                    cells.push_back({C, D, K, L});
                }
    return cells;
}

template <typename Fn>
inline void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

inline Cell draw_cell(const std::vector<Cell>& cells, rng::Stream& s) {
    return cells[s.next_index(cells.size())];
}

// Counts windows that are exact block profiles of each pattern: the window
// is proportional to the pattern at every site and lag within a relative
// tolerance (exact events in a noise-free simulation).
inline std::vector<long long> count_exact_profiles(const SeriesSample& s,
                                                   const ParameterSet& params) {
    std::vector<long long> found(static_cast<std::size_t>(params.L), 0);
    const int K = params.K, D = params.D;
    for (int t = 0; t + K <= s.T; ++t) {
        for (int j = 0; j < params.L; ++j) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (int i = 0; i < K && lo >= hi * (1.0 - 1e-9); ++i)
                for (int d = 0; d < D; ++d) {
                    double q = s.at(t + i, d) / params.a(j, i, d);
                    lo = std::min(lo, q);
                    hi = std::max(hi, q);
                }
            if (hi <= lo * (1.0 + 1e-9)) {
                ++found[j];
                break;  // a window matches at most one pattern
            }
        }
    }
    return found;
}

}  // namespace detail

inline BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
    validate_experiment(cfg.experiment);
    BenchmarkResult out;
    const int N = cfg.trials;

    if (cfg.experiment == "k-success") {
        std::vector<int> variants = cfg.variants;
        if (variants.empty())
            for (int v = 1; v <= 8; ++v) variants.push_back(v);
        out.columns = {"T", "variant", "trials", "successes", "proportion"};
        auto cells = detail::grid_cells(cfg, std::nullopt);
        for (int T : cfg.t_grid) {
            std::vector<std::array<int, 8>> hats(static_cast<std::size_t>(N));
            std::vector<int> truth(static_cast<std::size_t>(N));
            detail::parallel_for(N, cfg.threads, [&](int i) {
                std::uint64_t ts =
                    rng::derive_seed(cfg.seed, "k-success/T=" + std::to_string(T), i);
                rng::Stream pick(rng::derive_seed(ts, "cell"));
                auto cell = detail::draw_cell(cells, pick);
                auto params = random_parameter_set(cell.K, cell.L, cell.D, cell.C,
                                                   rng::derive_seed(ts, "params"));
                auto sample = simulate(params, T, cfg.sigma, rng::derive_seed(ts, "series"));
                hats[i] = estimate_k_all(sample, cell.C);
                truth[i] = cell.K;
            });
            for (int v : variants) {
                int successes = 0;
                for (int i = 0; i < N; ++i) successes += hats[i][v - 1] == truth[i];
                out.rows.push_back({static_cast<double>(T), static_cast<double>(v),
                                    static_cast<double>(N), static_cast<double>(successes),
                                    static_cast<double>(successes) / N});
            }
        }
        return out;
    }

    if (cfg.experiment == "l-success") {
        std::vector<int> variants = cfg.variants;
        if (variants.empty())
            for (int v = 1; v <= 11; ++v) variants.push_back(v);
        bool need_all = false;
        for (int v : variants) need_all = need_all || v == 11;
        out.columns = {"T", "variant", "trials", "successes", "proportion"};
        for (int T : cfg.t_grid) {
            auto cells = detail::grid_cells(cfg, T);  // (K+1) L <= T must hold
            if (cells.empty()) {
                out.log.push_back("skip T=" + std::to_string(T) +
                                  ": no feasible grid cell ((K+1)L > T everywhere)");
                continue;
            }
            std::vector<std::vector<int>> hats(static_cast<std::size_t>(N));
            std::vector<int> truth(static_cast<std::size_t>(N));
            detail::parallel_for(N, cfg.threads, [&](int i) {
                std::uint64_t ts =
                    rng::derive_seed(cfg.seed, "l-success/T=" + std::to_string(T), i);
                rng::Stream pick(rng::derive_seed(ts, "cell"));
                auto cell = detail::draw_cell(cells, pick);
                auto params = random_parameter_set(cell.K, cell.L, cell.D, cell.C,
                                                   rng::derive_seed(ts, "params"));
                auto sample = simulate(params, T, cfg.sigma, rng::derive_seed(ts, "series"));
                int Q = cfg.block_count ? *cfg.block_count
                                        : default_block_count(T, cell.C, cell.K);
                auto extraction = extract_blocks(sample, cell.K, Q, cell.C);
                truth[i] = cell.L;
                std::vector<int> est(12, 0);
                if (extraction.blocks.empty()) {
                    hats[i] = est;
                    return;
                }
                auto table = build_table(extraction.blocks);
                std::uint64_t cs = rng::derive_seed(ts, "cluster");
                if (need_all) {
                    auto all = estimate_l_all(table, cs);
                    for (int v = 1; v <= 11; ++v) est[v] = all[v - 1];
                } else {
                    for (int v : variants) est[v] = estimate_l(table, v, cs);
                }
                hats[i] = est;
            });
            for (int v : variants) {
                int successes = 0;
                for (int i = 0; i < N; ++i) successes += hats[i][v] == truth[i];
                out.rows.push_back({static_cast<double>(T), static_cast<double>(v),
                                    static_cast<double>(N), static_cast<double>(successes),
                                    static_cast<double>(successes) / N});
            }
        }
        return out;
    }

    if (cfg.experiment == "block-count") {
        out.columns = {"T", "trial", "pattern", "expected", "found"};
        for (int T : cfg.t_grid) {
            auto cells = detail::grid_cells(cfg, std::nullopt);
            struct Row {
                std::vector<double> expected;
                std::vector<long long> found;
            };
            std::vector<Row> rows(static_cast<std::size_t>(N));
            detail::parallel_for(N, cfg.threads, [&](int i) {
                std::uint64_t ts =
                    rng::derive_seed(cfg.seed, "block-count/T=" + std::to_string(T), i);
                rng::Stream pick(rng::derive_seed(ts, "cell"));
                auto cell = detail::draw_cell(cells, pick);
                auto params = random_parameter_set(cell.K, cell.L, cell.D, cell.C,
                                                   rng::derive_seed(ts, "params"));
                auto sample = simulate(params, T, 0.0, rng::derive_seed(ts, "series"));
                auto p = profile_probabilities(params);
                rows[i].expected.resize(p.size());
                for (std::size_t l = 0; l < p.size(); ++l)
                    rows[i].expected[l] = p[l] * (T - cell.K + 1);
                rows[i].found = detail::count_exact_profiles(sample, params);
            });
            for (int i = 0; i < N; ++i) {
                double etot = 0.0;
                long long ftot = 0;
                for (std::size_t l = 0; l < rows[i].expected.size(); ++l) {
                    out.rows.push_back({static_cast<double>(T), static_cast<double>(i + 1),
                                        static_cast<double>(l + 1), rows[i].expected[l],
                                        static_cast<double>(rows[i].found[l])});
                    etot += rows[i].expected[l];
                    ftot += rows[i].found[l];
                }
                out.rows.push_back({static_cast<double>(T), static_cast<double>(i + 1), 0.0,
                                    etot, static_cast<double>(ftot)});
            }
        }
        return out;
    }

    // hausdorff-hist: estimation given the true K and L, distance per trial.
    out.columns = {"T", "trial", "k_hat", "l_hat", "failed", "distance"};
    int l_variant = 9;
    if (cfg.algorithm == "ward") l_variant = 1;
    else if (cfg.algorithm == "centroid") l_variant = 3;
    else if (cfg.algorithm == "kmeans-euclid") l_variant = 5;
    else if (cfg.algorithm == "kmeans-pearson") l_variant = 7;
    else if (cfg.algorithm == "pam") l_variant = 9;
    else throw std::runtime_error("hausdorff-hist: unknown algorithm " + cfg.algorithm);
    for (int T : cfg.t_grid) {
        auto cells = detail::grid_cells(cfg, T);
        if (cells.empty()) {
            out.log.push_back("skip T=" + std::to_string(T) +
                              ": no feasible grid cell ((K+1)L > T everywhere)");
            continue;
        }
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(N));
        detail::parallel_for(N, cfg.threads, [&](int i) {
            std::uint64_t ts =
                rng::derive_seed(cfg.seed, "hausdorff-hist/T=" + std::to_string(T), i);
            rng::Stream pick(rng::derive_seed(ts, "cell"));
            auto cell = detail::draw_cell(cells, pick);
            auto params = random_parameter_set(cell.K, cell.L, cell.D, cell.C,
                                               rng::derive_seed(ts, "params"));
            auto sample = simulate(params, T, cfg.sigma, rng::derive_seed(ts, "series"));
            FitOptions opt;
            opt.k_override = cell.K;
            opt.l_override = cell.L;
            opt.l_variant = l_variant;
            opt.block_count = cfg.block_count;
            opt.seed = rng::derive_seed(ts, "cluster");
            try {
                auto report = fit_pipeline(sample, cell.C, opt);
                auto scored = evaluate_fit(params, report);
                rows[i] = {static_cast<double>(T), static_cast<double>(i + 1),
                           static_cast<double>(report.k_hat), static_cast<double>(report.l_hat),
                           0.0, scored.hausdorff.value_or(-1.0)};
            } catch (const PipelineError&) {
                rows[i] = {static_cast<double>(T), static_cast<double>(i + 1), 0.0, 0.0, 1.0,
                           -1.0};
            }
        });
        for (auto& r : rows) out.rows.push_back(std::move(r));
    }
    return out;
}

}  // namespace cm3
