#pragma once

// Command-line surface.  Subcommands: simulate, theory, estimate-k,
// extract, estimate-l, fit, evaluate, benchmark.  Exit codes: 0 success,
// 1 usage error, 2 data error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cm3/cm3.hpp"

namespace cm3::cli {

inline void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        cm3::write_text_file(out_path, text);
}

inline int run(std::vector<std::string> args) {
    CLI::App app{"Moving-maxima extreme-value series: simulation, estimation, benchmarks"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out_path;
    std::string format;  // empty = each command's native format
    app.add_option("--seed", seed, "master seed")->capture_default_str();
    app.add_option("--out", out_path, "output path (default: stdout or command default)");
    app.add_option("--format", format, "json|csv where applicable")
        ->check(CLI::IsMember({"json", "csv"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate a series; writes CSV + sidecar");
    std::string sim_params;
    int sim_K = 0, sim_L = 0, sim_D = 0, sim_T = 0;
    double sim_C = 5.0, sim_sigma = 0.0;
    sim->add_option("--params", sim_params, "parameter-set JSON (otherwise random via --K/--L/--D/--C)");
    sim->add_option("--K", sim_K, "temporal dependence length");
    sim->add_option("--L", sim_L, "number of patterns");
    sim->add_option("--D", sim_D, "number of sites");
    sim->add_option("--C", sim_C, "variation bound for random parameters")->capture_default_str();
    sim->add_option("--T", sim_T, "series length")->required();
    sim->add_option("--sigma", sim_sigma, "noise standard deviation")->capture_default_str();

    // theory
    auto* theo = app.add_subcommand("theory", "closed-form quantities of a parameter set");
    std::string theo_params;
    theo->add_option("--params", theo_params, "parameter-set JSON")->required();

    // estimate-k
    auto* estk = app.add_subcommand("estimate-k", "estimate K from a series CSV");
    std::string estk_series;
    double estk_C = 0.0;
    int estk_variant = 7;
    estk->add_option("--series", estk_series, "series CSV")->required();
    estk->add_option("--C", estk_C, "variation bound")->required();
    estk->add_option("--variant", estk_variant, "estimator 1..8")->capture_default_str();

    // extract
    auto* ext = app.add_subcommand("extract", "extract normalized blocks of extremes");
    std::string ext_series, ext_Q = "auto";
    int ext_K = 0;
    double ext_C = 0.0;
    ext->add_option("--series", ext_series, "series CSV")->required();
    ext->add_option("--K", ext_K, "block length")->required();
    ext->add_option("--Q", ext_Q, "block count or 'auto'")->capture_default_str();
    ext->add_option("--C", ext_C, "variation bound (needed when Q=auto)");

    // estimate-l
    auto* estl = app.add_subcommand("estimate-l", "estimate L from a blocks JSON");
    std::string estl_blocks;
    int estl_variant = 2;
    estl->add_option("--blocks", estl_blocks, "blocks JSON")->required();
    estl->add_option("--variant", estl_variant, "estimator 1..11")->capture_default_str();

    // fit
    auto* fit = app.add_subcommand("fit", "full estimation pipeline on a series CSV");
    std::string fit_series;
    double fit_C = 0.0;
    int fit_kvar = 7, fit_lvar = 2;
    std::optional<int> fit_K, fit_L, fit_Q;
    fit->add_option("--series", fit_series, "series CSV")->required();
    fit->add_option("--C", fit_C, "variation bound")->required();
    fit->add_option("--K", fit_K, "override the estimated K");
    fit->add_option("--L", fit_L, "override the estimated L");
    fit->add_option("--Q", fit_Q, "override the block count");
    fit->add_option("--k-variant", fit_kvar, "K estimator 1..8")->capture_default_str();
    fit->add_option("--l-variant", fit_lvar, "L estimator 1..11")->capture_default_str();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "score a report against a truth set");
    std::string eval_truth, eval_report;
    eval->add_option("--truth", eval_truth, "truth parameter-set JSON")->required();
    eval->add_option("--report", eval_report, "estimation report JSON")->required();

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "run a configured experiment");
    std::string bench_experiment, bench_config;
    int bench_threads = -1;
    bench->add_option("experiment", bench_experiment,
                      "k-success|l-success|block-count|hausdorff-hist")
        ->required();
    bench->add_option("--config", bench_config, "benchmark config JSON")->required();
    bench->add_option("--threads", bench_threads, "worker threads (0 = hardware)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<const char*> argv;
    argv.push_back("cm3");
    for (auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (sim->parsed()) {
            ParameterSet params;
            std::string base = out_path.empty() ? "series" : out_path;
            bool generated = false;
            if (!sim_params.empty()) {
                params = read_params(sim_params);
            } else {
                if (sim_K < 1 || sim_L < 1 || sim_D < 1)
                    throw std::runtime_error("simulate: give --params or all of --K/--L/--D");
                params = random_parameter_set(sim_K, sim_L, sim_D, sim_C,
                                              rng::derive_seed(seed, "cli-params"));
                generated = true;
            }
            auto sample = simulate(params, sim_T, sim_sigma, rng::derive_seed(seed, "cli-series"));
            write_series_csv(base + ".csv", sample);
            write_series_meta(base + ".meta.json", sample);
            if (generated) write_params(base + ".params.json", params);
            std::cout << "wrote " << base << ".csv, " << base << ".meta.json";
            if (generated) std::cout << ", " << base << ".params.json";
            std::cout << "\n";
            return 0;
        }

        if (theo->parsed()) {
            auto params = read_params(theo_params);
            auto bound = variation_bound(params);
            auto p = profile_probabilities(params);
            auto bounds = profile_probability_bounds(bound, params.K, params.L);
            json j = {{"theta", extremal_index(params)},
                      {"p", p},
                      {"bounds",
                       {{"lower", bounds.lower},
                        {"upper", bounds.upper},
                        {"global_lower", bounds.global_lower}}},
                      {"variation", {{"per_pattern", bound.per_pattern}, {"global", bound.global}}}};
            emit(j.dump(2) + "\n", out_path);
            return 0;
        }

        if (estk->parsed()) {
            auto sample = read_series_csv(estk_series);
            auto marks = mark_exceedances(sample, estk_C, k_variant_mode(estk_variant));
            auto sizes = run_lengths(marks);
            int k_hat = estimate_k_from_sizes(sizes.sizes, estk_variant);
            json j = {{"K", k_hat}, {"variant", estk_variant}, {"sizes", sizes.sizes}};
            emit(j.dump(2) + "\n", out_path);
            return 0;
        }

        if (ext->parsed()) {
            auto sample = read_series_csv(ext_series);
            int Q;
            if (ext_Q == "auto") {
                if (!(ext_C >= 1.0))
                    throw std::runtime_error("extract: --C >= 1 is required with --Q auto");
                Q = default_block_count(sample.T, ext_C, ext_K);
            } else {
                Q = std::stoi(ext_Q);
            }
            auto result = extract_blocks(sample, ext_K, Q);
            for (auto& f : result.flags) std::cerr << "note: " << f << "\n";
            emit(blocks_to_json(result.blocks).dump(2) + "\n", out_path);
            return 0;
        }

        if (estl->parsed()) {
            auto blocks = blocks_from_json(cm3::load_json_file(estl_blocks));
            auto table = build_table(blocks);
            json j;
            if (estl_variant == 11) {
                auto all = estimate_l_all(table, seed);
                j["L"] = all[10];
                j["votes"] = std::vector<int>(all.begin(), all.begin() + 10);
                j["flags"] = json::array();
                j["per_k_metrics"] = json::array();
            } else {
                auto sel = select_k(table, algorithm_for_l_variant(estl_variant),
                                    criterion_for_l_variant(estl_variant), seed);
                j["L"] = sel.k;
                j["flags"] = sel.flags;
                json per_k = json::array();
                for (const auto& m : sel.per_k)
                    per_k.push_back({{"k", m.k},
                                     {"sse_ratio", m.sse_ratio},
                                     {"silhouette_ratio", m.silhouette_ratio}});
                j["per_k_metrics"] = std::move(per_k);
            }
            emit(j.dump(2) + "\n", out_path);
            return 0;
        }

        if (fit->parsed()) {
            auto sample = read_series_csv(fit_series);
            FitOptions opt;
            opt.k_variant = fit_kvar;
            opt.l_variant = fit_lvar;
            opt.k_override = fit_K;
            opt.l_override = fit_L;
            opt.block_count = fit_Q;
            opt.seed = seed;
            auto report = fit_pipeline(sample, fit_C, opt);
            emit(report_to_json(report).dump(2) + "\n", out_path);
            return 0;
        }

        if (eval->parsed()) {
            auto truth = read_params(eval_truth);
            auto report = report_from_json(cm3::load_json_file(eval_report));
            auto scored = evaluate_fit(truth, report);
            emit(scored_to_json(scored).dump(2) + "\n", out_path);
            return 0;
        }

        if (bench->parsed()) {
            auto cfg = config_from_json(cm3::load_json_file(bench_config));
            cfg.experiment = bench_experiment;
            if (bench_threads >= 0) cfg.threads = bench_threads;
            if (app.count("--seed") > 0) cfg.seed = seed;
            auto result = run_benchmark(cfg);
            for (auto& line : result.log) std::cerr << "note: " << line << "\n";
            if (format == "json") {
                json j = {{"columns", result.columns}, {"rows", result.rows}};
                emit(j.dump(2) + "\n", out_path);
            } else {
                emit(result.to_csv(), out_path);
            }
            return 0;
        }
    } catch (const PipelineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace cm3::cli
