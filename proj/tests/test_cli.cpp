#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "cli.hpp"
#include "support/helpers.hpp"

using namespace cm3;
namespace fs = std::filesystem;

namespace {
std::string scratch() {
    auto dir = fs::temp_directory_path() / "cm3-cli-tests";
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) { return cm3::read_text_file(path); }
}  // namespace

TEST_CASE("simulate writes csv, sidecar and the generated truth", "[cli]") {
    auto dir = scratch();
    auto base = dir + "/sim1";
    int rc = cli::run({"--seed", "7", "--out", base, "simulate", "--K", "2", "--L", "3", "--D",
                       "20", "--T", "500", "--sigma", "1"});
    REQUIRE(rc == 0);
    REQUIRE(fs::exists(base + ".csv"));
    REQUIRE(fs::exists(base + ".meta.json"));
    REQUIRE(fs::exists(base + ".params.json"));
    auto s = read_series_csv(base + ".csv");
    CHECK(s.T == 500);
    CHECK(s.D == 20);
    auto truth = read_params(base + ".params.json");
    CHECK(truth.K == 2);
    CHECK(truth.L == 3);
    REQUIRE(validate(truth).empty());

    // Determinism: the same seed yields byte-identical outputs.
    auto base2 = dir + "/sim2";
    REQUIRE(cli::run({"--seed", "7", "--out", base2, "simulate", "--K", "2", "--L", "3", "--D",
                      "20", "--T", "500", "--sigma", "1"}) == 0);
    CHECK(slurp(base + ".csv") == slurp(base2 + ".csv"));
    CHECK(slurp(base + ".params.json") == slurp(base2 + ".params.json"));
}

TEST_CASE("the full command chain runs end to end", "[cli]") {
    auto dir = scratch();
    auto base = dir + "/chain";
    REQUIRE(cli::run({"--seed", "3", "--out", base, "simulate", "--K", "2", "--L", "2", "--D",
                      "3", "--T", "2000", "--C", "3"}) == 0);

    REQUIRE(cli::run({"--out", base + ".k.json", "estimate-k", "--series", base + ".csv", "--C",
                      "3", "--variant", "7"}) == 0);
    auto kj = cm3::load_json_file(base + ".k.json");
    CHECK(kj.at("K").get<int>() >= 1);
    CHECK(kj.at("sizes").size() > 0);

    REQUIRE(cli::run({"--out", base + ".blocks.json", "extract", "--series", base + ".csv",
                      "--K", "2", "--Q", "auto", "--C", "3"}) == 0);
    auto blocks = blocks_from_json(cm3::load_json_file(base + ".blocks.json"));
    REQUIRE_FALSE(blocks.empty());

    REQUIRE(cli::run({"--out", base + ".l.json", "estimate-l", "--blocks", base + ".blocks.json",
                      "--variant", "2"}) == 0);
    auto lj = cm3::load_json_file(base + ".l.json");
    CHECK(lj.at("L").get<int>() >= 1);
    CHECK(lj.contains("per_k_metrics"));

    REQUIRE(cli::run({"--out", base + ".fit.json", "fit", "--series", base + ".csv", "--C",
                      "3"}) == 0);
    auto report = report_from_json(cm3::load_json_file(base + ".fit.json"));
    REQUIRE(validate(report.fitted).empty());

    REQUIRE(cli::run({"--out", base + ".scored.json", "evaluate", "--truth",
                      base + ".params.json", "--report", base + ".fit.json"}) == 0);
    auto scored = cm3::load_json_file(base + ".scored.json");
    CHECK(scored.contains("k_correct"));
    CHECK(scored.contains("l_correct"));
}

TEST_CASE("theory subcommand prints the closed forms", "[cli]") {
    auto dir = scratch();
    auto p = random_parameter_set(2, 2, 2, 4.0, 5);
    write_params(dir + "/theta.params.json", p);
    REQUIRE(cli::run({"--out", dir + "/theory.json", "theory", "--params",
                      dir + "/theta.params.json"}) == 0);
    auto j = cm3::load_json_file(dir + "/theory.json");
    CHECK(j.at("theta").get<double>() == Catch::Approx(extremal_index(p)));
    CHECK(j.at("p").size() == 2);
    CHECK(j.at("bounds").at("global_lower").get<double>() > 0.0);
}

TEST_CASE("benchmark subcommand is byte-deterministic", "[cli]") {
    auto dir = scratch();
    json cfg = {{"C", {3.0}}, {"D", {2}},      {"K", {1, 2}}, {"L", {1}},
                {"T", {100}}, {"trials", 10},  {"seed", 21},  {"threads", 2}};
    cm3::write_text_file(dir + "/cfg.json", cfg.dump());
    REQUIRE(cli::run({"--out", dir + "/r1.csv", "benchmark", "k-success", "--config",
                      dir + "/cfg.json"}) == 0);
    REQUIRE(cli::run({"--out", dir + "/r2.csv", "benchmark", "k-success", "--config",
                      dir + "/cfg.json"}) == 0);
    CHECK(slurp(dir + "/r1.csv") == slurp(dir + "/r2.csv"));
    CHECK(slurp(dir + "/r1.csv").rfind("T,variant,trials,successes,proportion\n", 0) == 0);
}

TEST_CASE("usage errors exit with one", "[cli]") {
    CHECK(cli::run({"frobnicate"}) == 1);
    CHECK(cli::run({}) == 1);
    CHECK(cli::run({"estimate-k"}) == 1);  // missing required options
}

TEST_CASE("data errors exit with two", "[cli]") {
    auto dir = scratch();
    CHECK(cli::run({"estimate-k", "--series", dir + "/missing.csv", "--C", "3"}) == 2);
    cm3::write_text_file(dir + "/bad.csv", "not,a,series\n");
    CHECK(cli::run({"estimate-k", "--series", dir + "/bad.csv", "--C", "3"}) == 2);
}
