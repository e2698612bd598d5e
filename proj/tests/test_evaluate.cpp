#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "support/helpers.hpp"

using namespace cm3;

namespace {
std::vector<std::vector<double>> random_points(rng::Stream& s, int n, int dim) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < n; ++i) {
        std::vector<double> p(static_cast<std::size_t>(dim));
        for (auto& v : p) v = 10.0 * s.next_uniform();
        pts.push_back(std::move(p));
    }
    return pts;
}
}  // namespace

TEST_CASE("hausdorff basics", "[evaluate]") {
    CHECK(hausdorff_points({{0, 0}, {1, 1}}, {{0, 0}, {1, 1}}) == 0.0);
    CHECK(hausdorff_points({{0, 0}}, {{3, 4}}) == 5.0);
    // {0,2} vs {0}: directed distances 2 and 0.
    CHECK(hausdorff_points({{0}, {2}}, {{0}}) == 2.0);
}

TEST_CASE("hausdorff metric axioms on random sets", "[evaluate]") {
    rng::Stream s(2718);
    for (int trial = 0; trial < 1000; ++trial) {
        int dim = 1 + static_cast<int>(s.next_index(3));
        auto a = random_points(s, 1 + static_cast<int>(s.next_index(5)), dim);
        auto b = random_points(s, 1 + static_cast<int>(s.next_index(5)), dim);
        auto c = random_points(s, 1 + static_cast<int>(s.next_index(5)), dim);
        double ab = hausdorff_points(a, b);
        double ba = hausdorff_points(b, a);
        double ac = hausdorff_points(a, c);
        double bc = hausdorff_points(b, c);
        REQUIRE(hausdorff_points(a, a) == 0.0);
        REQUIRE(ab == ba);
        REQUIRE(ab >= 0.0);
        REQUIRE(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("profile distance ignores pattern order", "[evaluate]") {
    auto truth = random_parameter_set(2, 3, 2, 4.0, 5);
    auto estimate = random_parameter_set(2, 3, 2, 4.0, 6);
    double d = hausdorff_distance(truth, estimate);
    ParameterSet shuffled = estimate;
    for (int i = 0; i < estimate.K; ++i)
        for (int dd = 0; dd < estimate.D; ++dd) {
            std::swap(shuffled.a(0, i, dd), shuffled.a(2, i, dd));
        }
    CHECK(hausdorff_distance(truth, shuffled) == Catch::Approx(d).margin(1e-15));
    CHECK(hausdorff_distance(estimate, truth) == Catch::Approx(d).margin(1e-15));
}

TEST_CASE("different L is allowed, different K is not", "[evaluate]") {
    auto truth = random_parameter_set(2, 3, 2, 4.0, 7);
    auto fewer = random_parameter_set(2, 2, 2, 4.0, 8);
    CHECK(hausdorff_distance(truth, fewer) > 0.0);
    auto wrong_k = random_parameter_set(3, 3, 2, 4.0, 9);
    CHECK_THROWS_AS(hausdorff_distance(truth, wrong_k), std::invalid_argument);
}

TEST_CASE("wrong K is a hard failure without a distance", "[evaluate]") {
    auto truth = random_parameter_set(2, 2, 2, 4.0, 11);
    EstimationReport report;
    report.k_hat = 3;
    report.l_hat = 2;
    report.fitted = random_parameter_set(3, 2, 2, 4.0, 12);
    auto scored = evaluate_fit(truth, report);
    CHECK_FALSE(scored.k_correct);
    CHECK(scored.l_correct);
    CHECK_FALSE(scored.hausdorff.has_value());
}

TEST_CASE("a perfect fit scores distance zero", "[evaluate]") {
    auto truth = random_parameter_set(2, 2, 3, 4.0, 13);
    ShapeSet set;
    set.shapes = truth.patterns();
    for (auto& shape : set.shapes) {
        double norm = 0.0;
        for (int d = 0; d < truth.D; ++d) norm = std::max(norm, shape(0, d));
        for (double& v : shape.v) v /= norm;
    }
    set.frequencies = profile_probabilities(truth);
    auto trace = frequency_match(set);
    REQUIRE(trace.converged);
    EstimationReport report;
    report.k_hat = truth.K;
    report.l_hat = truth.L;
    report.fitted = renormalize(set, trace.final_alphas);
    auto scored = evaluate_fit(truth, report);
    REQUIRE(scored.hausdorff.has_value());
    CHECK(*scored.hausdorff < 1e-8);
}
