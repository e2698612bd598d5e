#include <algorithm>
#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "support/helpers.hpp"

using namespace cm3;

namespace {

const ClusterAlgorithm kAllAlgorithms[] = {
    ClusterAlgorithm::ward, ClusterAlgorithm::centroid, ClusterAlgorithm::kmeans_euclid,
    ClusterAlgorithm::kmeans_pearson, ClusterAlgorithm::pam};

ShapeTable table_from_rows(const std::vector<std::vector<double>>& rows) {
    ShapeTable t;
    t.Q = static_cast<int>(rows.size());
    t.K = static_cast<int>(rows[0].size());
    t.D = 1;
    t.rows = Mat(t.Q, t.K);
    for (int q = 0; q < t.Q; ++q)
        for (int c = 0; c < t.K; ++c) t.rows(q, c) = rows[q][c];
    return t;
}

// Groups of duplicated rows at mutually equidistant simplex vertices, so
// no partial clustering explains enough variance to stop the elbow early.
ShapeTable grouped_table(int groups, int per_group, int dim) {
    std::vector<std::vector<double>> rows;
    for (int g = 0; g < groups; ++g)
        for (int r = 0; r < per_group; ++r) {
            std::vector<double> row(static_cast<std::size_t>(std::max(dim, groups)), 0.0);
            row[g] = 10.0;
            rows.push_back(row);
        }
    return table_from_rows(rows);
}

}  // namespace

TEST_CASE("table layout places site vectors successively", "[cluster]") {
    BlockShape b;
    b.start = 1;
    b.norm = 1.0;
    b.matrix = Mat(2, 2);
    // rows = time: (1, .5) then (.3, .2)
    b.matrix(0, 0) = 1.0;
    b.matrix(0, 1) = 0.5;
    b.matrix(1, 0) = 0.3;
    b.matrix(1, 1) = 0.2;
    auto t = build_table({b});
    REQUIRE(t.Q == 1);
    CHECK(t.rows(0, 0) == 1.0);
    CHECK(t.rows(0, 1) == 0.3);
    CHECK(t.rows(0, 2) == 0.5);
    CHECK(t.rows(0, 3) == 0.2);

    // Round trip back to the block matrix.
    for (int d = 0; d < t.D; ++d)
        for (int i = 0; i < t.K; ++i) CHECK(t.rows(0, d * t.K + i) == b.matrix(i, d));
}

TEST_CASE("a table has one row per block", "[cluster]") {
    auto p = random_parameter_set(2, 2, 2, 4.0, 3);
    auto s = simulate(p, 300, 0.0, 9);
    auto blocks = extract_blocks(s, 2, 7).blocks;
    auto t = build_table(blocks);
    CHECK(t.Q == static_cast<int>(blocks.size()));
}

TEST_CASE("k equal to Q gives singletons with zero SSE", "[cluster]") {
    auto t = grouped_table(3, 2, 4);
    for (auto algo : kAllAlgorithms) {
        auto model = cluster(t, algo, t.Q, 1);
        CHECK(model.sse_ratio == 0.0);
        std::vector<int> sorted = model.labels;
        std::sort(sorted.begin(), sorted.end());
        for (int q = 0; q < t.Q; ++q) REQUIRE(sorted[q] == q);
    }
}

TEST_CASE("k equal to one explains nothing", "[cluster]") {
    auto t = grouped_table(3, 3, 2);
    for (auto algo : kAllAlgorithms) {
        auto model = cluster(t, algo, 1, 1);
        CHECK(model.sse_ratio == 1.0);
        CHECK(model.total_silhouette_ratio == 0.0);
        REQUIRE_FALSE(model.flags.empty());
    }
}

TEST_CASE("well-separated blobs are recovered exactly by every algorithm", "[cluster]") {
    // Blobs differ both in location (for the Euclidean metrics) and in
    // shape (ascending vs descending, for the correlation metric).
    std::vector<std::vector<double>> rows;
    rng::Stream s(42);
    for (int i = 0; i < 8; ++i)
        rows.push_back({0.0 + 0.01 * s.next_uniform(), 1.0 + 0.01 * s.next_uniform(),
                        2.0 + 0.01 * s.next_uniform()});
    for (int i = 0; i < 8; ++i)
        rows.push_back({102.0 + 0.01 * s.next_uniform(), 101.0 + 0.01 * s.next_uniform(),
                        100.0 + 0.01 * s.next_uniform()});
    auto t = table_from_rows(rows);
    for (auto algo : kAllAlgorithms) {
        auto model = cluster(t, algo, 2, 7);
        for (int q = 1; q < 8; ++q) REQUIRE(model.labels[q] == model.labels[0]);
        for (int q = 9; q < 16; ++q) REQUIRE(model.labels[q] == model.labels[8]);
        REQUIRE(model.labels[0] != model.labels[8]);
    }
}

TEST_CASE("silhouette hand computation with squared distances", "[cluster]") {
    auto t = table_from_rows({{0}, {1}, {10}, {11}});
    std::vector<int> labels = {0, 0, 1, 1};
    auto sil = silhouette(t.rows, labels);
    // a(0) = 1, b(0) = (100 + 121)/2 = 110.5
    CHECK(sil.values[0] == Catch::Approx((110.5 - 1.0) / 110.5).epsilon(1e-12));
    CHECK(sil.values[0] == Catch::Approx(0.99095).margin(5e-6));
}

TEST_CASE("equidistant points get silhouette zero", "[cluster]") {
    auto t = table_from_rows({{0}, {2}, {4}, {6}});
    // Point 1 (value 2): own cluster {0}, other {4,6}? Construct symmetric case:
    auto t2 = table_from_rows({{0}, {4}, {8}});
    std::vector<int> labels = {0, 0, 1};
    auto sil = silhouette(t2.rows, labels);
    // a(1) = 16, b(1) = 16: equidistant between its own mate and the other cluster.
    CHECK(sil.values[1] == 0.0);
    (void)t;
}

TEST_CASE("duplicate clusters give silhouette one", "[cluster]") {
    auto t = table_from_rows({{0}, {0}, {5}, {5}});
    std::vector<int> labels = {0, 0, 1, 1};
    auto sil = silhouette(t.rows, labels);
    for (double v : sil.values) CHECK(v == 1.0);
    CHECK(sil.total_ratio == 1.0);
}

TEST_CASE("singleton clusters take silhouette zero", "[cluster]") {
    auto t = table_from_rows({{0}, {10}, {11}});
    std::vector<int> labels = {0, 1, 1};
    auto sil = silhouette(t.rows, labels);
    CHECK(sil.values[0] == 0.0);
}

TEST_CASE("silhouette values stay within bounds", "[cluster]") {
    rng::Stream s(17);
    for (int trial = 0; trial < 30; ++trial) {
        int Q = 3 + static_cast<int>(s.next_index(12));
        std::vector<std::vector<double>> rows;
        for (int q = 0; q < Q; ++q) rows.push_back({s.next_uniform(), s.next_uniform()});
        auto t = table_from_rows(rows);
        int k = 2 + static_cast<int>(s.next_index(static_cast<std::size_t>(Q - 1)));
        auto model = cluster(t, ClusterAlgorithm::kmeans_euclid, k, s.next_u64());
        for (double v : model.silhouettes) {
            REQUIRE(v >= -1.0);
            REQUIRE(v <= 1.0);
        }
        REQUIRE(model.total_silhouette_ratio >= -1.0);
        REQUIRE(model.total_silhouette_ratio <= 1.0);
    }
}

TEST_CASE("identical rows short-circuit to one pattern", "[cluster]") {
    auto t = table_from_rows({{1, 2}, {1, 2}, {1, 2}, {1, 2}});
    for (int v = 1; v <= 11; ++v) CHECK(estimate_l(t, v, 3) == 1);
    auto sel = select_k(t, ClusterAlgorithm::ward, SelectionCriterion::elbow, 3);
    REQUIRE_FALSE(sel.flags.empty());
    CHECK(sel.flags[0] == "variance-rule");
}

TEST_CASE("duplicate-row groups are found by both criteria", "[cluster]") {
    auto t5 = grouped_table(5, 4, 3);
    for (auto algo : kAllAlgorithms) {
        CHECK(select_k(t5, algo, SelectionCriterion::elbow, 5).k == 5);
        auto sel = select_k(t5, algo, SelectionCriterion::silhouette, 5);
        CHECK(sel.k == 5);
        REQUIRE_FALSE(sel.per_k.empty());
        CHECK(sel.per_k.back().silhouette_ratio == 1.0);
    }
    auto t3 = grouped_table(3, 5, 3);
    for (int v = 1; v <= 11; ++v) CHECK(estimate_l(t3, v, 9) == 3);
}

TEST_CASE("objective traces never increase", "[cluster]") {
    rng::Stream s(23);
    for (int trial = 0; trial < 15; ++trial) {
        int Q = 6 + static_cast<int>(s.next_index(10));
        std::vector<std::vector<double>> rows;
        for (int q = 0; q < Q; ++q)
            rows.push_back({10 * s.next_uniform(), 10 * s.next_uniform(), 10 * s.next_uniform()});
        auto t = table_from_rows(rows);
        int k = 2 + static_cast<int>(s.next_index(3));
        for (auto algo : {ClusterAlgorithm::kmeans_euclid, ClusterAlgorithm::kmeans_pearson,
                          ClusterAlgorithm::pam}) {
            auto model = cluster(t, algo, k, s.next_u64());
            for (std::size_t i = 1; i < model.objective_trace.size(); ++i)
                REQUIRE(model.objective_trace[i] <= model.objective_trace[i - 1] + 1e-9);
        }
    }
}

TEST_CASE("scalar outputs ignore label permutations", "[cluster]") {
    auto t = grouped_table(3, 3, 2);
    auto model = cluster(t, ClusterAlgorithm::ward, 3, 1);
    std::vector<int> permuted = model.labels;
    for (int& l : permuted) l = (l + 1) % 3;
    CHECK(detail::sse_ratio(t.rows, permuted, 3) ==
          Catch::Approx(model.sse_ratio).margin(1e-15));
    auto a = silhouette(t.rows, model.labels);
    auto b = silhouette(t.rows, permuted);
    CHECK(a.total_ratio == Catch::Approx(b.total_ratio).margin(1e-15));
}

TEST_CASE("pearson variant tolerates constant rows", "[cluster]") {
    auto t = table_from_rows({{1, 1, 1}, {2, 2, 2}, {1, 2, 3}, {3, 2, 1}, {1, 3, 2}});
    auto model = cluster(t, ClusterAlgorithm::kmeans_pearson, 2, 4);
    std::vector<int> counts(2, 0);
    for (int l : model.labels) {
        REQUIRE(l >= 0);
        REQUIRE(l < 2);
        ++counts[l];
    }
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    for (double v : model.representatives.v) CHECK(std::isfinite(v));
}

TEST_CASE("pam representatives are input rows", "[cluster]") {
    auto t = grouped_table(2, 4, 3);
    auto model = cluster(t, ClusterAlgorithm::pam, 2, 0);
    for (int c = 0; c < 2; ++c) {
        bool found = false;
        for (int q = 0; q < t.Q && !found; ++q) {
            bool same = true;
            for (int i = 0; i < t.rows.cols; ++i)
                same = same && model.representatives(c, i) == t.rows(q, i);
            found = same;
        }
        REQUIRE(found);
    }
}

TEST_CASE("cluster rejects invalid k", "[cluster]") {
    auto t = grouped_table(2, 2, 2);
    CHECK_THROWS_AS(cluster(t, ClusterAlgorithm::ward, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(cluster(t, ClusterAlgorithm::ward, 5, 0), std::invalid_argument);
}
