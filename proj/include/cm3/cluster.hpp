#pragma once

// Clustering of normalized block shapes and selection of the number of
// patterns: Ward and centroid-linkage agglomeration, k-means with squared
// Euclidean or Pearson-correlation distance, PAM, the elbow (SSE/SStot <=
// 0.20) and silhouette (TtSil/Q >= 0.85) stopping rules, and the eleven
// estimators of L including the consensus mode.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cm3/blocks.hpp"
#include "cm3/matrix.hpp"
#include "cm3/rng.hpp"

namespace cm3 {

struct ShapeTable {
    int Q = 0;
    int K = 0;
    int D = 0;
    Mat rows;  // Q x (K*D); row q holds the D site vectors of length K in site order
};

// Row layout: for each site d, the K values at that site, concatenated.
inline ShapeTable build_table(const std::vector<BlockShape>& blocks) {
    if (blocks.empty()) throw std::invalid_argument("build_table: no blocks");
    ShapeTable t;
    t.Q = static_cast<int>(blocks.size());
    t.K = blocks[0].matrix.rows;
    t.D = blocks[0].matrix.cols;
    t.rows = Mat(t.Q, t.K * t.D);
    for (int q = 0; q < t.Q; ++q) {
        const auto& m = blocks[q].matrix;
        if (m.rows != t.K || m.cols != t.D)
            throw std::invalid_argument("build_table: inconsistent block dimensions");
        for (int d = 0; d < t.D; ++d)
            for (int i = 0; i < t.K; ++i) t.rows(q, d * t.K + i) = m(i, d);
    }
    return t;
}

enum class ClusterAlgorithm { ward, centroid, kmeans_euclid, kmeans_pearson, pam };
enum class SelectionCriterion { elbow, silhouette };

inline const char* to_string(ClusterAlgorithm a) {
    switch (a) {
        case ClusterAlgorithm::ward: return "ward";
        case ClusterAlgorithm::centroid: return "centroid";
        case ClusterAlgorithm::kmeans_euclid: return "kmeans-euclid";
        case ClusterAlgorithm::kmeans_pearson: return "kmeans-pearson";
        case ClusterAlgorithm::pam: return "pam";
    }
    return "?";
}

struct ClusterModel {
    ClusterAlgorithm algorithm = ClusterAlgorithm::ward;
    int k = 1;
    std::vector<int> labels;  // 0-based, every cluster nonempty
    Mat representatives;      // k x (K*D); cluster means, medoid rows for PAM
    double sse_ratio = 0.0;
    std::vector<double> silhouettes;
    double total_silhouette_ratio = 0.0;
    std::vector<double> objective_trace;  // k-means/PAM objective per step
    std::vector<std::string> flags;
};

namespace detail {

inline double sqdist(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

inline Mat pairwise_sqdist(const Mat& rows) {
    Mat d(rows.rows, rows.rows, 0.0);
    for (int i = 0; i < rows.rows; ++i)
        for (int j = i + 1; j < rows.rows; ++j) {
            double v = sqdist(rows.row(i), rows.row(j), rows.cols);
            d(i, j) = v;
            d(j, i) = v;
        }
    return d;
}

// Relabels clusters 0..k-1 in order of each cluster's smallest member.
inline void canonicalize_labels(std::vector<int>& labels, int k) {
    std::vector<int> remap(static_cast<std::size_t>(k), -1);
    int next = 0;
    for (int& l : labels) {
        if (remap[l] < 0) remap[l] = next++;
        l = remap[l];
    }
}

// Agglomerative merges via Lance-Williams updates on squared distances;
// merge costs are Ward increments or squared centroid gaps.  The merged
// cluster keeps the smaller id; ties pick the lexicographically smallest
// active pair.
struct Agglomeration {
    int Q = 0;
    std::vector<std::pair<int, int>> merges;  // Q-1 pairs in merge order
};

inline Agglomeration agglomerate(const Mat& rows, bool ward) {
    const int Q = rows.rows;
    Agglomeration out;
    out.Q = Q;
    if (Q == 1) return out;
    Mat cost = pairwise_sqdist(rows);
    if (ward)
        for (double& v : cost.v) v *= 0.5;  // n_a n_b / (n_a + n_b) with singletons
    std::vector<int> size(static_cast<std::size_t>(Q), 1);
    std::vector<std::uint8_t> active(static_cast<std::size_t>(Q), 1);
    for (int step = 0; step < Q - 1; ++step) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < Q; ++i) {
            if (!active[i]) continue;
            for (int j = i + 1; j < Q; ++j)
                if (active[j] && cost(i, j) < best) {
                    best = cost(i, j);
                    bi = i;
                    bj = j;
                }
        }
        out.merges.emplace_back(bi, bj);
        const double dab = cost(bi, bj);
        const double na = size[bi], nb = size[bj];
        for (int c = 0; c < Q; ++c) {
            if (!active[c] || c == bi || c == bj) continue;
            const double nc = size[c];
            double v;
            if (ward)
                v = ((na + nc) * cost(bi, c) + (nb + nc) * cost(bj, c) - nc * dab) /
                    (na + nb + nc);
            else
                v = (na * cost(bi, c) + nb * cost(bj, c)) / (na + nb) -
                    na * nb * dab / ((na + nb) * (na + nb));
            cost(bi, c) = v;
            cost(c, bi) = v;
        }
        size[bi] += size[bj];
        active[bj] = 0;
    }
    return out;
}

inline std::vector<int> agglomeration_labels(const Agglomeration& agg, int k) {
    std::vector<int> parent(static_cast<std::size_t>(agg.Q));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int step = 0; step < agg.Q - k; ++step)
        parent[find(agg.merges[step].second)] = find(agg.merges[step].first);
    std::vector<int> labels(static_cast<std::size_t>(agg.Q));
    for (int q = 0; q < agg.Q; ++q) labels[q] = find(q);
    canonicalize_labels(labels, agg.Q);
    return labels;
}

// Rows standardized to centered unit norm, so squared distance equals
// 2 (1 - Pearson correlation).  Rows with zero variance are flagged and
// given distance-squared 2 (correlation distance 1) to everything.
struct PearsonView {
    Mat rows;
    std::vector<std::uint8_t> degenerate;
    static constexpr double kDegenerateSqdist = 2.0;
};

inline PearsonView pearson_standardize(const Mat& rows) {
    PearsonView out;
    out.rows = Mat(rows.rows, rows.cols, 0.0);
    out.degenerate.assign(static_cast<std::size_t>(rows.rows), 0);
    for (int q = 0; q < rows.rows; ++q) {
        double mean = 0.0;
        for (int c = 0; c < rows.cols; ++c) mean += rows(q, c);
        mean /= rows.cols;
        double norm2 = 0.0;
        for (int c = 0; c < rows.cols; ++c) {
            double v = rows(q, c) - mean;
            out.rows(q, c) = v;
            norm2 += v * v;
        }
        if (norm2 <= 0.0) {
            out.degenerate[q] = 1;
            for (int c = 0; c < rows.cols; ++c) out.rows(q, c) = 0.0;
        } else {
            double inv = 1.0 / std::sqrt(norm2);
            for (int c = 0; c < rows.cols; ++c) out.rows(q, c) *= inv;
        }
    }
    return out;
}

struct KMeansResult {
    std::vector<int> labels;
    std::vector<double> objective_trace;
};

// Lloyd iterations on the given point matrix; degenerate rows (Pearson
// zero-variance) sit at constant distance from every centroid and are
// excluded from centroid means.
inline KMeansResult kmeans(const Mat& pts, const std::vector<std::uint8_t>& degenerate,
                           double degenerate_sqdist, int k, std::uint64_t seed) {
    const int Q = pts.rows, dim = pts.cols;
    rng::Stream stream(rng::derive_seed(seed, "kmeans", static_cast<std::uint64_t>(k)));
    std::vector<int> pool(static_cast<std::size_t>(Q));
    std::iota(pool.begin(), pool.end(), 0);
    Mat centroids(k, dim);
    for (int c = 0; c < k; ++c) {
        std::size_t pick = c + stream.next_index(pool.size() - c);
        std::swap(pool[c], pool[pick]);
        for (int i = 0; i < dim; ++i) centroids(c, i) = pts(pool[c], i);
    }

    KMeansResult out;
    out.labels.assign(static_cast<std::size_t>(Q), -1);
    auto point_cost = [&](int q, int c) {
        return degenerate[q] ? degenerate_sqdist : sqdist(pts.row(q), centroids.row(c), dim);
    };
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        double obj = 0.0;
        for (int q = 0; q < Q; ++q) {
            int best = 0;
            double bd = point_cost(q, 0);
            for (int c = 1; c < k; ++c) {
                double d = point_cost(q, c);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            obj += bd;
            if (out.labels[q] != best) {
                out.labels[q] = best;
                changed = true;
            }
        }
        out.objective_trace.push_back(obj);
        if (!changed) break;

        Mat sums(k, dim, 0.0);
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int q = 0; q < Q; ++q) {
            if (degenerate[q]) continue;
            ++counts[out.labels[q]];
            for (int i = 0; i < dim; ++i) sums(out.labels[q], i) += pts(q, i);
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                for (int i = 0; i < dim; ++i) centroids(c, i) = sums(c, i) / counts[c];
            } else {
                // Reseed with the point farthest from its assigned centroid.
                int far_q = -1;
                double far_d = -1.0;
                for (int q = 0; q < Q; ++q) {
                    if (degenerate[q]) continue;
                    double d = sqdist(pts.row(q), centroids.row(out.labels[q]), dim);
                    if (d > far_d) {
                        far_d = d;
                        far_q = q;
                    }
                }
                if (far_q >= 0)
                    for (int i = 0; i < dim; ++i) centroids(c, i) = pts(far_q, i);
            }
        }
    }

    // Guarantee nonempty clusters even in degenerate tables: move the
    // farthest member out of the largest cluster into each empty one.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int l : out.labels) ++counts[l];
    for (int c = 0; c < k; ++c) {
        while (counts[c] == 0) {
            int donor = 0;
            for (int c2 = 1; c2 < k; ++c2)
                if (counts[c2] > counts[donor]) donor = c2;
            int move_q = -1;
            double far_d = -1.0;
            for (int q = 0; q < Q; ++q) {
                if (out.labels[q] != donor || counts[donor] <= 1) continue;
                double d = point_cost(q, donor);
                if (d > far_d) {
                    far_d = d;
                    move_q = q;
                }
            }
            if (move_q < 0) break;
            out.labels[move_q] = c;
            --counts[donor];
            ++counts[c];
        }
    }
    canonicalize_labels(out.labels, k);
    return out;
}

struct PamResult {
    std::vector<int> medoids;  // sorted row indices
    std::vector<int> labels;
    std::vector<double> objective_trace;
};

// Partitioning around medoids with plain Euclidean distance: greedy BUILD,
// then first-improvement SWAP scans in index order.
inline PamResult pam(const Mat& rows, int k) {
    const int Q = rows.rows;
    Mat dist = pairwise_sqdist(rows);
    for (double& v : dist.v) v = std::sqrt(v);

    std::vector<std::uint8_t> is_medoid(static_cast<std::size_t>(Q), 0);
    std::vector<int> medoids;
    medoids.reserve(static_cast<std::size_t>(k));
    {
        int best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (int i = 0; i < Q; ++i) {
            double c = 0.0;
            for (int j = 0; j < Q; ++j) c += dist(i, j);
            if (c < best_cost) {
                best_cost = c;
                best = i;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
    }
    std::vector<double> dnear(static_cast<std::size_t>(Q));
    for (int j = 0; j < Q; ++j) dnear[j] = dist(medoids[0], j);
    while (static_cast<int>(medoids.size()) < k) {
        int best = -1;
        double best_gain = -1.0;
        for (int c = 0; c < Q; ++c) {
            if (is_medoid[c]) continue;
            double gain = 0.0;
            for (int j = 0; j < Q; ++j) {
                double diff = dnear[j] - dist(c, j);
                if (diff > 0.0) gain += diff;
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
        for (int j = 0; j < Q; ++j) dnear[j] = std::min(dnear[j], dist(best, j));
    }
    std::sort(medoids.begin(), medoids.end());

    auto total_cost = [&](const std::vector<int>& med) {
        double c = 0.0;
        for (int j = 0; j < Q; ++j) {
            double m = dist(med[0], j);
            for (std::size_t i = 1; i < med.size(); ++i) m = std::min(m, dist(med[i], j));
            c += m;
        }
        return c;
    };

    PamResult out;
    double cost = total_cost(medoids);
    out.objective_trace.push_back(cost);
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t mi = 0; mi < medoids.size() && !improved; ++mi) {
            for (int h = 0; h < Q && !improved; ++h) {
                if (is_medoid[h]) continue;
                std::vector<int> cand = medoids;
                cand[mi] = h;
                double c = total_cost(cand);
                if (c < cost - 1e-12) {
                    is_medoid[medoids[mi]] = 0;
                    is_medoid[h] = 1;
                    medoids = cand;
                    std::sort(medoids.begin(), medoids.end());
                    cost = c;
                    out.objective_trace.push_back(cost);
                    improved = true;
                }
            }
        }
    }

    out.labels.assign(static_cast<std::size_t>(Q), 0);
    for (int j = 0; j < Q; ++j) {
        int best = 0;
        double bd = dist(medoids[0], j);
        for (std::size_t i = 1; i < medoids.size(); ++i)
            if (dist(medoids[i], j) < bd) {
                bd = dist(medoids[i], j);
                best = static_cast<int>(i);
            }
        out.labels[j] = best;
    }
    // Medoids own their cluster even when a duplicate row ties at zero.
    for (std::size_t i = 0; i < medoids.size(); ++i)
        out.labels[medoids[i]] = static_cast<int>(i);
    out.medoids = medoids;
    return out;
}

// SSE / SStot with the per-variable variance formula: within-cluster sum of
// (nbobs-1) * s^2 per variable over (Q-1) * total per-variable variance.
inline double sse_ratio(const Mat& rows, const std::vector<int>& labels, int k) {
    const int Q = rows.rows, dim = rows.cols;
    std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
    for (int q = 0; q < Q; ++q)
        for (int c = 0; c < dim; ++c) mean[c] += rows(q, c);
    for (double& m : mean) m /= Q;
    double sstot = 0.0;
    for (int q = 0; q < Q; ++q)
        for (int c = 0; c < dim; ++c) {
            double v = rows(q, c) - mean[c];
            sstot += v * v;
        }
    Mat csum(k, dim, 0.0);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int q = 0; q < Q; ++q) {
        ++counts[labels[q]];
        for (int c = 0; c < dim; ++c) csum(labels[q], c) += rows(q, c);
    }
    double sse = 0.0;
    for (int q = 0; q < Q; ++q) {
        int l = labels[q];
        if (counts[l] <= 1) continue;
        for (int c = 0; c < dim; ++c) {
            double v = rows(q, c) - csum(l, c) / counts[l];
            sse += v * v;
        }
    }
    if (sstot <= 0.0) return k == 1 ? 1.0 : 0.0;
    return sse / sstot;
}

inline std::vector<double> silhouette_from_sqdist(const Mat& d2, const std::vector<int>& labels,
                                                  int k) {
    const int Q = d2.rows;
    std::vector<double> out(static_cast<std::size_t>(Q), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[l];
    std::vector<double> sums(static_cast<std::size_t>(k));
    for (int q = 0; q < Q; ++q) {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (int j = 0; j < Q; ++j)
            if (j != q) sums[labels[j]] += d2(q, j);
        const int own = labels[q];
        if (counts[own] <= 1) {
            out[q] = 0.0;  // singleton convention
            continue;
        }
        double a = sums[own] / (counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || counts[c] == 0) continue;
            b = std::min(b, sums[c] / counts[c]);
        }
        if (!std::isfinite(b)) {
            out[q] = 0.0;
            continue;
        }
        double m = std::max(a, b);
        out[q] = m > 0.0 ? (b - a) / m : 0.0;
    }
    return out;
}

}  // namespace detail

struct SilhouetteResult {
    std::vector<double> values;
    double total_ratio = 0.0;
    std::vector<std::string> flags;
};

// Silhouettes with the squared Euclidean distance; a single cluster makes
// the quantity undefined and yields all zeros with a diagnostic.
inline SilhouetteResult silhouette(const Mat& rows, const std::vector<int>& labels) {
    if (rows.rows < 1 || labels.size() != static_cast<std::size_t>(rows.rows))
        throw std::invalid_argument("silhouette: label/row mismatch");
    int k = 1 + *std::max_element(labels.begin(), labels.end());
    SilhouetteResult out;
    if (k < 2) {
        out.values.assign(labels.size(), 0.0);
        out.total_ratio = 0.0;
        out.flags.push_back("silhouette undefined for a single cluster");
        return out;
    }
    Mat d2 = detail::pairwise_sqdist(rows);
    out.values = detail::silhouette_from_sqdist(d2, labels, k);
    out.total_ratio =
        std::accumulate(out.values.begin(), out.values.end(), 0.0) / rows.rows;
    return out;
}

inline ClusterModel cluster(const ShapeTable& table, ClusterAlgorithm algorithm, int k,
                            std::uint64_t seed = 0) {
    const int Q = table.Q;
    if (k < 1 || k > Q) throw std::invalid_argument("cluster: need 1 <= k <= Q");
    ClusterModel model;
    model.algorithm = algorithm;
    model.k = k;
    switch (algorithm) {
        case ClusterAlgorithm::ward:
        case ClusterAlgorithm::centroid: {
            auto agg = detail::agglomerate(table.rows, algorithm == ClusterAlgorithm::ward);
            model.labels = detail::agglomeration_labels(agg, k);
            break;
        }
        case ClusterAlgorithm::kmeans_euclid: {
            std::vector<std::uint8_t> none(static_cast<std::size_t>(Q), 0);
            auto r = detail::kmeans(table.rows, none, 0.0, k, seed);
            model.labels = std::move(r.labels);
            model.objective_trace = std::move(r.objective_trace);
            break;
        }
        case ClusterAlgorithm::kmeans_pearson: {
            auto view = detail::pearson_standardize(table.rows);
            auto r = detail::kmeans(view.rows, view.degenerate,
                                    detail::PearsonView::kDegenerateSqdist, k, seed);
            model.labels = std::move(r.labels);
            model.objective_trace = std::move(r.objective_trace);
            break;
        }
        case ClusterAlgorithm::pam: {
            auto r = detail::pam(table.rows, k);
            model.labels = std::move(r.labels);
            model.objective_trace = std::move(r.objective_trace);
            model.representatives = Mat(k, table.rows.cols);
            for (int c = 0; c < k; ++c)
                for (int i = 0; i < table.rows.cols; ++i)
                    model.representatives(c, i) = table.rows(r.medoids[c], i);
            break;
        }
    }
    if (algorithm != ClusterAlgorithm::pam) {
        model.representatives = Mat(k, table.rows.cols, 0.0);
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int q = 0; q < Q; ++q) {
            ++counts[model.labels[q]];
            for (int i = 0; i < table.rows.cols; ++i)
                model.representatives(model.labels[q], i) += table.rows(q, i);
        }
        for (int c = 0; c < k; ++c)
            for (int i = 0; i < table.rows.cols; ++i) model.representatives(c, i) /= counts[c];
    }
    model.sse_ratio = detail::sse_ratio(table.rows, model.labels, k);
    auto sil = silhouette(table.rows, model.labels);
    model.silhouettes = std::move(sil.values);
    model.total_silhouette_ratio = sil.total_ratio;
    for (auto& f : sil.flags) model.flags.push_back(std::move(f));
    return model;
}

struct SelectionResult {
    int k = 1;
    std::vector<std::string> flags;
    struct PerK {
        int k;
        double sse_ratio;
        double silhouette_ratio;
    };
    std::vector<PerK> per_k;
};

constexpr double kElbowStop = 0.20;
constexpr double kSilhouetteStop = 0.85;
constexpr double kVarianceRuleThreshold = 0.005;
constexpr int kMaxClusterSearch = 30;

// Smallest k meeting the criterion, after the L=1 short-circuit: when the
// sample variance of every table variable is below 0.005 the table is a
// single pattern and both criteria are bypassed.
inline SelectionResult select_k(const ShapeTable& table, ClusterAlgorithm algorithm,
                                SelectionCriterion criterion, std::uint64_t seed = 0) {
    SelectionResult out;
    const int Q = table.Q;
    // Trimming each tail keeps the rule usable when a few extracted blocks
    // are contaminated straddles of two events; a genuine second pattern
    // occupies far more than the trimmed share.
    const int trim = Q >= 20 ? (Q + 19) / 20 : 0;
    bool all_small = true;
    if (Q > 1) {
        std::vector<double> col(static_cast<std::size_t>(Q));
        for (int c = 0; c < table.rows.cols && all_small; ++c) {
            for (int q = 0; q < Q; ++q) col[q] = table.rows(q, c);
            std::sort(col.begin(), col.end());
            const int lo = trim, hi = Q - trim;
            double mean = 0.0;
            for (int q = lo; q < hi; ++q) mean += col[q];
            mean /= (hi - lo);
            double ss = 0.0;
            for (int q = lo; q < hi; ++q) {
                double v = col[q] - mean;
                ss += v * v;
            }
            if (ss / (hi - lo - 1) >= kVarianceRuleThreshold) all_small = false;
        }
    }
    if (all_small) {
        out.k = 1;
        out.flags.push_back("variance-rule");
        return out;
    }

    const int k_max = std::min(Q, kMaxClusterSearch);
    const int k_first = criterion == SelectionCriterion::silhouette ? 2 : 1;
    int best_k = k_first;
    double best_value = criterion == SelectionCriterion::silhouette
                            ? -std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::infinity();
    for (int k = k_first; k <= k_max; ++k) {
        ClusterModel model = cluster(table, algorithm, k, seed);
        out.per_k.push_back({k, model.sse_ratio, model.total_silhouette_ratio});
        if (criterion == SelectionCriterion::elbow) {
            if (model.sse_ratio <= kElbowStop) {
                out.k = k;
                return out;
            }
            if (model.sse_ratio < best_value) {
                best_value = model.sse_ratio;
                best_k = k;
            }
        } else {
            if (model.total_silhouette_ratio >= kSilhouetteStop) {
                out.k = k;
                return out;
            }
            if (model.total_silhouette_ratio > best_value) {
                best_value = model.total_silhouette_ratio;
                best_k = k;
            }
        }
    }
    out.k = best_k;
    out.flags.push_back("criterion-unmet");
    return out;
}

inline ClusterAlgorithm algorithm_for_l_variant(int variant) {
    switch (variant) {
        case 1:
        case 2: return ClusterAlgorithm::ward;
        case 3:
        case 4: return ClusterAlgorithm::centroid;
        case 5:
        case 6: return ClusterAlgorithm::kmeans_euclid;
        case 7:
        case 8: return ClusterAlgorithm::kmeans_pearson;
        case 9:
        case 10: return ClusterAlgorithm::pam;
        default: throw std::invalid_argument("estimate_l: variant must be in 1..11");
    }
}

inline SelectionCriterion criterion_for_l_variant(int variant) {
    if (variant < 1 || variant > 10)
        throw std::invalid_argument("estimate_l: variant must be in 1..11");
    return variant % 2 == 1 ? SelectionCriterion::elbow : SelectionCriterion::silhouette;
}

inline int estimate_l(const ShapeTable& table, int variant, std::uint64_t seed = 0);

// All eleven estimates; index v-1 holds variant v, the last is the consensus
// mode of the first ten (ties toward the smaller value).
inline std::array<int, 11> estimate_l_all(const ShapeTable& table, std::uint64_t seed = 0) {
    std::array<int, 11> out{};
    for (int v = 1; v <= 10; ++v)
        out[v - 1] =
            select_k(table, algorithm_for_l_variant(v), criterion_for_l_variant(v), seed).k;
    std::map<int, int> counts;
    for (int v = 0; v < 10; ++v) ++counts[out[v]];
    int best = out[0], best_count = 0;
    for (const auto& [value, count] : counts)
        if (count > best_count) {
            best = value;
            best_count = count;
        }
    out[10] = best;
    return out;
}

inline int estimate_l(const ShapeTable& table, int variant, std::uint64_t seed) {
    if (table.Q < 1) throw std::invalid_argument("estimate_l: empty table");
    if (variant == 11) return estimate_l_all(table, seed)[10];
    return select_k(table, algorithm_for_l_variant(variant), criterion_for_l_variant(variant),
                    seed)
        .k;
}

}  // namespace cm3
