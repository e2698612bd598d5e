#pragma once

// Closed-form quantities of the moving-maxima model: the minima matrices
// behind the block-profile probability, its harmonic-mean expression and
// variation bounds, the minimum sample size, and the extremal index with a
// Monte Carlo cross-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cm3/matrix.hpp"
#include "cm3/parameters.hpp"
#include "cm3/simulate.hpp"

namespace cm3 {

// Minima matrix of one target pattern l*: rows l = 0..L-1, columns
// k = 1..2K-1 (stored 0-based).  Entry (l,k) is the minimum over sites d
// and over lag pairs (u,v) with v - u = K - k of
//   shape_{l*}(u, d) / shape_l(v, d).
// The (l = l*, k = K) entry equals 1 by construction.
struct MinimaMatrix {
    int K = 0;
    int L = 0;
    Mat m;  // L x (2K-1)

    double at(int l, int k) const { return m(l, k - 1); }  // k is 1-based
};

namespace detail {
inline void require_positive_shapes(const std::vector<Mat>& shapes) {
    if (shapes.empty()) throw std::invalid_argument("minima_matrix: no shapes");
    const int K = shapes[0].rows, D = shapes[0].cols;
    for (const auto& s : shapes) {
        if (s.rows != K || s.cols != D)
            throw std::invalid_argument("minima_matrix: inconsistent shape dimensions");
        for (double v : s.v)
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("minima_matrix: non-positive entry");
    }
}
}  // namespace detail

// Accepts un-normalized shape lists (L matrices of K rows x D sites).
inline MinimaMatrix minima_matrix(const std::vector<Mat>& shapes, int lstar) {
    detail::require_positive_shapes(shapes);
    const int L = static_cast<int>(shapes.size());
    const int K = shapes[0].rows, D = shapes[0].cols;
    if (lstar < 0 || lstar >= L) throw std::invalid_argument("minima_matrix: bad target index");
    MinimaMatrix out;
    out.K = K;
    out.L = L;
    out.m = Mat(L, 2 * K - 1);
    for (int k = 1; k <= 2 * K - 1; ++k) {
        const int delta = K - k;  // v - u on line k
        const int u_lo = std::max(0, -delta);
        const int u_hi = std::min(K - 1, K - 1 - delta);
        for (int l = 0; l < L; ++l) {
            double mn = std::numeric_limits<double>::infinity();
            for (int u = u_lo; u <= u_hi; ++u) {
                const int v = u + delta;
                for (int d = 0; d < D; ++d)
                    mn = std::min(mn, shapes[lstar](u, d) / shapes[l](v, d));
            }
            out.m(l, k - 1) = mn;
        }
    }
    return out;
}

inline std::vector<MinimaMatrix> minima_matrices(const std::vector<Mat>& shapes) {
    std::vector<MinimaMatrix> out;
    out.reserve(shapes.size());
    for (int l = 0; l < static_cast<int>(shapes.size()); ++l)
        out.push_back(minima_matrix(shapes, l));
    return out;
}

// Plain harmonic mean of all (2K-1)L entries.
inline double harmonic_mean(const MinimaMatrix& mm) {
    double recip = 0.0;
    for (double v : mm.m.v) recip += 1.0 / v;
    return static_cast<double>(mm.m.v.size()) / recip;
}

// p^(l*) = harm(minima) / ((2K-1)L): the probability that a random K-block
// reveals pattern l* exactly.
inline double profile_probability_from_minima(const MinimaMatrix& mm) {
    return harmonic_mean(mm) / static_cast<double>(mm.m.v.size());
}

// Same probability through the reciprocal-sum form
// 1 / (1 + sum over (k,l) != (K,l*) of 1/m); agrees with the harmonic-mean
// form within rounding.
inline double profile_probability_reciprocal_form(const MinimaMatrix& mm, int lstar) {
    double s = 1.0;
    for (int l = 0; l < mm.L; ++l)
        for (int k = 1; k <= 2 * mm.K - 1; ++k) {
            if (l == lstar && k == mm.K) continue;
            s += 1.0 / mm.at(l, k);
        }
    return 1.0 / s;
}

inline double profile_probability(const ParameterSet& params, int lstar) {
    require_valid(params);
    return profile_probability_from_minima(minima_matrix(params.patterns(), lstar));
}

inline std::vector<double> profile_probabilities(const ParameterSet& params) {
    require_valid(params);
    auto shapes = params.patterns();
    std::vector<double> out(static_cast<std::size_t>(params.L));
    for (int l = 0; l < params.L; ++l)
        out[l] = profile_probability_from_minima(minima_matrix(shapes, l));
    return out;
}

struct ProfileProbabilityBounds {
    std::vector<double> lower;  // 1 / (C^(l*) (2K-1) L)
    std::vector<double> upper;  // C^(l*) / ((2K-1) L)
    double global_lower = 0.0;  // 1 / (C (2K-1)); free of L and of the site count
};

inline ProfileProbabilityBounds profile_probability_bounds(const VariationBound& c, int K,
                                                           int L) {
    if (K < 1 || L < 1) throw std::invalid_argument("profile_probability_bounds: bad K or L");
    for (double v : c.per_pattern)
        if (!(v >= 1.0)) throw std::invalid_argument("profile_probability_bounds: C entries must be >= 1");
    ProfileProbabilityBounds out;
    const double denom = static_cast<double>(2 * K - 1) * L;
    out.lower.reserve(c.per_pattern.size());
    out.upper.reserve(c.per_pattern.size());
    for (double ci : c.per_pattern) {
        out.lower.push_back(1.0 / (ci * denom));
        out.upper.push_back(ci / denom);
    }
    out.global_lower = 1.0 / (c.global * (2 * K - 1));
    return out;
}

// Minimum chain length to expect at least M repetitions of a particular
// profile knowing only the variation bound C: T = K - 1 + C M (2K - 1).
inline long long min_sample_size(double C, int K, int M) {
    if (!(C >= 1.0) || K < 1 || M < 1)
        throw std::invalid_argument("min_sample_size: need C >= 1, K >= 1, M >= 1");
    return K - 1 + static_cast<long long>(std::ceil(C * M * (2.0 * K - 1.0)));
}

// theta = (sum_j max_i ||a_i^(j)||_inf) / (sum_j sum_i ||a_i^(j)||_inf).
inline double extremal_index(const ParameterSet& params) {
    require_valid(params);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < params.L; ++j) {
        double best = 0.0;
        for (int i = 0; i < params.K; ++i) {
            double w = params.sup_norm(j, i);
            best = std::max(best, w);
            den += w;
        }
        num += best;
    }
    return num / den;
}

// Monte Carlo estimates of the extremal index.
//   theta_tail:    -x log P_hat(max_{1..n} ||X_t||_inf <= n x S), where
//                  S = sum of the sup norms is the tail scale of the
//                  sup-norm series (P(||X_1|| <= z) = exp(-S/z)); levels are
//                  measured in that marginal scale so the limit is e^(-theta/x).
//   theta_cluster: reciprocal mean cluster size, estimated as
//                  P_hat(M_r > u) / (r P_hat(||X|| > u)) with u = n x S and
//                  window length r = max(4K, floor(sqrt(n))).
struct ExtremalIndexMC {
    std::optional<double> theta_tail;
    std::optional<double> theta_cluster;
    int successes = 0;  // trials with max below the level
    int trials = 0;
    std::vector<std::string> flags;
};

inline ExtremalIndexMC mc_extremal_index(const ParameterSet& params, int n, double x, int N,
                                         std::uint64_t seed) {
    require_valid(params);
    if (n < 1 || N < 1 || !(x > 0.0))
        throw std::invalid_argument("mc_extremal_index: need n >= 1, N >= 1, x > 0");
    ExtremalIndexMC out;
    out.trials = N;
    double scale = 0.0;
    for (int j = 0; j < params.L; ++j)
        for (int i = 0; i < params.K; ++i) scale += params.sup_norm(j, i);
    const double level = static_cast<double>(n) * x * scale;
    const int r = std::max(4 * params.K, static_cast<int>(std::sqrt(static_cast<double>(n))));
    long long windows_total = 0, windows_hit = 0;
    long long points_total = 0, points_hit = 0;
    std::vector<double> row(static_cast<std::size_t>(params.D));
    for (int trial = 0; trial < N; ++trial) {
        SeriesGenerator gen(params, 0.0, rng::derive_seed(seed, "mc-extremal", trial));
        bool below = true;
        int win_pos = 0;
        bool win_hit = false;
        for (int t = 0; t < n; ++t) {
            gen.next_row(row.data());
            double sup = row[0];
            for (int d = 1; d < params.D; ++d) sup = std::max(sup, row[d]);
            if (sup > level) below = false;
            ++points_total;
            if (sup > level) {
                ++points_hit;
                win_hit = true;
            }
            if (++win_pos == r) {
                ++windows_total;
                if (win_hit) ++windows_hit;
                win_pos = 0;
                win_hit = false;
            }
        }
        if (below) ++out.successes;
    }
    if (out.successes == 0)
        out.flags.push_back("theta_tail undefined: no trial stayed below the level");
    else
        out.theta_tail = -x * std::log(static_cast<double>(out.successes) / N);
    if (points_hit == 0 || windows_total == 0)
        out.flags.push_back("theta_cluster undefined: no exceedance observed");
    else
        out.theta_cluster = (static_cast<double>(windows_hit) / windows_total) /
                            (static_cast<double>(r) * points_hit / points_total);
    return out;
}

}  // namespace cm3
