#pragma once

// Exceedance marking over the max/C threshold, runs declustering with r=0,
// and the eight cluster-size estimators of the temporal dependence length K.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "cm3/simulate.hpp"

namespace cm3 {

enum class ThresholdMode { scalar, multivariate };

struct ExceedanceMarks {
    ThresholdMode mode = ThresholdMode::scalar;
    int T = 0;
    int D = 1;  // 1 in scalar mode
    std::vector<std::uint8_t> marks;  // row-major T x D

    bool at(int t, int d = 0) const { return marks[static_cast<std::size_t>(t) * D + d] != 0; }
};

struct ClusterSizeSequence {
    std::vector<int> sizes;
    ThresholdMode source = ThresholdMode::scalar;
};

// Scalar mode thresholds the sup-norm series at max/C; multivariate mode
// thresholds each site at its own column max over C.  The column maximum
// itself is always marked, which keeps C = 1 (argmax only) well defined.
inline ExceedanceMarks mark_exceedances(const SeriesSample& s, double C, ThresholdMode mode) {
    if (s.T < 1) throw std::invalid_argument("mark_exceedances: empty series");
    if (!(C >= 1.0)) throw std::invalid_argument("mark_exceedances: C must be >= 1");
    ExceedanceMarks out;
    out.mode = mode;
    out.T = s.T;
    if (mode == ThresholdMode::scalar) {
        out.D = 1;
        auto sup = sup_norm_series(s);
        double mx = *std::max_element(sup.begin(), sup.end());
        double thr = mx / C;
        out.marks.resize(static_cast<std::size_t>(s.T));
        for (int t = 0; t < s.T; ++t) out.marks[t] = (sup[t] > thr || sup[t] == mx) ? 1 : 0;
    } else {
        out.D = s.D;
        out.marks.assign(static_cast<std::size_t>(s.T) * s.D, 0);
        for (int d = 0; d < s.D; ++d) {
            double mx = s.at(0, d);
            for (int t = 1; t < s.T; ++t) mx = std::max(mx, s.at(t, d));
            double thr = mx / C;
            for (int t = 0; t < s.T; ++t) {
                double v = s.at(t, d);
                if (v > thr || v == mx) out.marks[static_cast<std::size_t>(t) * s.D + d] = 1;
            }
        }
    }
    return out;
}

// Maximal runs of consecutive marks; multivariate marks are scanned per
// site column in d order and all run lengths pooled into one sequence.
inline ClusterSizeSequence run_lengths(const ExceedanceMarks& m) {
    ClusterSizeSequence out;
    out.source = m.mode;
    for (int d = 0; d < m.D; ++d) {
        int run = 0;
        for (int t = 0; t < m.T; ++t) {
            if (m.at(t, d)) {
                ++run;
            } else if (run > 0) {
                out.sizes.push_back(run);
                run = 0;
            }
        }
        if (run > 0) out.sizes.push_back(run);
    }
    return out;
}

namespace detail {

inline double mean_of(const std::vector<int>& v) {
    double s = 0.0;
    for (int x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double median_of(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Most frequent run length; ties resolve toward the larger value, since
// partial marking fragments a dependence window into shorter runs and the
// longer candidate is the structural one.
inline int mode_of(const std::vector<int>& v) {
    std::map<int, int> counts;
    for (int x : v) ++counts[x];
    int best = v.front(), best_count = 0;
    for (const auto& [value, count] : counts)
        if (count >= best_count) {
            best = value;
            best_count = count;
        }
    return best;
}

// Half away from zero; run lengths are positive so floor(x + 0.5) suffices.
inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace detail

// Applies estimator variant 1..8 to a precomputed size sequence.  Variants
// map to statistics as: 1/3 ceil(mean), 2/4 round(mean), 5/6 ceil(median),
// 7/8 mode; odd variants are the scalar scan, even the multivariate one,
// which only changes where the sizes come from.
inline int estimate_k_from_sizes(const std::vector<int>& sizes, int variant) {
    if (sizes.empty()) throw std::invalid_argument("estimate_k: empty cluster-size sequence");
    switch (variant) {
        case 1:
        case 3:
            return static_cast<int>(std::ceil(detail::mean_of(sizes)));
        case 2:
        case 4:
            return detail::round_half_up(detail::mean_of(sizes));
        case 5:
        case 6:
            return static_cast<int>(std::ceil(detail::median_of(sizes)));
        case 7:
        case 8:
            return detail::mode_of(sizes);
        default:
            throw std::invalid_argument("estimate_k: variant must be in 1..8");
    }
}

inline ThresholdMode k_variant_mode(int variant) {
    switch (variant) {
        case 1:
        case 2:
        case 5:
        case 7:
            return ThresholdMode::scalar;
        case 3:
        case 4:
        case 6:
        case 8:
            return ThresholdMode::multivariate;
        default:
            throw std::invalid_argument("estimate_k: variant must be in 1..8");
    }
}

inline int estimate_k(const SeriesSample& s, double C, int variant) {
    auto sizes = run_lengths(mark_exceedances(s, C, k_variant_mode(variant)));
    return estimate_k_from_sizes(sizes.sizes, variant);
}

// All eight estimators from two scans; used by the benchmark harness.
inline std::array<int, 8> estimate_k_all(const SeriesSample& s, double C) {
    auto scalar = run_lengths(mark_exceedances(s, C, ThresholdMode::scalar));
    auto multi = run_lengths(mark_exceedances(s, C, ThresholdMode::multivariate));
    std::array<int, 8> out{};
    for (int v = 1; v <= 8; ++v) {
        const auto& sizes =
            (k_variant_mode(v) == ThresholdMode::scalar) ? scalar.sizes : multi.sizes;
        out[v - 1] = estimate_k_from_sizes(sizes, v);
    }
    return out;
}

}  // namespace cm3
