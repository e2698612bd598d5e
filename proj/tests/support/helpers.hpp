#pragma once

// Shared test utilities: independent oracles and simple statistics used to
// check the library against brute force and Monte Carlo.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cm3/cm3.hpp"

namespace testsupport {

// Kolmogorov-Smirnov distance of a sample against the unit-Frechet CDF.
inline double ks_distance_frechet(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double cdf = xs[i] > 0.0 ? std::exp(-1.0 / xs[i]) : 0.0;
        worst = std::max(worst, std::abs((i + 1) / n - cdf));
        worst = std::max(worst, std::abs(i / n - cdf));
    }
    return worst;
}

inline double total_variation(const std::vector<long long>& a, const std::vector<long long>& b) {
    double na = 0.0, nb = 0.0;
    for (auto v : a) na += static_cast<double>(v);
    for (auto v : b) nb += static_cast<double>(v);
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        tv += std::abs(a[i] / na - b[i] / nb);
    return 0.5 * tv;
}

// Brute-force minima oracle: scans every (u, v, d) triple with v - u = K - k
// instead of the implementation's pair-range bookkeeping.
inline double brute_minimum(const std::vector<cm3::Mat>& shapes, int lstar, int l, int k) {
    const int K = shapes[0].rows, D = shapes[0].cols;
    double mn = std::numeric_limits<double>::infinity();
    for (int u = 0; u < K; ++u)
        for (int v = 0; v < K; ++v) {
            if (v - u != K - k) continue;
            for (int d = 0; d < D; ++d)
                mn = std::min(mn, shapes[lstar](u, d) / shapes[l](v, d));
        }
    return mn;
}

// Whether the K-window starting at t (0-based) is proportional to pattern j
// at every site and lag, up to a tiny relative tolerance.
inline bool window_is_profile(const cm3::SeriesSample& s, const cm3::ParameterSet& p, int t,
                              int j) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < p.K; ++i)
        for (int d = 0; d < p.D; ++d) {
            double q = s.at(t + i, d) / p.a(j, i, d);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
    return hi <= lo * (1.0 + 1e-9);
}

// Monte Carlo oracle for the block-profile probability: the fraction of
// independent windows (spaced 2K apart) that realize each pattern exactly.
struct ProfileFrequency {
    std::vector<long long> counts;
    long long windows = 0;
};

inline ProfileFrequency mc_profile_frequency(const cm3::ParameterSet& p, long long n_windows,
                                             std::uint64_t seed) {
    const int K = p.K;
    const int T = static_cast<int>(2 * K * n_windows + K);
    auto s = cm3::simulate(p, T, 0.0, seed);
    ProfileFrequency out;
    out.counts.assign(static_cast<std::size_t>(p.L), 0);
    for (long long w = 0; w < n_windows; ++w) {
        int t = static_cast<int>(2 * K * w);
        for (int j = 0; j < p.L; ++j)
            if (window_is_profile(s, p, t, j)) {
                ++out.counts[j];
                break;
            }
        ++out.windows;
    }
    return out;
}

// Scratch directory for file-based tests.
inline std::string temp_dir() {
    auto base = std::filesystem::temp_directory_path() / "cm3-tests";
    std::filesystem::create_directories(base);
    return base.string();
}

}  // namespace testsupport
