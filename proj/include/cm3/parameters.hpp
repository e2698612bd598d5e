#pragma once

// Parameter sets of the moving-maxima model: the array a_i^(j)(x_d) with
// temporal length K, L patterns and D sites.  A standard set has strictly
// positive entries summing to 1 at every site.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cm3/matrix.hpp"
#include "cm3/rng.hpp"

namespace cm3 {

// Absolute tolerance on per-site sums; double-precision rescaling residue.
constexpr double kSiteSumTolerance = 1e-12;

struct ParameterSet {
    int K = 0;  // temporal dependence length, lags i = 0..K-1
    int L = 0;  // number of patterns, j = 0..L-1
    int D = 0;  // number of sites, d = 0..D-1
    // a(j,i,d), pattern-major then lag then site.
    std::vector<double> values;
    // Optional site coordinates in [0,1]^q; metadata only.
    std::optional<std::vector<std::vector<double>>> sites;

    std::size_t index(int j, int i, int d) const {
        return (static_cast<std::size_t>(j) * K + i) * D + d;
    }
    double a(int j, int i, int d) const { return values[index(j, i, d)]; }
    double& a(int j, int i, int d) { return values[index(j, i, d)]; }

    // K x D slice of one pattern (rows = lags, cols = sites).
    Mat pattern(int j) const {
        Mat m(K, D);
        for (int i = 0; i < K; ++i)
            for (int d = 0; d < D; ++d) m(i, d) = a(j, i, d);
        return m;
    }
    std::vector<Mat> patterns() const {
        std::vector<Mat> out;
        out.reserve(static_cast<std::size_t>(L));
        for (int j = 0; j < L; ++j) out.push_back(pattern(j));
        return out;
    }

    // Sup norm of one lag's function: max over sites of a(j,i,.).
    double sup_norm(int j, int i) const {
        double m = 0.0;
        for (int d = 0; d < D; ++d) m = std::max(m, a(j, i, d));
        return m;
    }
};

namespace detail {
inline std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}
}  // namespace detail

// Report-style validation: one message per violated invariant, empty iff valid.
inline std::vector<std::string> validate(const ParameterSet& p) {
    std::vector<std::string> out;
    if (p.K < 1 || p.L < 1 || p.D < 1) {
        out.push_back("dimensions must be positive (K=" + std::to_string(p.K) +
                      ", L=" + std::to_string(p.L) + ", D=" + std::to_string(p.D) + ")");
        return out;
    }
    const std::size_t expected = static_cast<std::size_t>(p.K) * p.L * p.D;
    if (p.values.size() != expected) {
        out.push_back("values size " + std::to_string(p.values.size()) +
                      " does not match K*L*D = " + std::to_string(expected));
        return out;
    }
    if (p.sites && p.sites->size() != static_cast<std::size_t>(p.D))
        out.push_back("sites size " + std::to_string(p.sites->size()) +
                      " does not match D = " + std::to_string(p.D));
    int bad = 0;
    for (int j = 0; j < p.L; ++j)
        for (int i = 0; i < p.K; ++i)
            for (int d = 0; d < p.D; ++d) {
                double v = p.a(j, i, d);
                if (!(v > 0.0) || !std::isfinite(v)) {
                    if (++bad <= 5)
                        out.push_back("non-positive entry at (j=" + std::to_string(j + 1) +
                                      ", i=" + std::to_string(i) + ", d=" + std::to_string(d + 1) +
                                      ") = " + detail::fmt_double(v));
                }
            }
    if (bad > 5) out.push_back(std::to_string(bad - 5) + " further non-positive entries");
    if (bad == 0) {
        for (int d = 0; d < p.D; ++d) {
            double s = 0.0;
            for (int j = 0; j < p.L; ++j)
                for (int i = 0; i < p.K; ++i) s += p.a(j, i, d);
            if (std::abs(s - 1.0) > kSiteSumTolerance)
                out.push_back("site " + std::to_string(d + 1) + " sum = " + detail::fmt_double(s));
        }
    }
    return out;
}

inline bool is_valid(const ParameterSet& p) { return validate(p).empty(); }

inline void require_valid(const ParameterSet& p) {
    auto report = validate(p);
    if (report.empty()) return;
    std::string msg = "invalid parameter set:";
    for (const auto& r : report) msg += " [" + r + "]";
    throw std::invalid_argument(msg);
}

// Smallest constants bounding all cross-ratios of parameter values at a
// common site.  per_pattern[l*] bounds a_k^(l*)(x)/a_k'^(l)(x) over all
// sites, lags and patterns l; global is their maximum.
struct VariationBound {
    std::vector<double> per_pattern;
    double global = 1.0;
};

inline VariationBound variation_bound(const ParameterSet& p) {
    require_valid(p);
    VariationBound out;
    out.per_pattern.assign(static_cast<std::size_t>(p.L), 1.0);
    for (int d = 0; d < p.D; ++d) {
        double all_min = p.a(0, 0, d), all_max = all_min;
        std::vector<double> pat_min(static_cast<std::size_t>(p.L)),
            pat_max(static_cast<std::size_t>(p.L));
        for (int j = 0; j < p.L; ++j) {
            double mn = p.a(j, 0, d), mx = mn;
            for (int i = 1; i < p.K; ++i) {
                double v = p.a(j, i, d);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            pat_min[j] = mn;
            pat_max[j] = mx;
            all_min = std::min(all_min, mn);
            all_max = std::max(all_max, mx);
        }
        for (int j = 0; j < p.L; ++j) {
            double c = std::max(pat_max[j] / all_min, all_max / pat_min[j]);
            out.per_pattern[j] = std::max(out.per_pattern[j], c);
        }
    }
    out.global = *std::max_element(out.per_pattern.begin(), out.per_pattern.end());
    return out;
}

// Draws a standard parameter set whose variation bound does not exceed
// c_target: raw entries uniform on [1/C, 1], each site column rescaled to
// sum 1 (rescaling preserves within-site ratios, hence the bound), and
// patterns canonicalized lexicographically so fixtures are stable.
inline ParameterSet random_parameter_set(int K, int L, int D, double c_target,
                                         std::uint64_t seed) {
    if (K < 1 || L < 1 || D < 1)
        throw std::invalid_argument("random_parameter_set: K, L, D must be >= 1");
    if (!(c_target >= 1.0))
        throw std::invalid_argument("random_parameter_set: C target must be >= 1");
    ParameterSet p;
    p.K = K;
    p.L = L;
    p.D = D;
    p.values.resize(static_cast<std::size_t>(K) * L * D);
    rng::Stream s(rng::derive_seed(seed, "params"));
    const double lo = 1.0 / c_target;
    for (int j = 0; j < L; ++j)
        for (int i = 0; i < K; ++i)
            for (int d = 0; d < D; ++d)
                p.a(j, i, d) = lo + s.next_uniform() * (1.0 - lo);
    for (int d = 0; d < D; ++d) {
        double sum = 0.0;
        for (int j = 0; j < L; ++j)
            for (int i = 0; i < K; ++i) sum += p.a(j, i, d);
        for (int j = 0; j < L; ++j)
            for (int i = 0; i < K; ++i) p.a(j, i, d) /= sum;
    }
    // Canonical pattern order: lexicographic by flattened (lag, site) values.
    std::vector<int> order(static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](int ja, int jb) {
        for (int i = 0; i < K; ++i)
            for (int d = 0; d < D; ++d) {
                double va = p.a(ja, i, d), vb = p.a(jb, i, d);
                if (va != vb) return va < vb;
            }
        return ja < jb;
    });
    ParameterSet q = p;
    for (int j = 0; j < L; ++j)
        for (int i = 0; i < K; ++i)
            for (int d = 0; d < D; ++d) q.a(j, i, d) = p.a(order[j], i, d);
    return q;
}

}  // namespace cm3
