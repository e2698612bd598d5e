#pragma once

// Block-of-extremes extraction: per-site order-statistic marks, the
// extremal-status sums and their trailing moving sum, then iterative
// extraction of time-disjoint normalized blocks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cm3/matrix.hpp"
#include "cm3/simulate.hpp"

namespace cm3 {

struct BlockScore {
    std::vector<std::uint8_t> marks;  // T x D order-statistic indicators
    std::vector<int> lambda;          // per-time extremal status sums, 0..D
    std::vector<int> ms;              // trailing moving sum of order K (truncated start)

    bool marked(int t, int d, int D) const {
        return marks[static_cast<std::size_t>(t) * D + d] != 0;
    }
};

struct BlockShape {
    int start = 0;   // 1-based time index of the first row
    Mat matrix;      // K rows (time) x D sites, normalized levels
    double norm = 0; // the divisor ||X_{t-K+1}||_inf
};

struct ExtractionResult {
    std::vector<BlockShape> blocks;
    std::vector<std::string> flags;
};

// Marks the K largest values per site (ties to the earliest time), sums the
// marks per time into lambda, and forms the trailing moving sum of order K.
inline BlockScore extremal_scores(const SeriesSample& s, int K) {
    if (K < 1) throw std::invalid_argument("extremal_scores: K must be >= 1");
    if (s.T < K) throw std::invalid_argument("extremal_scores: need T >= K");
    BlockScore out;
    out.marks.assign(static_cast<std::size_t>(s.T) * s.D, 0);
    out.lambda.assign(static_cast<std::size_t>(s.T), 0);
    std::vector<int> idx(static_cast<std::size_t>(s.T));
    for (int d = 0; d < s.D; ++d) {
        std::iota(idx.begin(), idx.end(), 0);
        std::nth_element(idx.begin(), idx.begin() + (K - 1), idx.end(), [&](int a, int b) {
            double va = s.at(a, d), vb = s.at(b, d);
            if (va != vb) return va > vb;
            return a < b;
        });
        for (int r = 0; r < K; ++r) {
            ++out.lambda[idx[r]];
            out.marks[static_cast<std::size_t>(idx[r]) * s.D + d] = 1;
        }
    }
    out.ms.assign(static_cast<std::size_t>(s.T), 0);
    int acc = 0;
    for (int t = 0; t < s.T; ++t) {
        acc += out.lambda[t];
        if (t >= K) acc -= out.lambda[t - K];
        out.ms[t] = acc;
    }
    return out;
}

inline int default_block_count(int T, double C, int K) {
    if (!(C >= 1.0) || K < 1 || T < 1)
        throw std::invalid_argument("default_block_count: need C >= 1, K >= 1, T >= 1");
    double p_lower = 1.0 / (C * (2.0 * K - 1.0));
    return std::min(static_cast<int>(std::ceil(p_lower * T)), 100);
}

// One extraction round per block: mark the K largest remaining values per
// site, score the candidate windows by the trailing moving sum, and take the
// best one (an isolated maximum first; among consecutive maxima the block
// with the largest sup-norm mass; earliest on remaining ties).  Extracted
// time indices leave the series, so the next round's order statistics move
// down to the next event.  Stops at Q blocks or when no window holds a mark.
//
// profile_range, when given, is the variation bound C: a normalized block
// profile cannot carry an entry above C, so windows exceeding it (up to a
// noise allowance that vanishes at sigma = 0) are discarded as misaligned
// straddles of two events rather than stored as shapes.
inline ExtractionResult extract_blocks(const SeriesSample& s, int K, int Q,
                                       std::optional<double> profile_range = {}) {
    if (Q < 1) throw std::invalid_argument("extract_blocks: Q must be >= 1");
    if (K < 1) throw std::invalid_argument("extract_blocks: K must be >= 1");
    if (s.T < K) throw std::invalid_argument("extract_blocks: need T >= K");
    const int T = s.T, D = s.D;

    // Per-site time indices in descending value order, ties to earlier times.
    std::vector<std::vector<int>> order(static_cast<std::size_t>(D));
    for (int d = 0; d < D; ++d) {
        order[d].resize(static_cast<std::size_t>(T));
        std::iota(order[d].begin(), order[d].end(), 0);
        std::sort(order[d].begin(), order[d].end(), [&](int a, int b) {
            double va = s.at(a, d), vb = s.at(b, d);
            if (va != vb) return va > vb;
            return a < b;
        });
    }
    auto sup = sup_norm_series(s);
    std::vector<double> sup_prefix(static_cast<std::size_t>(T) + 1, 0.0);
    for (int t = 0; t < T; ++t) sup_prefix[t + 1] = sup_prefix[t] + sup[t];
    auto block_mass = [&](int end) { return sup_prefix[end + 1] - sup_prefix[end - K + 1]; };

    std::vector<std::uint8_t> available(static_cast<std::size_t>(T), 1);
    std::vector<int> lambda(static_cast<std::size_t>(T));
    std::vector<int> ms(static_cast<std::size_t>(T));

    ExtractionResult out;
    int skipped_norm = 0, skipped_range = 0;
    while (static_cast<int>(out.blocks.size()) < Q) {
        std::fill(lambda.begin(), lambda.end(), 0);
        bool any_marks = false;
        for (int d = 0; d < D; ++d) {
            int taken = 0;
            for (int idx : order[d]) {
                if (!available[idx]) continue;
                ++lambda[idx];
                any_marks = true;
                if (++taken == K) break;
            }
        }
        if (!any_marks) break;

        // Trailing moving sum over windows that lie fully in available time.
        int acc = 0, avail_run = 0, best = -1;
        for (int t = 0; t < T; ++t) {
            acc += lambda[t];
            if (t >= K) acc -= lambda[t - K];
            avail_run = available[t] ? avail_run + 1 : 0;
            ms[t] = (t >= K - 1 && avail_run >= K) ? acc : -1;
            if (ms[t] > 0 && (best < 0 || ms[t] > ms[best])) best = t;
        }
        if (best < 0) break;
        const int target = ms[best];
        std::vector<int> cands;
        for (int t = K - 1; t < T; ++t)
            if (ms[t] == target) cands.push_back(t);

        // Prefer an isolated maximum (earliest); otherwise the consecutive
        // maximum whose block carries the most sup-norm mass.
        int chosen = -1;
        for (std::size_t i = 0; i < cands.size();) {
            std::size_t j = i;
            while (j + 1 < cands.size() && cands[j + 1] == cands[j] + 1) ++j;
            if (j == i) {
                chosen = cands[i];
                break;
            }
            i = j + 1;
        }
        if (chosen < 0) {
            double best_mass = -std::numeric_limits<double>::infinity();
            for (int t : cands) {
                double mass = block_mass(t);
                if (mass > best_mass) {
                    best_mass = mass;
                    chosen = t;
                }
            }
        }

        const int end = chosen;
        const int begin = end - K + 1;
        for (int t = begin; t <= end; ++t) available[t] = 0;

        double norm = s.at(begin, 0);
        for (int d = 1; d < D; ++d) norm = std::max(norm, s.at(begin, d));
        if (!(norm > 0.0)) {
            ++skipped_norm;
            continue;
        }
        BlockShape b;
        b.start = begin + 1;
        b.norm = norm;
        b.matrix = Mat(K, D);
        double peak = 0.0;
        for (int r = 0; r < K; ++r)
            for (int d = 0; d < D; ++d) {
                b.matrix(r, d) = s.at(begin + r, d) / norm;
                peak = std::max(peak, b.matrix(r, d));
            }
        if (profile_range) {
            double allowance = (1.0 + *profile_range) * 4.0 * s.sigma / norm;
            if (peak > *profile_range + allowance) {
                ++skipped_range;
                continue;
            }
        }
        out.blocks.push_back(std::move(b));
    }
    if (static_cast<int>(out.blocks.size()) < Q)
        out.flags.push_back("extracted " + std::to_string(out.blocks.size()) + " of " +
                            std::to_string(Q) + " requested blocks");
    if (skipped_norm > 0)
        out.flags.push_back(std::to_string(skipped_norm) +
                            " candidate blocks skipped (non-positive leading sup norm)");
    if (skipped_range > 0)
        out.flags.push_back(std::to_string(skipped_range) +
                            " candidate blocks skipped (entries beyond the profile range)");
    return out;
}

}  // namespace cm3
