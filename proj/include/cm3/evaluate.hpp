#pragma once

// Hausdorff distance between sets of parameter-function graphs and the
// benchmark scoring convention: a wrong K is a hard failure, otherwise the
// distance between the flattened profile sets is attached.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cm3/fit.hpp"
#include "cm3/parameters.hpp"

namespace cm3 {

// Exact Hausdorff distance between finite point sets under the Euclidean
// metric: max of the two directed sup-min distances.
inline double hausdorff_points(const std::vector<std::vector<double>>& a,
                               const std::vector<std::vector<double>>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("hausdorff: point sets must be nonempty");
    auto directed = [](const std::vector<std::vector<double>>& from,
                       const std::vector<std::vector<double>>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) {
                if (p.size() != q.size())
                    throw std::invalid_argument("hausdorff: dimension mismatch");
                double s = 0.0;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    double d = p[i] - q[i];
                    s += d * d;
                }
                best = std::min(best, s);
            }
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

// Each profile j becomes one point in R^(D*K) by site-major flattening of
// (a_i^(j)(x_d)); L and L-hat may differ, K and D must agree.
inline std::vector<std::vector<double>> profile_points(const ParameterSet& p) {
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(p.L));
    for (int j = 0; j < p.L; ++j) {
        std::vector<double> pt(static_cast<std::size_t>(p.D) * p.K);
        for (int d = 0; d < p.D; ++d)
            for (int i = 0; i < p.K; ++i) pt[static_cast<std::size_t>(d) * p.K + i] = p.a(j, i, d);
        pts.push_back(std::move(pt));
    }
    return pts;
}

inline double hausdorff_distance(const ParameterSet& truth, const ParameterSet& estimate) {
    if (truth.K != estimate.K || truth.D != estimate.D)
        throw std::invalid_argument("hausdorff: K and D must match (only L may differ)");
    return hausdorff_points(profile_points(truth), profile_points(estimate));
}

struct ScoredReport {
    bool k_correct = false;
    bool l_correct = false;
    std::optional<double> hausdorff;  // present only when K-hat matches the truth
    EstimationReport report;
};

inline ScoredReport evaluate_fit(const ParameterSet& truth, const EstimationReport& report) {
    require_valid(truth);
    ScoredReport out;
    out.report = report;
    out.k_correct = report.k_hat == truth.K;
    out.l_correct = report.l_hat == truth.L;
    if (out.k_correct && report.fitted.D == truth.D && !report.fitted.values.empty())
        out.hausdorff = hausdorff_distance(truth, report.fitted);
    return out;
}

}  // namespace cm3
