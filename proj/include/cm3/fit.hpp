#pragma once

// Recovery of the parameter functions from cluster output: shapes and
// frequencies, the frequency-matching fixed point on the minima matrices,
// per-site renormalization, and the composed estimation pipeline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cm3/blocks.hpp"
#include "cm3/cluster.hpp"
#include "cm3/decluster.hpp"
#include "cm3/matrix.hpp"
#include "cm3/parameters.hpp"
#include "cm3/theory.hpp"

namespace cm3 {

// Floor applied to representative entries before frequency matching; the
// profile probability needs strict positivity and measurement noise can
// push centroid entries to zero or below.
constexpr double kShapeFloor = 1e-9;

struct ShapeSet {
    std::vector<Mat> shapes;          // L matrices, K x D, strictly positive
    std::vector<double> frequencies;  // cluster-size proportions, sum 1
};

// Representatives reshaped back to K x D plus cluster-size frequencies.
inline ShapeSet shapes_and_frequencies(const ClusterModel& model, const ShapeTable& table) {
    if (model.labels.size() != static_cast<std::size_t>(table.Q))
        throw std::invalid_argument("shapes_and_frequencies: model/table mismatch");
    ShapeSet out;
    out.shapes.reserve(static_cast<std::size_t>(model.k));
    for (int c = 0; c < model.k; ++c) {
        Mat shape(table.K, table.D);
        for (int d = 0; d < table.D; ++d)
            for (int i = 0; i < table.K; ++i)
                shape(i, d) = std::max(model.representatives(c, d * table.K + i), kShapeFloor);
        out.shapes.push_back(std::move(shape));
    }
    std::vector<int> counts(static_cast<std::size_t>(model.k), 0);
    for (int l : model.labels) ++counts[l];
    out.frequencies.resize(static_cast<std::size_t>(model.k));
    for (int c = 0; c < model.k; ++c)
        out.frequencies[c] = static_cast<double>(counts[c]) / table.Q;
    return out;
}

struct FixedPointOptions {
    double tol = 1e-10;  // sup-norm error between normalized f and p
    int max_iter = 1000;
};

struct FixedPointTrace {
    struct Step {
        std::vector<double> p;  // profile probabilities at this iterate
        double error;           // sup-norm gap between normalized f and p
    };
    std::vector<Step> iterations;
    bool converged = false;
    std::vector<double> final_alphas;    // accumulated per-pattern multipliers
    std::vector<double> per_site_alpha;  // 1 / sum of scaled shapes per site
};

// Fixed-point iteration directly on the minima matrices: each step scales
// pattern j by f(j)/p(j), which multiplies row l of the target-l* matrix by
// r(l*)/r(l) and leaves the l* row untouched.  At the fixed point
// harm(M^(l))/f(l) is constant over l.
inline FixedPointTrace frequency_match_matrices(std::vector<MinimaMatrix> ms,
                                                std::vector<double> f,
                                                const FixedPointOptions& opts = {}) {
    const int L = static_cast<int>(ms.size());
    if (L < 1 || f.size() != ms.size())
        throw std::invalid_argument("frequency_match: need one frequency per pattern");
    for (double v : f)
        if (!(v > 0.0)) throw std::invalid_argument("frequency_match: frequencies must be positive");
    double fsum = std::accumulate(f.begin(), f.end(), 0.0);
    for (double& v : f) v /= fsum;

    FixedPointTrace trace;
    trace.final_alphas.assign(static_cast<std::size_t>(L), 1.0);
    std::vector<double> p(static_cast<std::size_t>(L)), pn(static_cast<std::size_t>(L));
    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        for (int l = 0; l < L; ++l) p[l] = profile_probability_from_minima(ms[l]);
        double psum = std::accumulate(p.begin(), p.end(), 0.0);
        double err = 0.0;
        for (int l = 0; l < L; ++l) {
            pn[l] = p[l] / psum;
            err = std::max(err, std::abs(f[l] - pn[l]));
        }
        trace.iterations.push_back({p, err});
        if (err <= opts.tol) {
            trace.converged = true;
            break;
        }
        if (iter == opts.max_iter) break;
        std::vector<double> r(static_cast<std::size_t>(L));
        for (int l = 0; l < L; ++l) {
            r[l] = f[l] / pn[l];
            trace.final_alphas[l] *= r[l];
        }
        for (int lstar = 0; lstar < L; ++lstar)
            for (int l = 0; l < L; ++l) {
                if (l == lstar) continue;  // the target row is invariant
                double scale = r[lstar] / r[l];
                for (int k = 0; k < 2 * ms[lstar].K - 1; ++k) ms[lstar].m(l, k) *= scale;
            }
    }
    return trace;
}

inline FixedPointTrace frequency_match(const ShapeSet& set, const FixedPointOptions& opts = {}) {
    if (set.shapes.empty() || set.shapes.size() != set.frequencies.size())
        throw std::invalid_argument("frequency_match: inconsistent shape set");
    FixedPointTrace trace =
        frequency_match_matrices(minima_matrices(set.shapes), set.frequencies, opts);
    const int D = set.shapes[0].cols, K = set.shapes[0].rows;
    trace.per_site_alpha.assign(static_cast<std::size_t>(D), 0.0);
    for (int d = 0; d < D; ++d) {
        double sum = 0.0;
        for (std::size_t j = 0; j < set.shapes.size(); ++j)
            for (int i = 0; i < K; ++i) sum += trace.final_alphas[j] * set.shapes[j](i, d);
        trace.per_site_alpha[d] = 1.0 / sum;
    }
    return trace;
}

// Applies the converged multipliers and then normalizes per site so the
// standardization holds exactly at every site; within-site ratios between
// patterns are preserved.
inline ParameterSet renormalize(const ShapeSet& set, const std::vector<double>& alphas) {
    if (set.shapes.empty() || alphas.size() != set.shapes.size())
        throw std::invalid_argument("renormalize: one alpha per shape required");
    const int L = static_cast<int>(set.shapes.size());
    const int K = set.shapes[0].rows, D = set.shapes[0].cols;
    ParameterSet out;
    out.K = K;
    out.L = L;
    out.D = D;
    out.values.resize(static_cast<std::size_t>(K) * L * D);
    for (int d = 0; d < D; ++d) {
        double sum = 0.0;
        for (int j = 0; j < L; ++j)
            for (int i = 0; i < K; ++i) sum += alphas[j] * set.shapes[j](i, d);
        if (!(sum > 0.0)) throw std::invalid_argument("renormalize: non-positive site total");
        for (int j = 0; j < L; ++j)
            for (int i = 0; i < K; ++i) out.a(j, i, d) = alphas[j] * set.shapes[j](i, d) / sum;
    }
    return out;
}

class PipelineError : public std::runtime_error {
  public:
    PipelineError(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

  private:
    std::string stage_;
};

struct FitOptions {
    int k_variant = 7;  // scalar mode declustering, the large-T winner
    int l_variant = 2;  // Ward + silhouette
    std::optional<int> k_override;
    std::optional<int> l_override;
    std::optional<int> block_count;  // Q; unset means min(ceil(pT), 100)
    FixedPointOptions fixed_point;
    std::uint64_t seed = 0;
};

struct EstimationReport {
    int k_hat = 0;
    int l_hat = 0;
    ParameterSet fitted;
    std::vector<double> frequencies;
    FixedPointTrace trace;
    std::optional<double> hausdorff;
    std::vector<std::string> flags;
};

// estimate K -> extract blocks -> estimate L -> shapes and frequencies ->
// frequency matching -> per-site renormalization.  Failures carry the stage
// name.
inline EstimationReport fit_pipeline(const SeriesSample& sample, double C,
                                     const FitOptions& options = {}) {
    if (sample.T < 2) throw PipelineError("input", "need a series of length T >= 2");
    if (!(C >= 1.0)) throw PipelineError("input", "C must be >= 1");
    EstimationReport report;

    if (options.k_override) {
        report.k_hat = *options.k_override;
        if (report.k_hat < 1) throw PipelineError("estimate-k", "K override must be >= 1");
    } else {
        try {
            report.k_hat = estimate_k(sample, C, options.k_variant);
        } catch (const std::exception& e) {
            throw PipelineError("estimate-k", e.what());
        }
    }

    if (sample.T < report.k_hat + 1)
        throw PipelineError("extract", "series too short for blocks of length K = " +
                                           std::to_string(report.k_hat));
    const int Q = options.block_count ? *options.block_count
                                      : default_block_count(sample.T, C, report.k_hat);
    ExtractionResult extraction;
    try {
        extraction = extract_blocks(sample, report.k_hat, Q, C);
    } catch (const std::exception& e) {
        throw PipelineError("extract", e.what());
    }
    if (extraction.blocks.empty()) throw PipelineError("extract", "no blocks extracted");
    for (auto& f : extraction.flags) report.flags.push_back("extract: " + f);

    ShapeTable table = build_table(extraction.blocks);
    ClusterModel model;
    try {
        // The consensus variant has no owning algorithm; cluster with Ward
        // at the selected k for shape recovery.
        ClusterAlgorithm algo = options.l_variant == 11 ? ClusterAlgorithm::ward
                                                        : algorithm_for_l_variant(options.l_variant);
        if (options.l_override) {
            report.l_hat = *options.l_override;
            if (report.l_hat < 1 || report.l_hat > table.Q)
                throw std::invalid_argument("L override must be in 1.." + std::to_string(table.Q));
        } else {
            report.l_hat = estimate_l(table, options.l_variant, options.seed);
        }
        model = cluster(table, algo, report.l_hat, options.seed);
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError("cluster", e.what());
    }

    ShapeSet shapes = shapes_and_frequencies(model, table);
    report.frequencies = shapes.frequencies;
    try {
        report.trace = frequency_match(shapes, options.fixed_point);
    } catch (const std::exception& e) {
        throw PipelineError("frequency-match", e.what());
    }
    if (!report.trace.converged) report.flags.push_back("frequency-match: not converged");

    try {
        report.fitted = renormalize(shapes, report.trace.final_alphas);
    } catch (const std::exception& e) {
        throw PipelineError("renormalize", e.what());
    }
    return report;
}

}  // namespace cm3
