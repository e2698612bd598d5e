#pragma once

// Simulation of the practical model
//   X_t(d) = max_{j,i} a_i^(j)(x_d) Z_{t-i}^(j) + eps_t(x_d)
// with unit-Frechet innovations and independent Gaussian noise, plus the
// exact spectral-process sampler of the conditional-limit law.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cm3/matrix.hpp"
#include "cm3/parameters.hpp"
#include "cm3/rng.hpp"

namespace cm3 {

struct SeriesSample {
    int T = 0;
    int D = 0;
    std::vector<double> values;  // row-major, values[t*D + d], t = 0..T-1
    double sigma = 0.0;
    std::uint64_t seed = 0;

    double at(int t, int d) const { return values[static_cast<std::size_t>(t) * D + d]; }
    const double* row(int t) const { return values.data() + static_cast<std::size_t>(t) * D; }
};

inline std::vector<double> sample_frechet(int n, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample_frechet: n must be >= 0");
    rng::Stream s(seed);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& z : out) z = s.next_frechet();
    return out;
}

// Streams rows of the practical model one time step at a time.  Innovations
// for the K-1 lags before t=1 are pre-sampled, so the first emitted row is
// already a point of the stationary process (no burn-in approximation).
// Innovations and noise use separate derived sub-streams, so the underlying
// noise-free process is unchanged by sigma.
class SeriesGenerator {
  public:
    SeriesGenerator(const ParameterSet& params, double sigma, std::uint64_t seed)
        : params_(params),
          sigma_(sigma),
          innov_(rng::derive_seed(seed, "innov")),
          noise_(rng::derive_seed(seed, "noise")) {
        require_valid(params_);
        if (sigma < 0.0) throw std::invalid_argument("simulate: sigma must be >= 0");
        ring_.assign(static_cast<std::size_t>(params_.K) * params_.L, 0.0);
        // Z_p^(j) for p = 2-K .. 0, time-ascending then pattern-ascending.
        for (int p = 2 - params_.K; p <= 0; ++p) {
            double* slot = ring_slot(p);
            for (int j = 0; j < params_.L; ++j) slot[j] = innov_.next_frechet();
        }
        t_ = 1;
    }

    int sites() const { return params_.D; }

    // Writes the D values of the next time step into out.
    void next_row(double* out) {
        const int K = params_.K, L = params_.L, D = params_.D;
        double* slot = ring_slot(t_);
        for (int j = 0; j < L; ++j) slot[j] = innov_.next_frechet();
        for (int d = 0; d < D; ++d) out[d] = 0.0;
        for (int j = 0; j < L; ++j) {
            for (int i = 0; i < K; ++i) {
                const double z = ring_slot(t_ - i)[j];
                const double* a = &params_.values[params_.index(j, i, 0)];
                for (int d = 0; d < D; ++d) {
                    double cand = a[d] * z;
                    if (cand > out[d]) out[d] = cand;
                }
            }
        }
        if (sigma_ > 0.0)
            for (int d = 0; d < D; ++d) out[d] += sigma_ * noise_.next_gaussian();
        ++t_;
    }

  private:
    double* ring_slot(int t) {
        int idx = t % params_.K;
        if (idx < 0) idx += params_.K;
        return ring_.data() + static_cast<std::size_t>(idx) * params_.L;
    }

    ParameterSet params_;
    double sigma_;
    rng::Stream innov_, noise_;
    std::vector<double> ring_;  // K time slots x L innovations
    int t_ = 1;
};

inline SeriesSample simulate(const ParameterSet& params, int T, double sigma,
                             std::uint64_t seed) {
    if (T < 1) throw std::invalid_argument("simulate: T must be >= 1");
    SeriesGenerator gen(params, sigma, seed);
    SeriesSample s;
    s.T = T;
    s.D = params.D;
    s.sigma = sigma;
    s.seed = seed;
    s.values.resize(static_cast<std::size_t>(T) * params.D);
    for (int t = 0; t < T; ++t) gen.next_row(&s.values[static_cast<std::size_t>(t) * params.D]);
    return s;
}

// ||X_t||_inf over the D sites, one value per time step.
inline std::vector<double> sup_norm_series(const SeriesSample& s) {
    std::vector<double> out(static_cast<std::size_t>(s.T));
    for (int t = 0; t < s.T; ++t) {
        const double* r = s.row(t);
        double m = r[0];
        for (int d = 1; d < s.D; ++d) m = std::max(m, r[d]);
        out[t] = m;
    }
    return out;
}

// One draw of the spectral process window (Theta_{-s},...,Theta_t): the
// profile of pattern J shifted by lag I and normalized by ||a_I^(J)||_inf,
// with zero rows outside 0..K-1.  (I,J) is drawn with probability
// proportional to ||a_i^(j)||_inf.
struct SpectralDraw {
    int s = 0;
    int t = 0;
    Mat window;        // (s+t+1) x D; offset u is stored at row u+s
    int pick_lag = 0;  // I
    int pick_pattern = 0;  // J, 0-based
};

inline SpectralDraw sample_spectral(const ParameterSet& params, int s, int t,
                                    rng::Stream& stream) {
    require_valid(params);
    if (s < 0 || t < 0) throw std::invalid_argument("sample_spectral: s, t must be >= 0");
    const int K = params.K, L = params.L, D = params.D;
    double total = 0.0;
    for (int j = 0; j < L; ++j)
        for (int i = 0; i < K; ++i) total += params.sup_norm(j, i);
    const double u = stream.next_uniform() * total;
    int I = K - 1, J = L - 1;
    double acc = 0.0;
    for (int j = 0; j < L && acc <= u; ++j)
        for (int i = 0; i < K; ++i) {
            acc += params.sup_norm(j, i);
            if (acc > u) {
                I = i;
                J = j;
                break;
            }
        }
    SpectralDraw out;
    out.s = s;
    out.t = t;
    out.pick_lag = I;
    out.pick_pattern = J;
    out.window = Mat(s + t + 1, D);
    const double norm = params.sup_norm(J, I);
    for (int u_off = -s; u_off <= t; ++u_off) {
        int idx = u_off + I;
        if (idx < 0 || idx >= K) continue;  // a_i^(j) = 0 for i outside 0..K-1
        for (int d = 0; d < D; ++d) out.window(u_off + s, d) = params.a(J, idx, d) / norm;
    }
    return out;
}

inline SpectralDraw sample_spectral(const ParameterSet& params, int s, int t,
                                    std::uint64_t seed) {
    rng::Stream stream(rng::derive_seed(seed, "spectral"));
    return sample_spectral(params, s, t, stream);
}

}  // namespace cm3
