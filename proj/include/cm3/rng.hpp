#pragma once

// Seed derivation and portable random streams.  All randomness in the
// library flows through Stream so results are bit-reproducible across
// platforms: mt19937_64 is fully specified by the standard and the
// real-valued transforms below avoid implementation-defined std
// distributions.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cm3::rng {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// splitmix64 finalizer; good avalanche for seed mixing.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent sub-stream seed keyed by (purpose, index).
// Parallel trials each derive their own stream from one master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                                 std::uint64_t index = 0) {
    std::uint64_t x = mix(master ^ fnv1a(purpose));
    return mix(x ^ index);
}

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on the open interval (0,1).
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unit-Frechet via inverse CDF: P(Z <= z) = exp(-1/z).
    double next_frechet() { return -1.0 / std::log(next_uniform()); }

    // Standard normal, Box-Muller with the second value cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(next_uniform()));
        double a = kTwoPi * next_uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform index in [0, n).  Modulo bias is < n / 2^64, irrelevant here.
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % n);
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cm3::rng
