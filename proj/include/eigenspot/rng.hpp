#ifndef EIGENSPOT_RNG_HPP
#define EIGENSPOT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>

#include "eigenspot/errors.hpp"

namespace eigenspot {

// The reproducibility contract of every simulated artifact in this project is
// pinned to one generator family: xoshiro256++ (Blackman/Vigna) seeded through
// splitmix64. Both are tiny, portable, and fully specified by the code below;
// no standard-library distribution object is ever used.

/// splitmix64: seed expander and per-replicate stream derivation.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Seed for replicate `r` of a batch: the (r+1)-th splitmix64 output of the
/// master seed, computed in O(1) so batches are order-independent.
inline std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) {
    std::uint64_t z = master_seed + (replicate + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ with splitmix64 state initialization.
class Xoshiro256PlusPlus {
public:
    explicit Xoshiro256PlusPlus(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& s : s_) s = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, bound) via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw ConfigError("next_below: bound must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Exact Poisson sample.
///
/// lambda < 30: Knuth multiplication (inverse-transform via exponential
/// waiting times). lambda >= 30: Hormann's PTRS transformed rejection, an
/// exact method (not a normal approximation) with bounded expected cost.
inline std::int64_t sample_poisson(double lambda, Xoshiro256PlusPlus& rng) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw NonPositiveLambdaError("sample_poisson: lambda must be positive and finite");
    }

    if (lambda < 30.0) {
        const double exp_neg_lambda = std::exp(-lambda);
        std::int64_t k = 0;
        double prod = 1.0;
        while (true) {
            prod *= rng.next_double();
            if (prod <= exp_neg_lambda) return k;
            ++k;
        }
    }

    // PTRS constants per Hormann (1993), "The transformed rejection method
    // for generating Poisson random variables".
    const double log_lambda = std::log(lambda);
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    while (true) {
        const double u = rng.next_double() - 0.5;
        const double v = rng.next_double();
        const double us = 0.5 - std::abs(u);
        if (us <= 0.0) continue;

        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;

        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = -lambda + kf * log_lambda - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<std::int64_t>(kf);
    }
}

}  // namespace eigenspot

#endif
