#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sgarch {

/// Random stream used by every stochastic routine in the library.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent per-task seeds from a
/// master seed and a task counter, so results never depend on scheduling.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master,
                                                  std::uint64_t stream) noexcept {
    return mix_seed(mix_seed(master) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw. Portable across
/// standard libraries, unlike std::uniform_real_distribution.
template <class Urbg>
[[nodiscard]] double uniform01(Urbg& rng) {
    static_assert(Urbg::max() - Urbg::min() == ~std::uint64_t{0},
                  "uniform01 expects a 64-bit engine");
    return static_cast<double>((rng() - Urbg::min()) >> 11) * 0x1.0p-53;
}

namespace detail {

template <class Urbg>
std::int64_t poisson_inversion(Urbg& rng, double lambda) {
    const double u = uniform01(rng);
    double p = std::exp(-lambda);
    double cdf = p;
    std::int64_t k = 0;
    // The cap only matters when u lies within rounding of 1.
    while (u > cdf && k < 1000) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// Transformed rejection with squeeze (Hormann 1993, "PTRS").
template <class Urbg>
std::int64_t poisson_ptrs(Urbg& rng, double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform01(rng) - 0.5;
        const double v = uniform01(rng);
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::int64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -lambda + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::int64_t>(k);
        }
    }
}

}  // namespace detail

/// Poisson(lambda) draw. Inversion below 30, PTRS rejection above.
/// lambda <= 0 yields 0.
template <class Urbg>
[[nodiscard]] std::int64_t poisson_sample(Urbg& rng, double lambda) {
    if (!(lambda > 0.0)) {
        return 0;
    }
    return lambda < 30.0 ? detail::poisson_inversion(rng, lambda)
                         : detail::poisson_ptrs(rng, lambda);
}

/// Standard normal via Box-Muller on uniform01 (for the Gaussian baseline).
template <class Urbg>
[[nodiscard]] double normal_sample(Urbg& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace sgarch
