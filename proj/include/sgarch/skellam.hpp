#pragma once

#include "sgarch/random.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sgarch {

/// Rates at or below this value are treated as exactly zero.
inline constexpr double kRateFloor = 1e-12;

/// Per-interval Poisson rates of up and down jumps (lambda * dt already applied).
struct SkellamParams {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Series terms this many log units below the running total are dropped.
inline constexpr double kSeriesCutoff = 4.248354255291589e-18;  // exp(-40)
inline constexpr std::size_t kLogFactorialTableSize = 1u << 15;

inline const std::array<double, kLogFactorialTableSize>& log_factorial_table() {
    static const auto table = [] {
        std::array<double, kLogFactorialTableSize> t{};
        for (std::size_t k = 0; k < t.size(); ++k) {
            t[k] = std::lgamma(static_cast<double>(k) + 1.0);
        }
        return t;
    }();
    return table;
}

inline double log_factorial(std::int64_t k) {
    if (k < static_cast<std::int64_t>(kLogFactorialTableSize)) {
        return log_factorial_table()[static_cast<std::size_t>(k)];
    }
    return std::lgamma(static_cast<double>(k) + 1.0);
}

// Beyond this argument the series needs O(sqrt(x)) terms; asymptotic
// expansions take over.
inline constexpr double kAsymptoticArgument = 2e4;

// Large-argument (Hankel) expansion, for order^2 small relative to x.
inline double log_bessel_i_hankel(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double sum = 1.0;
    double term = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = static_cast<double>(2 * k - 1);
        const double next = -term * (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
        if (std::fabs(next) >= std::fabs(term)) {
            break;
        }
        term = next;
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) {
            break;
        }
    }
    return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

// Uniform (Debye) expansion in 1/order.
inline double log_bessel_i_debye(double nu, double x) {
    const double z = x / nu;
    const double root = std::sqrt(1.0 + z * z);
    const double t = 1.0 / root;
    const double t2 = t * t;
    const double eta = root + std::log(z / (1.0 + root));
    const double u1 = t * (3.0 - 5.0 * t2) / 24.0;
    const double u2 = t2 * (81.0 + t2 * (-462.0 + t2 * 385.0)) / 1152.0;
    const double u3 =
        t * t2 * (30375.0 + t2 * (-369603.0 + t2 * (765765.0 - t2 * 425425.0))) / 414720.0;
    const double u4 = t2 * t2 *
                      (4465125.0 +
                       t2 * (-94121676.0 +
                             t2 * (349922430.0 + t2 * (-446185740.0 + t2 * 185910725.0)))) /
                      39813120.0;
    const double inv = 1.0 / nu;
    const double series = 1.0 + inv * (u1 + inv * (u2 + inv * (u3 + inv * u4)));
    return nu * eta - 0.5 * std::log(2.0 * std::numbers::pi * nu) - 0.5 * std::log(root) +
           std::log(series);
}

// ln I_a(2y) given y > 0 and ln y. Sums the power series outward from its
// largest term so no term over- or underflows, whatever the magnitude of y.
inline double log_bessel_i_half(std::int64_t a, double y, double log_y) {
    if (2.0 * y > kAsymptoticArgument) {
        const double nu = static_cast<double>(a);
        return nu * nu < 0.05 * 2.0 * y ? log_bessel_i_hankel(nu, 2.0 * y)
                                        : log_bessel_i_debye(nu, 2.0 * y);
    }
    const double y2 = y * y;
    const double ad = static_cast<double>(a);
    // Terms increase while (k+1)(k+1+a) <= y^2.
    const double peak_real = 0.5 * (-ad + std::sqrt(ad * ad + 4.0 * y2));
    const std::int64_t peak = peak_real > 0.0 ? static_cast<std::int64_t>(peak_real) : 0;
    const double log_peak = static_cast<double>(2 * peak + a) * log_y - log_factorial(peak) -
                            log_factorial(peak + a);

    double sum = 1.0;
    double term = 1.0;
    for (std::int64_t k = peak;; ++k) {
        term *= y2 / (static_cast<double>(k + 1) * static_cast<double>(k + 1 + a));
        sum += term;
        if (term < kSeriesCutoff * sum) {
            break;
        }
    }
    term = 1.0;
    for (std::int64_t k = peak; k > 0; --k) {
        term *= static_cast<double>(k) * static_cast<double>(k + a) / y2;
        sum += term;
        if (term < kSeriesCutoff * sum) {
            break;
        }
    }
    return log_peak + std::log(sum);
}

inline void require_finite_rate(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
        throw std::domain_error(std::string("skellam: ") + name +
                                " must be finite and non-negative");
    }
}

inline double poisson_log_pmf(std::int64_t k, double lambda) {
    return static_cast<double>(k) * std::log(lambda) - lambda - log_factorial(k);
}

}  // namespace detail

/// ln I_order(x), the modified Bessel function of the first kind.
/// Returns -inf exactly when I_order(x) == 0 (x == 0, order >= 1).
[[nodiscard]] inline double log_bessel_i(std::int64_t order, double x) {
    if (order < 0 || !std::isfinite(x) || x < 0.0) {
        throw std::domain_error("log_bessel_i: requires order >= 0 and finite x >= 0");
    }
    if (x == 0.0) {
        return order == 0 ? 0.0 : detail::kNegInf;
    }
    const double y = 0.5 * x;
    return detail::log_bessel_i_half(order, y, std::log(y));
}

/// Log-probability of a net jump count m under Skellam(lambda_plus, lambda_minus).
[[nodiscard]] inline double skellam_log_pmf(std::int64_t m, SkellamParams p) {
    detail::require_finite_rate(p.lambda_plus, "lambda_plus");
    detail::require_finite_rate(p.lambda_minus, "lambda_minus");
    const bool no_up = p.lambda_plus <= kRateFloor;
    const bool no_down = p.lambda_minus <= kRateFloor;
    if (no_up && no_down) {
        return m == 0 ? 0.0 : detail::kNegInf;
    }
    if (no_down) {
        return m < 0 ? detail::kNegInf : detail::poisson_log_pmf(m, p.lambda_plus);
    }
    if (no_up) {
        return m > 0 ? detail::kNegInf : detail::poisson_log_pmf(-m, p.lambda_minus);
    }
    const double log_up = std::log(p.lambda_plus);
    const double log_down = std::log(p.lambda_minus);
    const double y = std::sqrt(p.lambda_plus * p.lambda_minus);
    const double log_y = 0.5 * (log_up + log_down);
    return (-p.lambda_plus - p.lambda_minus) + 0.5 * static_cast<double>(m) * (log_up - log_down) +
           detail::log_bessel_i_half(std::llabs(m), y, log_y);
}

/// Draws N+ - N- with independent N+ ~ Poisson(lambda_plus), N- ~ Poisson(lambda_minus).
template <class Urbg>
[[nodiscard]] std::int64_t skellam_sample(Urbg& rng, SkellamParams p) {
    detail::require_finite_rate(p.lambda_plus, "lambda_plus");
    detail::require_finite_rate(p.lambda_minus, "lambda_minus");
    const std::int64_t up = p.lambda_plus <= kRateFloor ? 0 : poisson_sample(rng, p.lambda_plus);
    const std::int64_t down =
        p.lambda_minus <= kRateFloor ? 0 : poisson_sample(rng, p.lambda_minus);
    return up - down;
}

}  // namespace sgarch
