#pragma once

#include "sgarch/intensity.hpp"
#include "sgarch/skellam.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgarch {

struct CountSeries {
    std::vector<std::int64_t> counts;
    /// max_i |x_i - delta * counts_i|; never exceeds delta / 2.
    double max_rounding_error = 0.0;
};

/// Discretizes returns to net jump counts (nearest integer, ties away from zero).
[[nodiscard]] inline CountSeries returns_to_counts(std::span<const double> returns, double delta) {
    if (!std::isfinite(delta) || delta <= 0.0) {
        throw std::invalid_argument("returns_to_counts: delta must be positive");
    }
    CountSeries out;
    out.counts.reserve(returns.size());
    for (double x : returns) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("returns_to_counts: non-finite return");
        }
        const std::int64_t m = jump_count(x, delta);
        out.counts.push_back(m);
        out.max_rounding_error =
            std::max(out.max_rounding_error, std::fabs(x - delta * static_cast<double>(m)));
    }
    return out;
}

/// Exact Skellam log-likelihood of the counts, conditional on lambda0. The
/// filter runs on the discretized returns delta * counts_i. May return -inf.
[[nodiscard]] inline double log_likelihood(const ModelSpec& spec, const ParamSet& p,
                                           std::span<const std::int64_t> counts,
                                           Intensities lambda0) {
    if (!(lambda0.plus > 0.0) || !(lambda0.minus > 0.0)) {
        throw std::domain_error("log_likelihood: initial intensities must be positive");
    }
    const double delta = spec.delta;
    const double dt = spec.dt;
    double total = 0.0;
    detail::run_filter(
        spec, p, counts.size(),
        [&](std::size_t i) { return delta * static_cast<double>(counts[i]); }, lambda0,
        [&](std::size_t i, Intensities lam, double, double, double) {
            total += skellam_log_pmf(counts[i], {lam.plus * dt, lam.minus * dt});
        });
    return total;
}

/// Same likelihood starting from raw returns (rounded to counts first).
[[nodiscard]] inline double log_likelihood_returns(const ModelSpec& spec, const ParamSet& p,
                                                   std::span<const double> returns,
                                                   Intensities lambda0) {
    const CountSeries c = returns_to_counts(returns, spec.delta);
    return log_likelihood(spec, p, c.counts, lambda0);
}

}  // namespace sgarch
