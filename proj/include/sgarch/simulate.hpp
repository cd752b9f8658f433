#pragma once

#include "sgarch/diagnostics.hpp"
#include "sgarch/intensity.hpp"
#include "sgarch/parallel.hpp"
#include "sgarch/random.hpp"
#include "sgarch/skellam.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgarch {

struct SimulatedPath {
    IntensityPath path;
    /// n + 1 prices, prices[0] = s0, prices[i] = s0 exp(delta * (counts[0] + ... + counts[i-1])).
    std::vector<double> prices;
};

/// One path of n steps: net jumps per step are Skellam with rates lambda(t_i) dt,
/// the return is delta times the net count, and the intensities advance on
/// the realized shock.
[[nodiscard]] inline SimulatedPath simulate_path(const ModelSpec& spec, const ParamSet& p,
                                                 std::size_t n, Intensities lambda0, double s0,
                                                 std::uint64_t seed) {
    validate(spec);
    validate(p, spec, /*allow_degenerate=*/true);
    if (n < 1) {
        throw std::invalid_argument("simulate_path: n must be >= 1");
    }
    if (!(lambda0.plus >= 0.0) || !(lambda0.minus >= 0.0) || !std::isfinite(lambda0.plus) ||
        !std::isfinite(lambda0.minus)) {
        throw std::invalid_argument("simulate_path: initial intensities must be non-negative");
    }
    if (!(s0 > 0.0) || !std::isfinite(s0)) {
        throw std::invalid_argument("simulate_path: s0 must be positive");
    }
    Rng rng(seed);
    SimulatedPath out;
    IntensityPath& path = out.path;
    path.lambda_plus.reserve(n + 1);
    path.lambda_minus.reserve(n + 1);
    path.returns.reserve(n);
    path.eps.reserve(n);
    path.h.reserve(n);
    path.counts.reserve(n);
    out.prices.reserve(n + 1);
    out.prices.push_back(s0);

    Intensities lam = lambda0;
    std::int64_t cumulative = 0;
    path.lambda_plus.push_back(lam.plus);
    path.lambda_minus.push_back(lam.minus);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t m = skellam_sample(rng, {lam.plus * spec.dt, lam.minus * spec.dt});
        const double x = spec.delta * static_cast<double>(m);
        const double h = conditional_variance(lam, spec.delta, spec.dt);
        const double eps = x - conditional_mean(lam, spec.delta, spec.dt);
        path.counts.push_back(m);
        path.returns.push_back(x);
        path.eps.push_back(eps);
        path.h.push_back(h);
        cumulative += m;
        out.prices.push_back(s0 * std::exp(spec.delta * static_cast<double>(cumulative)));
        lam = intensity_step(spec, p, lam, eps, h);
        path.lambda_plus.push_back(lam.plus);
        path.lambda_minus.push_back(lam.minus);
    }
    return out;
}

/// Per-path statistic to aggregate over an ensemble.
struct EnsembleStatistic {
    enum class Kind { Correlation, LjungBox };
    std::string name;
    Kind kind = Kind::Correlation;
    ConditionalPair pair;
    /// Correlation lag, or the number of lags N for Q_N.
    std::size_t lag = 1;
};

struct EnsembleSummary {
    EnsembleStatistic statistic;
    double mean = 0.0;
    /// Cross-path standard deviation.
    double sd = 0.0;
    /// sd / sqrt(n_valid).
    double se = 0.0;
    std::size_t n_valid = 0;
    /// Per-path values; empty slots where the statistic was undefined.
    std::vector<std::optional<double>> values;
};

namespace detail {

inline std::optional<double> evaluate_statistic(const EnsembleStatistic& s,
                                                std::span<const double> x) {
    if (s.kind == EnsembleStatistic::Kind::Correlation) {
        return conditional_correlation(x, s.lag, s.pair).corr;
    }
    try {
        return modified_ljung_box(x, s.lag, s.pair);
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Simulates n_paths independent paths (path k uses derive_seed(seed, k)) and
/// summarizes each requested statistic across them.
[[nodiscard]] inline std::vector<EnsembleSummary> simulate_ensemble(
    const ModelSpec& spec, const ParamSet& p, std::size_t n, std::size_t n_paths,
    Intensities lambda0, std::uint64_t seed, const std::vector<EnsembleStatistic>& request,
    unsigned threads = 0) {
    if (n_paths < 2) {
        throw std::invalid_argument("simulate_ensemble: need at least 2 paths");
    }
    std::vector<std::vector<std::optional<double>>> per_path(n_paths);
    parallel_for(
        n_paths,
        [&](std::size_t k) {
            const SimulatedPath sim = simulate_path(spec, p, n, lambda0, 1.0, derive_seed(seed, k));
            auto& slot = per_path[k];
            slot.reserve(request.size());
            for (const auto& stat : request) {
                slot.push_back(detail::evaluate_statistic(stat, sim.path.returns));
            }
        },
        threads);

    std::vector<EnsembleSummary> out;
    out.reserve(request.size());
    for (std::size_t s = 0; s < request.size(); ++s) {
        EnsembleSummary sum;
        sum.statistic = request[s];
        sum.values.reserve(n_paths);
        double total = 0.0;
        for (std::size_t k = 0; k < n_paths; ++k) {
            sum.values.push_back(per_path[k][s]);
            if (per_path[k][s]) {
                total += *per_path[k][s];
                ++sum.n_valid;
            }
        }
        if (sum.n_valid > 0) {
            sum.mean = total / static_cast<double>(sum.n_valid);
            double ss = 0.0;
            for (const auto& v : sum.values) {
                if (v) {
                    ss += (*v - sum.mean) * (*v - sum.mean);
                }
            }
            sum.sd = sum.n_valid > 1 ? std::sqrt(ss / static_cast<double>(sum.n_valid - 1)) : 0.0;
            sum.se = sum.sd / std::sqrt(static_cast<double>(sum.n_valid));
        }
        out.push_back(std::move(sum));
    }
    return out;
}

/// Parameters of the GJR intensity simulation preset (delta = 0.005, lambda(0) = 5).
[[nodiscard]] inline ParamSet table9_gjr_params() {
    return {0.0210, 0.0167, 0.9369, 0.9425, 86.99, 38.23, 1899.0, 1702.0};
}

[[nodiscard]] inline ModelSpec table9_gjr_spec() {
    ModelSpec s;
    s.variant = Variant::Gjr;
    s.delta = 0.005;
    return s;
}

}  // namespace sgarch
