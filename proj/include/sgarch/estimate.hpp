#pragma once

#include "sgarch/diagnostics.hpp"
#include "sgarch/intensity.hpp"
#include "sgarch/likelihood.hpp"
#include "sgarch/model.hpp"
#include "sgarch/optimize.hpp"
#include "sgarch/parallel.hpp"
#include "sgarch/random.hpp"
#include "sgarch/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgarch {

/// Parameters held at fixed values (both directions) during a fit. A fixed
/// parameter is removed from the optimizer's coordinate vector.
struct FitRestrictions {
    std::optional<double> beta;
    std::optional<double> alpha;
    std::optional<double> gamma;
};

namespace detail {

// Shift that lets log-coordinates for non-negative parameters reach zero.
inline constexpr double kLogShift = 1e-6;

enum class Coord {
    OmegaPlus,
    OmegaMinus,
    BetaShared,
    BetaPlus,
    BetaMinus,
    AlphaShared,
    AlphaPlus,
    AlphaMinus,
    GammaShared,
    GammaPlus,
    GammaMinus,
};

inline std::vector<Coord> coordinates(const ModelSpec& spec, const FitRestrictions& fixed) {
    std::vector<Coord> c{Coord::OmegaPlus, Coord::OmegaMinus};
    if (!fixed.beta) {
        if (spec.beta_equal) {
            c.push_back(Coord::BetaShared);
        } else {
            c.push_back(Coord::BetaPlus);
            c.push_back(Coord::BetaMinus);
        }
    }
    if (!fixed.alpha) {
        if (spec.alpha_equal) {
            c.push_back(Coord::AlphaShared);
        } else {
            c.push_back(Coord::AlphaPlus);
            c.push_back(Coord::AlphaMinus);
        }
    }
    if (has_gamma(spec.variant) && !fixed.gamma) {
        if (spec.gamma_equal) {
            c.push_back(Coord::GammaShared);
        } else {
            c.push_back(Coord::GammaPlus);
            c.push_back(Coord::GammaMinus);
        }
    }
    return c;
}

// Multipliers that put omega, alpha and gamma on a jump-size-free scale
// before they enter the optimizer.
inline double omega_scale(const ModelSpec& spec) { return spec.delta * spec.delta; }

inline double alpha_scale(const ModelSpec& spec) {
    return (spec.variant == Variant::HestonNandi || spec.variant == Variant::VGarch)
               ? 1.0
               : spec.delta * spec.delta;
}

inline double gamma_scale(const ModelSpec& spec) {
    switch (spec.variant) {
        case Variant::Gjr: return spec.delta * spec.delta;
        case Variant::AsymGarch: return 1.0 / spec.delta;
        case Variant::QGarch:
        case Variant::HestonNandi: return spec.delta;
        default: return 1.0;
    }
}

inline bool gamma_nonnegative(const ModelSpec& spec) { return spec.variant == Variant::Gjr; }

inline double to_log(double v, double scale, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::domain_error(std::string("transform_params: ") + what + " must be positive");
    }
    return std::log(v * scale);
}

inline double to_shifted_log(double v, double scale, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::domain_error(std::string("transform_params: ") + what +
                                " must be non-negative");
    }
    return std::log(v * scale + kLogShift);
}

inline double from_shifted_log(double u, double scale) {
    return std::max(std::exp(u) - kLogShift, 0.0) / scale;
}

inline double to_logit(double b) {
    if (!(b > 0.0 && b < 1.0)) {
        throw std::domain_error("transform_params: beta must lie strictly inside (0, 1)");
    }
    return std::log(b / (1.0 - b));
}

inline double from_logit(double u) { return 1.0 / (1.0 + std::exp(-u)); }

inline double to_gamma(const ModelSpec& spec, double g) {
    if (gamma_nonnegative(spec)) {
        return to_shifted_log(g, gamma_scale(spec), "gamma");
    }
    if (!std::isfinite(g)) {
        throw std::domain_error("transform_params: gamma must be finite");
    }
    return g * gamma_scale(spec);
}

inline double from_gamma(const ModelSpec& spec, double u) {
    return gamma_nonnegative(spec) ? from_shifted_log(u, gamma_scale(spec))
                                   : u / gamma_scale(spec);
}

}  // namespace detail

/// Maps parameters to an unconstrained vector: log for omega, logit for beta,
/// shifted log for alpha (and GJR gamma), scaled identity for other gammas.
/// Shared coordinates take the plus-direction value.
[[nodiscard]] inline std::vector<double> transform_params(const ParamSet& p, const ModelSpec& spec,
                                                          const FitRestrictions& fixed = {}) {
    using detail::Coord;
    const double ws = detail::omega_scale(spec);
    const double as = detail::alpha_scale(spec);
    std::vector<double> v;
    for (Coord c : detail::coordinates(spec, fixed)) {
        switch (c) {
            case Coord::OmegaPlus: v.push_back(detail::to_log(p.omega_plus, ws, "omega")); break;
            case Coord::OmegaMinus: v.push_back(detail::to_log(p.omega_minus, ws, "omega")); break;
            case Coord::BetaShared:
            case Coord::BetaPlus: v.push_back(detail::to_logit(p.beta_plus)); break;
            case Coord::BetaMinus: v.push_back(detail::to_logit(p.beta_minus)); break;
            case Coord::AlphaShared:
            case Coord::AlphaPlus:
                v.push_back(detail::to_shifted_log(p.alpha_plus, as, "alpha"));
                break;
            case Coord::AlphaMinus:
                v.push_back(detail::to_shifted_log(p.alpha_minus, as, "alpha"));
                break;
            case Coord::GammaShared:
            case Coord::GammaPlus: v.push_back(detail::to_gamma(spec, p.gamma_plus)); break;
            case Coord::GammaMinus: v.push_back(detail::to_gamma(spec, p.gamma_minus)); break;
        }
    }
    return v;
}

[[nodiscard]] inline ParamSet untransform_params(std::span<const double> v, const ModelSpec& spec,
                                                 const FitRestrictions& fixed = {}) {
    using detail::Coord;
    const auto coords = detail::coordinates(spec, fixed);
    if (v.size() != coords.size()) {
        throw std::invalid_argument("untransform_params: wrong vector length");
    }
    const double ws = detail::omega_scale(spec);
    const double as = detail::alpha_scale(spec);
    ParamSet p;
    if (fixed.beta) {
        p.beta_plus = p.beta_minus = *fixed.beta;
    }
    if (fixed.alpha) {
        p.alpha_plus = p.alpha_minus = *fixed.alpha;
    }
    if (fixed.gamma) {
        p.gamma_plus = p.gamma_minus = *fixed.gamma;
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double u = v[i];
        switch (coords[i]) {
            case Coord::OmegaPlus: p.omega_plus = std::exp(u) / ws; break;
            case Coord::OmegaMinus: p.omega_minus = std::exp(u) / ws; break;
            case Coord::BetaShared: p.beta_plus = p.beta_minus = detail::from_logit(u); break;
            case Coord::BetaPlus: p.beta_plus = detail::from_logit(u); break;
            case Coord::BetaMinus: p.beta_minus = detail::from_logit(u); break;
            case Coord::AlphaShared:
                p.alpha_plus = p.alpha_minus = detail::from_shifted_log(u, as);
                break;
            case Coord::AlphaPlus: p.alpha_plus = detail::from_shifted_log(u, as); break;
            case Coord::AlphaMinus: p.alpha_minus = detail::from_shifted_log(u, as); break;
            case Coord::GammaShared:
                p.gamma_plus = p.gamma_minus = detail::from_gamma(spec, u);
                break;
            case Coord::GammaPlus: p.gamma_plus = detail::from_gamma(spec, u); break;
            case Coord::GammaMinus: p.gamma_minus = detail::from_gamma(spec, u); break;
        }
    }
    return p;
}

struct FitConfig {
    /// Objective evaluations per simplex run.
    int max_evaluations = 4000;
    int max_restarts = 8;
    /// Log-likelihood spread at which a simplex run counts as collapsed.
    double tolerance = 1e-8;
    int n_starts = 2;
    std::uint64_t seed = 1;
    /// Standard deviation of start perturbations in transformed coordinates.
    double start_spread = 0.3;
    double initial_step = 0.2;
    double restart_step = 0.05;
    std::optional<ParamSet> start;
    /// Fixed initial intensities; by default they follow the parameters
    /// through default_lambda0.
    std::optional<Intensities> lambda0;
    FitRestrictions fixed;
    unsigned threads = 0;
};

struct FitResult {
    ModelSpec spec;
    ParamSet params;
    NormalizedParams normalized;
    Intensities lambda0;
    double loglik = -std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    int start_points_used = 0;
    std::size_t n_obs = 0;
    double max_rounding_error = 0.0;
    FitRestrictions fixed;
    std::optional<ParamSet> se;
};

/// Starting point: beta = 0.9, alpha* = 0.03 (GJR: alpha* = 0.01, gamma* = 0.04),
/// omega* chosen so the implied long-run variance matches the sample and the
/// omega split reproduces the sample mean.
[[nodiscard]] inline ParamSet default_start(const ModelSpec& spec, std::span<const double> returns,
                                            const FitRestrictions& fixed = {}) {
    const double n = static_cast<double>(returns.size());
    double mean = 0.0;
    for (double x : returns) {
        mean += x;
    }
    mean /= n;
    double var = 0.0;
    for (double x : returns) {
        var += (x - mean) * (x - mean);
    }
    var /= std::max(n - 1.0, 1.0);
    var = std::max(var, spec.delta * spec.delta * 1e-3);

    const double d2 = spec.delta * spec.delta;
    const double beta = fixed.beta.value_or(0.9);
    double alpha_star = spec.variant == Variant::Gjr ? 0.01 : 0.03;
    double gamma_star = spec.variant == Variant::Gjr ? 0.04 : 0.0;
    if (fixed.alpha) {
        alpha_star = *fixed.alpha * detail::alpha_scale(spec);
    }
    if (fixed.gamma) {
        gamma_star = *fixed.gamma * detail::gamma_scale(spec);
    }
    // Long-run share of the variance carried by the news terms.
    double news_share = 0.0;
    if (spec.variant == Variant::HestonNandi || spec.variant == Variant::VGarch) {
        news_share = 0.0;
    } else if (spec.variant == Variant::Gjr) {
        news_share = 2.0 * (alpha_star + 0.5 * gamma_star);
    } else {
        news_share = 2.0 * alpha_star;
    }
    double omega_sum_star = var * (1.0 - beta - news_share);
    if (spec.variant == Variant::HestonNandi || spec.variant == Variant::VGarch) {
        omega_sum_star = var * (1.0 - beta) * 0.5;
    }
    if (!(omega_sum_star > 0.0)) {
        omega_sum_star = 0.01 * var;
    }
    const double omega_sum = omega_sum_star / d2;
    const double omega_diff = mean * (1.0 - beta) / spec.delta;
    ParamSet p;
    p.omega_plus = std::max(0.5 * (omega_sum + omega_diff), 0.1 * omega_sum);
    p.omega_minus = std::max(0.5 * (omega_sum - omega_diff), 0.1 * omega_sum);
    p.beta_plus = p.beta_minus = beta;
    if (spec.variant == Variant::HestonNandi || spec.variant == Variant::VGarch) {
        // News term in standardized units: alpha * E[z^2] ~ alpha* x long-run lambda sum.
        p.alpha_plus = p.alpha_minus = fixed.alpha.value_or(0.03 * var / d2);
    } else {
        p.alpha_plus = p.alpha_minus = alpha_star / detail::alpha_scale(spec);
    }
    p.gamma_plus = p.gamma_minus = has_gamma(spec.variant) ? gamma_star / detail::gamma_scale(spec)
                                                           : 0.0;
    if (fixed.gamma) {
        p.gamma_plus = p.gamma_minus = *fixed.gamma;
    }
    return p;
}

/// Conditions p on the restrictions and equality flags of spec.
[[nodiscard]] inline ParamSet conform(ParamSet p, const ModelSpec& spec,
                                      const FitRestrictions& fixed) {
    if (fixed.beta) {
        p.beta_plus = p.beta_minus = *fixed.beta;
    } else if (spec.beta_equal) {
        p.beta_plus = p.beta_minus = 0.5 * (p.beta_plus + p.beta_minus);
    }
    if (fixed.alpha) {
        p.alpha_plus = p.alpha_minus = *fixed.alpha;
    } else if (spec.alpha_equal) {
        p.alpha_plus = p.alpha_minus = 0.5 * (p.alpha_plus + p.alpha_minus);
    }
    if (!has_gamma(spec.variant)) {
        p.gamma_plus = p.gamma_minus = 0.0;
    } else if (fixed.gamma) {
        p.gamma_plus = p.gamma_minus = *fixed.gamma;
    } else if (spec.gamma_equal) {
        p.gamma_plus = p.gamma_minus = 0.5 * (p.gamma_plus + p.gamma_minus);
    }
    return p;
}

namespace detail {

// Keeps warm starts off the transform boundaries.
inline ParamSet interior(ParamSet p, const ModelSpec& spec) {
    const double tiny_omega = 1e-10 / (spec.delta * spec.delta);
    p.omega_plus = std::max(p.omega_plus, tiny_omega);
    p.omega_minus = std::max(p.omega_minus, tiny_omega);
    p.beta_plus = std::clamp(p.beta_plus, 1e-6, 1.0 - 1e-6);
    p.beta_minus = std::clamp(p.beta_minus, 1e-6, 1.0 - 1e-6);
    p.alpha_plus = std::max(p.alpha_plus, 0.0);
    p.alpha_minus = std::max(p.alpha_minus, 0.0);
    if (spec.variant == Variant::Gjr) {
        p.gamma_plus = std::max(p.gamma_plus, 0.0);
        p.gamma_minus = std::max(p.gamma_minus, 0.0);
    }
    return p;
}

}  // namespace detail

/// Maximum-likelihood fit of spec to returns by multi-start Nelder-Mead with
/// restarts in transformed coordinates. Non-convergence is reported in the
/// result, never thrown.
[[nodiscard]] inline FitResult fit_mle(const ModelSpec& spec, std::span<const double> returns,
                                       const FitConfig& config = {}) {
    validate(spec);
    if (returns.size() < 100) {
        throw std::invalid_argument("fit_mle: need at least 100 observations");
    }
    if (config.n_starts < 1) {
        throw std::invalid_argument("fit_mle: n_starts must be >= 1");
    }
    if (config.fixed.beta && (*config.fixed.beta < 0.0 || *config.fixed.beta >= 1.0)) {
        throw std::invalid_argument("fit_mle: fixed beta must lie in [0, 1)");
    }
    const CountSeries counts = returns_to_counts(returns, spec.delta);
    const FitRestrictions& fixed = config.fixed;

    ParamSet start = config.start ? *config.start : default_start(spec, returns, fixed);
    start = conform(detail::interior(start, spec), spec, fixed);
    const std::vector<double> x0 = transform_params(start, spec, fixed);

    auto lambda0_for = [&](const ParamSet& p) {
        return config.lambda0 ? *config.lambda0 : default_lambda0(spec, p);
    };
    auto objective = [&](const std::vector<double>& v) {
        try {
            const ParamSet p = untransform_params(v, spec, fixed);
            const double ll = log_likelihood(spec, p, counts.counts, lambda0_for(p));
            return std::isnan(ll) ? std::numeric_limits<double>::infinity() : -ll;
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    RestartOptions ropt;
    ropt.simplex.max_evaluations = config.max_evaluations;
    ropt.simplex.f_tolerance = config.tolerance;
    ropt.simplex.initial_step = config.initial_step;
    ropt.restart_step = config.restart_step;
    ropt.max_restarts = config.max_restarts;

    const auto n_starts = static_cast<std::size_t>(config.n_starts);
    std::vector<MinimizeResult> runs(n_starts);
    parallel_for(
        n_starts,
        [&](std::size_t k) {
            std::vector<double> x = x0;
            if (k > 0) {
                Rng rng(derive_seed(config.seed, k));
                for (auto& xi : x) {
                    xi += config.start_spread * normal_sample(rng);
                }
            }
            runs[k] = minimize_with_restarts(objective, std::move(x), ropt);
        },
        config.threads);

    std::size_t best = 0;
    for (std::size_t k = 1; k < runs.size(); ++k) {
        if (runs[k].f < runs[best].f) {
            best = k;
        }
    }
    FitResult out;
    out.spec = spec;
    out.fixed = fixed;
    out.n_obs = returns.size();
    out.max_rounding_error = counts.max_rounding_error;
    out.start_points_used = config.n_starts;
    for (const auto& r : runs) {
        out.iterations += r.iterations;
        out.evaluations += r.evaluations;
    }
    out.params = untransform_params(runs[best].x, spec, fixed);
    out.lambda0 = lambda0_for(out.params);
    out.loglik = log_likelihood(spec, out.params, counts.counts, out.lambda0);
    out.converged = runs[best].converged && std::isfinite(out.loglik);
    out.normalized = normalize_params(out.params, spec.delta);
    return out;
}

/// Log-likelihood of a fitted model on returns, recomputed from scratch.
[[nodiscard]] inline double refit_loglik(const FitResult& fit, std::span<const double> returns) {
    return log_likelihood_returns(fit.spec, fit.params, returns, fit.lambda0);
}

/// Conditional moments implied by a fit; the filter runs on the discretized
/// returns used by the likelihood.
[[nodiscard]] inline InferredMoments inferred_moments(const FitResult& fit,
                                                      std::span<const double> returns) {
    const CountSeries c = returns_to_counts(returns, fit.spec.delta);
    std::vector<double> discrete(c.counts.size());
    for (std::size_t i = 0; i < discrete.size(); ++i) {
        discrete[i] = fit.spec.delta * static_cast<double>(c.counts[i]);
    }
    const IntensityPath path = filter(fit.spec, fit.params, discrete, fit.lambda0);
    return inferred_moments(path, fit.spec.delta, fit.spec.dt);
}

struct BootstrapOptions {
    /// Reuse one seed for every replicate (every replicate then sees the same data).
    bool same_seed_each_replicate = false;
    /// At most this fraction of replicates may fail to converge.
    double max_drop_fraction = 0.2;
};

struct BootstrapResult {
    ParamSet se;
    ParamSet mean;
    std::vector<ParamSet> estimates;
    std::size_t used = 0;
    std::size_t dropped = 0;
};

namespace detail {

inline BootstrapResult summarize_replicates(std::vector<std::optional<ParamSet>> reps,
                                            double max_drop_fraction) {
    BootstrapResult out;
    for (auto& r : reps) {
        if (r) {
            out.estimates.push_back(*r);
        } else {
            ++out.dropped;
        }
    }
    out.used = out.estimates.size();
    if (static_cast<double>(out.dropped) > max_drop_fraction * static_cast<double>(reps.size()) ||
        out.used < 2) {
        throw std::runtime_error("bootstrap: too many replicates failed to converge (" +
                                 std::to_string(out.dropped) + " of " +
                                 std::to_string(reps.size()) + ")");
    }
    // Moments of the deviations from the first replicate, so identical
    // replicates give an exactly zero spread.
    const auto origin = to_array(out.estimates.front());
    std::array<double, 8> shift{};
    for (const auto& e : out.estimates) {
        const auto a = to_array(e);
        for (std::size_t j = 0; j < 8; ++j) {
            shift[j] += a[j] - origin[j];
        }
    }
    for (auto& m : shift) {
        m /= static_cast<double>(out.used);
    }
    std::array<double, 8> ss{};
    for (const auto& e : out.estimates) {
        const auto a = to_array(e);
        for (std::size_t j = 0; j < 8; ++j) {
            const double d = (a[j] - origin[j]) - shift[j];
            ss[j] += d * d;
        }
    }
    std::array<double, 8> mean{};
    for (std::size_t j = 0; j < 8; ++j) {
        ss[j] = std::sqrt(ss[j] / static_cast<double>(out.used - 1));
        mean[j] = origin[j] + shift[j];
    }
    out.mean = from_array(mean);
    out.se = from_array(ss);
    return out;
}

inline FitConfig replicate_config(const FitConfig& base, const ParamSet& start,
                                  std::uint64_t seed) {
    FitConfig c = base;
    c.start = start;
    c.seed = seed;
    c.threads = 1;
    return c;
}

}  // namespace detail

/// Parametric bootstrap: B series of the original length are simulated from
/// the fitted model and refitted (warm-started at the fit). Replicate b uses
/// derive_seed(seed, b); replicates run concurrently with deterministic output.
[[nodiscard]] inline BootstrapResult bootstrap_se(const FitResult& fit, std::size_t B,
                                                  std::uint64_t seed,
                                                  const FitConfig& refit_config = {},
                                                  const BootstrapOptions& options = {}) {
    if (!fit.converged) {
        throw std::invalid_argument("bootstrap_se: fit did not converge");
    }
    if (B < 50) {
        throw std::invalid_argument("bootstrap_se: need B >= 50");
    }
    FitConfig base = refit_config;
    base.fixed = fit.fixed;
    std::vector<std::optional<ParamSet>> reps(B);
    parallel_for(
        B,
        [&](std::size_t b) {
            const std::uint64_t s = derive_seed(seed, options.same_seed_each_replicate ? 0 : b);
            const SimulatedPath sim =
                simulate_path(fit.spec, fit.params, fit.n_obs, fit.lambda0, 1.0, s);
            const FitResult r =
                fit_mle(fit.spec, sim.path.returns, detail::replicate_config(base, fit.params, s));
            if (r.converged) {
                reps[b] = r.params;
            }
        },
        refit_config.threads);
    return detail::summarize_replicates(std::move(reps), options.max_drop_fraction);
}

struct EqualityTestResult {
    /// alpha_plus - alpha_minus on the data.
    double statistic = 0.0;
    double p_value = 1.0;
    FitResult unrestricted;
    FitResult restricted;
    /// Statistic on each null replicate (before recentering).
    std::vector<double> null_statistics;
    std::size_t dropped = 0;
};

/// Bootstrap test of alpha_plus == alpha_minus. Null replicates are simulated
/// from the restricted fit and refitted without the restriction; the p-value
/// is two-sided against the recentered null distribution.
[[nodiscard]] inline EqualityTestResult test_alpha_equality(const ModelSpec& spec,
                                                            std::span<const double> returns,
                                                            std::size_t B, std::uint64_t seed,
                                                            const FitConfig& config = {},
                                                            std::optional<FitConfig> refit_config = {}) {
    if (spec.alpha_equal) {
        throw std::invalid_argument("test_alpha_equality: model must allow distinct alphas");
    }
    if (config.fixed.alpha) {
        throw std::invalid_argument("test_alpha_equality: alpha must be free");
    }
    if (B < 50) {
        throw std::invalid_argument("test_alpha_equality: need B >= 50");
    }
    EqualityTestResult out;
    out.unrestricted = fit_mle(spec, returns, config);
    ModelSpec null_spec = spec;
    null_spec.alpha_equal = true;
    FitConfig null_config = config;
    null_config.start = conform(out.unrestricted.params, null_spec, config.fixed);
    out.restricted = fit_mle(null_spec, returns, null_config);
    out.statistic = out.unrestricted.params.alpha_plus - out.unrestricted.params.alpha_minus;

    FitConfig refit = refit_config.value_or(config);
    refit.fixed = config.fixed;
    std::vector<std::optional<double>> stats(B);
    parallel_for(
        B,
        [&](std::size_t b) {
            const std::uint64_t s = derive_seed(seed, b);
            const SimulatedPath sim = simulate_path(null_spec, out.restricted.params, returns.size(),
                                                    out.restricted.lambda0, 1.0, s);
            const FitResult r = fit_mle(
                spec, sim.path.returns,
                detail::replicate_config(refit, out.restricted.params, s));
            if (r.converged) {
                stats[b] = r.params.alpha_plus - r.params.alpha_minus;
            }
        },
        config.threads);
    for (const auto& s : stats) {
        if (s) {
            out.null_statistics.push_back(*s);
        } else {
            ++out.dropped;
        }
    }
    if (static_cast<double>(out.dropped) > 0.2 * static_cast<double>(B)) {
        throw std::runtime_error("test_alpha_equality: too many replicates failed to converge");
    }
    double center = 0.0;
    for (double t : out.null_statistics) {
        center += t;
    }
    center /= static_cast<double>(out.null_statistics.size());
    std::size_t extreme = 0;
    for (double t : out.null_statistics) {
        if (std::fabs(t - center) >= std::fabs(out.statistic)) {
            ++extreme;
        }
    }
    out.p_value = static_cast<double>(1 + extreme) /
                  static_cast<double>(out.null_statistics.size() + 1);
    return out;
}

/// The four nested intensity models:
///   I   basic, common beta and alpha        II  GJR, common beta, alpha, gamma
///   III basic, per-direction beta and alpha IV  GJR, everything per direction
struct ModelComparison {
    FitResult model_i;
    FitResult model_ii;
    FitResult model_iii;
    FitResult model_iv;
};

[[nodiscard]] inline ModelSpec nested_model_spec(int which, double delta) {
    ModelSpec s;
    s.delta = delta;
    s.variant = (which == 2 || which == 4) ? Variant::Gjr : Variant::Basic;
    const bool common = which == 1 || which == 2;
    s.beta_equal = common;
    s.alpha_equal = common;
    s.gamma_equal = which == 2;
    return s;
}

namespace detail {

inline FitResult best_of(const ModelSpec& spec, std::span<const double> returns,
                         const FitConfig& config, const std::vector<ParamSet>& warm_starts) {
    FitResult best = fit_mle(spec, returns, config);
    for (const auto& ws : warm_starts) {
        FitConfig c = config;
        c.start = conform(ws, spec, config.fixed);
        FitResult r = fit_mle(spec, returns, c);
        if (r.loglik > best.loglik) {
            best = std::move(r);
        }
    }
    return best;
}

}  // namespace detail

/// Fits models I-IV, warm-starting each larger model from the optima of the
/// models it nests, so the fitted likelihoods respect the nesting.
[[nodiscard]] inline ModelComparison compare_nested_models(std::span<const double> returns,
                                                           double delta,
                                                           const FitConfig& config = {}) {
    ModelComparison out;
    out.model_i = fit_mle(nested_model_spec(1, delta), returns, config);
    ParamSet from_i = out.model_i.params;
    from_i.gamma_plus = from_i.gamma_minus = 0.0;
    out.model_ii = detail::best_of(nested_model_spec(2, delta), returns, config, {from_i});
    out.model_iii = detail::best_of(nested_model_spec(3, delta), returns, config, {from_i});
    ParamSet from_iii = out.model_iii.params;
    from_iii.gamma_plus = from_iii.gamma_minus = 0.0;
    out.model_iv = detail::best_of(nested_model_spec(4, delta), returns, config,
                                   {out.model_ii.params, from_iii});
    return out;
}

}  // namespace sgarch
