#pragma once

#include "sgarch/optimize.hpp"
#include "sgarch/parallel.hpp"
#include "sgarch/random.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgarch {

/// Gaussian ARMA(1,1)-GJR-GARCH(1,1):
///   X_i = c + ar1 X_{i-1} + e_i + ma1 e_{i-1}
///   s2_i = omega + beta s2_{i-1} + (alpha + gamma_lev I_{i-1}) e_{i-1}^2, I = [e < 0]
struct GjrGarchParams {
    double c = 0.0;
    double ar1 = 0.0;
    double ma1 = 0.0;
    double omega = 1e-6;
    double beta = 0.9;
    double alpha = 0.05;
    double gamma_lev = 0.0;

    bool operator==(const GjrGarchParams&) const = default;

    [[nodiscard]] double persistence() const { return alpha + 0.5 * gamma_lev + beta; }
};

struct GjrFilterResult {
    std::vector<double> eps;
    std::vector<double> sigma2;
    /// One-step conditional mean c + ar1 X_{i-1} + ma1 e_{i-1}.
    std::vector<double> cond_mean;
};

/// Pre-sample values are X_{-1} = e_{-1} = 0 and s2_0 = sigma0_sq.
[[nodiscard]] inline GjrFilterResult gjr_variance_filter(const GjrGarchParams& p,
                                                         std::span<const double> returns,
                                                         double sigma0_sq) {
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) {
        throw std::invalid_argument("gjr_variance_filter: sigma0^2 must be positive");
    }
    GjrFilterResult out;
    const std::size_t n = returns.size();
    out.eps.resize(n);
    out.sigma2.resize(n);
    out.cond_mean.resize(n);
    double x_prev = 0.0;
    double e_prev = 0.0;
    double s2_prev = sigma0_sq;
    for (std::size_t i = 0; i < n; ++i) {
        double s2 = sigma0_sq;
        if (i > 0) {
            const double lev = e_prev < 0.0 ? p.gamma_lev : 0.0;
            s2 = p.omega + p.beta * s2_prev + (p.alpha + lev) * e_prev * e_prev;
        }
        const double m = p.c + p.ar1 * x_prev + p.ma1 * e_prev;
        const double e = returns[i] - m;
        out.cond_mean[i] = m;
        out.eps[i] = e;
        out.sigma2[i] = s2;
        x_prev = returns[i];
        e_prev = e;
        s2_prev = s2;
    }
    return out;
}

[[nodiscard]] inline double gjr_garch_loglik(const GjrGarchParams& p, std::span<const double> returns,
                                             double sigma0_sq) {
    const GjrFilterResult f = gjr_variance_filter(p, returns, sigma0_sq);
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    double ll = 0.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        if (!(f.sigma2[i] > 0.0)) {
            return -std::numeric_limits<double>::infinity();
        }
        ll -= 0.5 * (log_2pi + std::log(f.sigma2[i]) + f.eps[i] * f.eps[i] / f.sigma2[i]);
    }
    return ll;
}

/// Gaussian path with pre-sample values as in gjr_variance_filter.
[[nodiscard]] inline std::vector<double> simulate_gjr_garch(const GjrGarchParams& p, std::size_t n,
                                                            double sigma0_sq, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    double x_prev = 0.0;
    double e_prev = 0.0;
    double s2 = sigma0_sq;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double lev = e_prev < 0.0 ? p.gamma_lev : 0.0;
            s2 = p.omega + p.beta * s2 + (p.alpha + lev) * e_prev * e_prev;
        }
        const double e = std::sqrt(s2) * normal_sample(rng);
        x[i] = p.c + p.ar1 * x_prev + p.ma1 * e_prev + e;
        x_prev = x[i];
        e_prev = e;
    }
    return x;
}

struct GjrGarchFit {
    GjrGarchParams params;
    double loglik = -std::numeric_limits<double>::infinity();
    double sigma0_sq = 0.0;
    bool converged = false;
    /// persistence < 1
    bool stationary = false;
    int evaluations = 0;
};

struct GjrGarchConfig {
    int max_evaluations = 6000;
    int max_restarts = 8;
    double tolerance = 1e-8;
    int n_starts = 2;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

namespace detail {

// Coordinates: c / sd, atanh(ar1), atanh(ma1), log(omega / var), logit(beta),
// shifted log(alpha), shifted log(alpha + gamma_lev).
struct GjrLayout {
    double mean_scale;
    double var_scale;

    [[nodiscard]] GjrGarchParams decode(const std::vector<double>& v) const {
        GjrGarchParams p;
        p.c = v[0] * mean_scale;
        p.ar1 = std::tanh(v[1]);
        p.ma1 = std::tanh(v[2]);
        p.omega = std::exp(v[3]) * var_scale;
        p.beta = 1.0 / (1.0 + std::exp(-v[4]));
        p.alpha = std::max(std::exp(v[5]) - 1e-6, 0.0);
        p.gamma_lev = std::max(std::exp(v[6]) - 1e-6, 0.0) - p.alpha;
        return p;
    }

    [[nodiscard]] std::vector<double> encode(const GjrGarchParams& p) const {
        return {p.c / mean_scale,
                std::atanh(p.ar1),
                std::atanh(p.ma1),
                std::log(p.omega / var_scale),
                std::log(p.beta / (1.0 - p.beta)),
                std::log(p.alpha + 1e-6),
                std::log(p.alpha + p.gamma_lev + 1e-6)};
    }
};

}  // namespace detail

/// Gaussian MLE with s2_0 fixed at the sample variance.
[[nodiscard]] inline GjrGarchFit fit_gjr_garch_gaussian(std::span<const double> returns,
                                                        const GjrGarchConfig& config = {}) {
    if (returns.size() < 100) {
        throw std::invalid_argument("fit_gjr_garch_gaussian: need at least 100 observations");
    }
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
    var /= n;
    if (!(var > 0.0)) {
        throw std::invalid_argument("fit_gjr_garch_gaussian: constant series");
    }
    const detail::GjrLayout layout{std::sqrt(var), var};

    GjrGarchParams start;
    start.c = mean;
    start.ar1 = 0.05;
    start.ma1 = 0.0;
    start.beta = 0.9;
    start.alpha = 0.03;
    start.gamma_lev = 0.05;
    start.omega = var * (1.0 - start.persistence());
    const std::vector<double> x0 = layout.encode(start);

    auto objective = [&](const std::vector<double>& v) {
        const GjrGarchParams p = layout.decode(v);
        if (!std::isfinite(p.omega) || std::fabs(p.ar1) >= 1.0 || std::fabs(p.ma1) >= 1.0) {
            return std::numeric_limits<double>::infinity();
        }
        return -gjr_garch_loglik(p, returns, var);
    };

    RestartOptions ropt;
    ropt.simplex.max_evaluations = config.max_evaluations;
    ropt.simplex.f_tolerance = config.tolerance;
    ropt.simplex.initial_step = 0.2;
    ropt.max_restarts = config.max_restarts;

    const auto n_starts = static_cast<std::size_t>(std::max(config.n_starts, 1));
    std::vector<MinimizeResult> runs(n_starts);
    parallel_for(
        n_starts,
        [&](std::size_t k) {
            std::vector<double> x = x0;
            if (k > 0) {
                Rng rng(derive_seed(config.seed, k));
                for (auto& xi : x) {
                    xi += 0.3 * normal_sample(rng);
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
    GjrGarchFit out;
    out.params = layout.decode(runs[best].x);
    out.sigma0_sq = var;
    out.loglik = gjr_garch_loglik(out.params, returns, var);
    out.converged = runs[best].converged && std::isfinite(out.loglik);
    out.stationary = out.params.persistence() < 1.0;
    for (const auto& r : runs) {
        out.evaluations += r.evaluations;
    }
    return out;
}

}  // namespace sgarch
