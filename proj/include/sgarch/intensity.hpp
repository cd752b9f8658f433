#pragma once

#include "sgarch/model.hpp"
#include "sgarch/skellam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgarch {

/// Up/down jump intensities per unit time at one observation date.
struct Intensities {
    double plus = 0.0;
    double minus = 0.0;

    friend bool operator==(const Intensities&, const Intensities&) = default;
};

/// Nearest integer, ties away from zero.
[[nodiscard]] inline std::int64_t jump_count(double x, double delta) {
    return static_cast<std::int64_t>(std::llround(x / delta));
}

namespace detail {

inline double news_term(Variant v, double alpha, double gamma, double eps, double h) {
    switch (v) {
        case Variant::Basic: return alpha * eps * eps;
        case Variant::AsymGarch: {
            const double d = eps - gamma;
            return alpha * d * d;
        }
        case Variant::NonlinAsym: {
            const double d = eps - gamma * std::sqrt(h);
            return alpha * d * d;
        }
        case Variant::Gjr: return (alpha + (eps < 0.0 ? gamma : 0.0)) * eps * eps;
        case Variant::NewsType: {
            const double d = eps + gamma * std::fabs(eps);
            return alpha * d * d;
        }
        case Variant::QGarch: return alpha * eps * eps + gamma * eps;
        case Variant::HestonNandi: {
            const double d = eps / std::sqrt(h) - gamma * std::sqrt(h);
            return alpha * d * d;
        }
        case Variant::VGarch: {
            const double d = eps / std::sqrt(h) - gamma;
            return alpha * d * d;
        }
    }
    return 0.0;
}

}  // namespace detail

/// One step of the intensity recursion: lambda(t_i) from lambda(t_{i-1}) and
/// the shock eps(t_i) with its conditional variance h(t_i). Floored at kRateFloor.
[[nodiscard]] inline Intensities intensity_step(const ModelSpec& spec, const ParamSet& p,
                                                Intensities prev, double eps_now, double h_now) {
    if (!std::isfinite(prev.plus) || !std::isfinite(prev.minus) || !std::isfinite(eps_now) ||
        !std::isfinite(h_now)) {
        throw std::domain_error("intensity_step: non-finite input");
    }
    if (uses_variance(spec.variant) && h_now <= 0.0) {
        throw std::domain_error("intensity_step: variant requires h > 0");
    }
    const double up = p.omega_plus + p.beta_plus * prev.plus +
                      detail::news_term(spec.variant, p.alpha_plus, p.gamma_plus, eps_now, h_now);
    const double down =
        p.omega_minus + p.beta_minus * prev.minus +
        detail::news_term(spec.variant, p.alpha_minus, p.gamma_minus, eps_now, h_now);
    if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::domain_error("intensity_step: intensity overflow");
    }
    return {std::max(up, kRateFloor), std::max(down, kRateFloor)};
}

/// Conditional mean and variance of the return over the step, given the
/// intensities in force at its start.
[[nodiscard]] inline double conditional_mean(Intensities lam, double delta, double dt) {
    return delta * (lam.plus - lam.minus) * dt;
}

[[nodiscard]] inline double conditional_variance(Intensities lam, double delta, double dt) {
    return delta * delta * (lam.plus + lam.minus) * dt;
}

namespace detail {

// Drives the recursion over n observations. return_at(i) yields the return
// used for the residual at step i; visit(i, lambda_prev, x, eps, h) sees the
// state before the update.
template <class ReturnAt, class Visit>
Intensities run_filter(const ModelSpec& spec, const ParamSet& p, std::size_t n,
                       ReturnAt&& return_at, Intensities lambda0, Visit&& visit) {
    Intensities lam = lambda0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = return_at(i);
        const double h = conditional_variance(lam, spec.delta, spec.dt);
        const double eps = x - conditional_mean(lam, spec.delta, spec.dt);
        visit(i, lam, x, eps, h);
        lam = intensity_step(spec, p, lam, eps, h);
    }
    return lam;
}

}  // namespace detail

/// Filtered latent state for a return series of length n.
/// lambda_plus/lambda_minus hold n + 1 entries: index i is lambda(t_i), index 0
/// the initial condition. returns/eps/h/counts hold n entries: index i
/// describes the step from t_i to t_{i+1}, so
///   h[i]   = delta^2 (lambda_plus[i] + lambda_minus[i]) dt
///   eps[i] = returns[i] - delta (lambda_plus[i] - lambda_minus[i]) dt.
struct IntensityPath {
    std::vector<double> lambda_plus;
    std::vector<double> lambda_minus;
    std::vector<double> returns;
    std::vector<double> eps;
    std::vector<double> h;
    std::vector<std::int64_t> counts;

    [[nodiscard]] std::size_t size() const noexcept { return returns.size(); }
    [[nodiscard]] Intensities lambda(std::size_t i) const {
        return {lambda_plus.at(i), lambda_minus.at(i)};
    }
};

/// Rebuilds the latent intensities implied by returns under (spec, p).
[[nodiscard]] inline IntensityPath filter(const ModelSpec& spec, const ParamSet& p,
                                          std::span<const double> returns, Intensities lambda0) {
    validate(spec);
    if (!(lambda0.plus > 0.0) || !(lambda0.minus > 0.0)) {
        throw std::domain_error("filter: initial intensities must be positive");
    }
    IntensityPath path;
    const std::size_t n = returns.size();
    path.lambda_plus.reserve(n + 1);
    path.lambda_minus.reserve(n + 1);
    path.returns.reserve(n);
    path.eps.reserve(n);
    path.h.reserve(n);
    path.counts.reserve(n);
    path.lambda_plus.push_back(lambda0.plus);
    path.lambda_minus.push_back(lambda0.minus);
    const Intensities last = detail::run_filter(
        spec, p, n, [&](std::size_t i) { return returns[i]; }, lambda0,
        [&](std::size_t i, Intensities lam, double x, double eps, double h) {
            if (i > 0) {
                path.lambda_plus.push_back(lam.plus);
                path.lambda_minus.push_back(lam.minus);
            }
            path.returns.push_back(x);
            path.eps.push_back(eps);
            path.h.push_back(h);
            path.counts.push_back(jump_count(x, spec.delta));
        });
    if (n > 0) {
        path.lambda_plus.push_back(last.plus);
        path.lambda_minus.push_back(last.minus);
    }
    return path;
}

/// Drift, Ito correction, conditional mean and conditional variance of the
/// log-return over one step. mu - ito == cond_mean.
struct ReturnDecomposition {
    double mu = 0.0;
    double ito = 0.0;
    double cond_mean = 0.0;
    double cond_var = 0.0;
};

namespace detail {

// e^d - 1 - d without cancellation for small |d|.
inline double expm1_minus_linear(double d) {
    if (std::fabs(d) < 0.1) {
        double term = d * d / 2.0;
        double sum = 0.0;
        for (int k = 3; k < 30 && std::fabs(term) > 1e-300; ++k) {
            sum += term;
            term *= d / k;
        }
        return sum;
    }
    return std::expm1(d) - d;
}

}  // namespace detail

[[nodiscard]] inline ReturnDecomposition decompose_return(Intensities lambda_prev, double delta,
                                                          double dt) {
    if (!(lambda_prev.plus >= 0.0) || !(lambda_prev.minus >= 0.0) || !(delta > 0.0) ||
        !(dt > 0.0)) {
        throw std::domain_error("decompose_return: invalid input");
    }
    // mu = {(e^d - 1) l+ + (e^-d - 1) l-} dt, assembled from its linear part and
    // the Ito term so that near-equal intensities do not cancel.
    const double up_ito = detail::expm1_minus_linear(delta);
    const double down_ito = detail::expm1_minus_linear(-delta);
    const double ito = (up_ito * lambda_prev.plus + down_ito * lambda_prev.minus) * dt;
    const double mean = conditional_mean(lambda_prev, delta, dt);
    return {
        mean + ito,
        ito,
        mean,
        conditional_variance(lambda_prev, delta, dt),
    };
}

/// Long-run mean of h for the basic model with a common beta:
///   delta^2 (omega+ + omega-) / (1 - beta - delta^2 (alpha+ + alpha-) dt).
/// Multiply by dt for the variance of one step.
[[nodiscard]] inline double unconditional_variance(const ModelSpec& spec, const ParamSet& p) {
    if (spec.variant != Variant::Basic) {
        throw std::invalid_argument("unconditional_variance: only defined for the basic variant");
    }
    if (!spec.beta_equal || p.beta_plus != p.beta_minus) {
        throw std::invalid_argument("unconditional_variance: requires beta_plus == beta_minus");
    }
    const double d2 = spec.delta * spec.delta;
    const double denom = 1.0 - p.beta_plus - d2 * (p.alpha_plus + p.alpha_minus) * spec.dt;
    if (!(denom > 0.0)) {
        throw std::domain_error("unconditional_variance: parameters are not weakly stationary");
    }
    return d2 * (p.omega_plus + p.omega_minus) / denom;
}

/// Jump-size-invariant parameters: omega* = omega delta^2, alpha* = alpha delta^2,
/// gamma* = gamma delta^2; beta unchanged.
struct NormalizedParams {
    ParamSet values;
    /// alpha+* + alpha-* + max(beta+, beta-); below 1 means weakly stationary
    /// for the basic recursion.
    double stationarity_margin = 0.0;
};

[[nodiscard]] inline NormalizedParams normalize_params(const ParamSet& p, double delta) {
    const double d2 = delta * delta;
    ParamSet n = p;
    n.omega_plus *= d2;
    n.omega_minus *= d2;
    n.alpha_plus *= d2;
    n.alpha_minus *= d2;
    n.gamma_plus *= d2;
    n.gamma_minus *= d2;
    return {n, n.alpha_plus + n.alpha_minus + std::max(p.beta_plus, p.beta_minus)};
}

/// Initial intensities for filtering: the long-run mean implied by the
/// recursion (exact for basic/QGARCH, with symmetric-shock moments for the
/// others), falling back to omega / (1 - beta) when that has no positive solution.
[[nodiscard]] inline Intensities default_lambda0(const ModelSpec& spec, const ParamSet& p) {
    const double s = spec.delta * spec.delta * spec.dt;  // E[eps^2] per unit of lambda sum
    struct Coef {
        double constant;
        double slope;
    };
    auto coef = [&](double alpha, double gamma) -> Coef {
        switch (spec.variant) {
            case Variant::Basic:
            case Variant::QGarch: return {0.0, alpha * s};
            case Variant::Gjr: return {0.0, (alpha + 0.5 * gamma) * s};
            case Variant::NewsType:
            case Variant::NonlinAsym: return {0.0, alpha * (1.0 + gamma * gamma) * s};
            case Variant::AsymGarch: return {alpha * gamma * gamma, alpha * s};
            case Variant::HestonNandi: return {alpha, alpha * gamma * gamma * s};
            case Variant::VGarch: return {alpha * (1.0 + gamma * gamma), 0.0};
        }
        return {0.0, 0.0};
    };
    const Coef up = coef(p.alpha_plus, p.gamma_plus);
    const Coef down = coef(p.alpha_minus, p.gamma_minus);
    const double a11 = 1.0 - p.beta_plus - up.slope;
    const double a12 = -up.slope;
    const double a21 = -down.slope;
    const double a22 = 1.0 - p.beta_minus - down.slope;
    const double b1 = p.omega_plus + up.constant;
    const double b2 = p.omega_minus + down.constant;
    const double det = a11 * a22 - a12 * a21;
    if (det > 0.0 && a11 > 0.0 && a22 > 0.0) {
        const Intensities lam{(b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det};
        if (lam.plus > 0.0 && lam.minus > 0.0 && std::isfinite(lam.plus) &&
            std::isfinite(lam.minus)) {
            return lam;
        }
    }
    return {std::max(p.omega_plus / (1.0 - p.beta_plus), kRateFloor),
            std::max(p.omega_minus / (1.0 - p.beta_minus), kRateFloor)};
}

}  // namespace sgarch
