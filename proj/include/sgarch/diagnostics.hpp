#pragma once

#include "sgarch/intensity.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sgarch {

/// Sign filter on one side of a lagged pair. Zero satisfies only Any.
enum class SignCondition { Any, Positive, Negative };

/// Transform applied to one side of a lagged pair before correlating.
enum class PairTransform { Identity, Negate, Absolute };

/// Selects pairs (x_t, x_{t-lag}) by sign and transforms each side:
/// Corr(f(X_t), g(X_{t-lag}) | current(X_t), past(X_{t-lag})).
struct ConditionalPair {
    SignCondition current = SignCondition::Any;
    SignCondition past = SignCondition::Any;
    PairTransform current_transform = PairTransform::Identity;
    PairTransform past_transform = PairTransform::Identity;
};

struct CorrelationEstimate {
    /// Empty when fewer than 3 pairs qualify or either side is constant.
    std::optional<double> corr;
    std::size_t n = 0;
};

namespace detail {

inline bool satisfies(SignCondition c, double v) {
    switch (c) {
        case SignCondition::Any: return true;
        case SignCondition::Positive: return v > 0.0;
        case SignCondition::Negative: return v < 0.0;
    }
    return false;
}

inline double apply(PairTransform t, double v) {
    switch (t) {
        case PairTransform::Identity: return v;
        case PairTransform::Negate: return -v;
        case PairTransform::Absolute: return std::fabs(v);
    }
    return v;
}

}  // namespace detail

/// Pearson correlation over the qualifying pairs, with means and variances
/// taken over the conditioned subsample.
[[nodiscard]] inline CorrelationEstimate conditional_correlation(std::span<const double> x,
                                                                 std::size_t lag,
                                                                 const ConditionalPair& pair) {
    if (lag < 1 || x.size() <= lag + 2) {
        throw std::invalid_argument("conditional_correlation: need lag >= 1 and length > lag + 2");
    }
    std::vector<double> a;
    std::vector<double> b;
    a.reserve(x.size() - lag);
    b.reserve(x.size() - lag);
    for (std::size_t t = lag; t < x.size(); ++t) {
        const double now = x[t];
        const double past = x[t - lag];
        if (detail::satisfies(pair.current, now) && detail::satisfies(pair.past, past)) {
            a.push_back(detail::apply(pair.current_transform, now));
            b.push_back(detail::apply(pair.past_transform, past));
        }
    }
    CorrelationEstimate out;
    out.n = a.size();
    if (out.n < 3) {
        return out;
    }
    const double dn = static_cast<double>(out.n);
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < out.n; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= dn;
    mean_b /= dn;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < out.n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) {
        return out;
    }
    out.corr = sab / std::sqrt(saa * sbb);
    return out;
}

struct CorrelogramRow {
    std::size_t lag = 0;
    std::optional<double> corr;
    std::size_t n = 0;
    double band = 0.0;  // 1.96 / sqrt(n)
};

[[nodiscard]] inline std::vector<CorrelogramRow> correlogram_table(std::span<const double> x,
                                                                   std::size_t max_lag,
                                                                   const ConditionalPair& pair) {
    std::vector<CorrelogramRow> rows;
    rows.reserve(max_lag);
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        const CorrelationEstimate est = conditional_correlation(x, lag, pair);
        const double band =
            est.n > 0 ? 1.96 / std::sqrt(static_cast<double>(est.n))
                      : std::numeric_limits<double>::infinity();
        rows.push_back({lag, est.corr, est.n, band});
    }
    return rows;
}

/// Q_N = Tbar (Tbar + 2) sum_l corr_l^2 / (T_l - l), T_l the qualifying pair
/// count at lag l and Tbar their mean. Undefined correlations contribute zero.
[[nodiscard]] inline double modified_ljung_box(std::span<const double> x, std::size_t max_lag,
                                               const ConditionalPair& pair) {
    if (max_lag < 1) {
        throw std::invalid_argument("modified_ljung_box: max_lag must be >= 1");
    }
    std::vector<CorrelationEstimate> est;
    est.reserve(max_lag);
    double t_sum = 0.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        est.push_back(conditional_correlation(x, lag, pair));
        if (est.back().n <= lag) {
            throw std::domain_error("modified_ljung_box: too few qualifying pairs at lag " +
                                    std::to_string(lag));
        }
        t_sum += static_cast<double>(est.back().n);
    }
    const double t_bar = t_sum / static_cast<double>(max_lag);
    double q = 0.0;
    for (std::size_t l = 0; l < max_lag; ++l) {
        if (est[l].corr) {
            const double c = *est[l].corr;
            q += c * c / static_cast<double>(est[l].n - (l + 1));
        }
    }
    return t_bar * (t_bar + 2.0) * q;
}

/// A labelled conditional correlation, as in the rows of a correlogram report.
struct NamedPair {
    std::string id;
    std::string name;
    ConditionalPair pair;
};

/// The six sign-conditioned rows used throughout: current-sign vs past
/// volatility, and the four current/past sign quadrants, oriented so that
/// volatility clustering shows up as positive values.
[[nodiscard]] inline std::vector<NamedPair> standard_conditional_pairs() {
    using S = SignCondition;
    using T = PairTransform;
    return {
        {"pos_abs", "corr(X_t,|X_t-l| | X_t>0)", {S::Positive, S::Any, T::Identity, T::Absolute}},
        {"neg_abs", "corr(-X_t,|X_t-l| | X_t<0)", {S::Negative, S::Any, T::Negate, T::Absolute}},
        {"pos_pos", "corr(X_t,X_t-l | X_t>0,X_t-l>0)", {S::Positive, S::Positive, T::Identity, T::Identity}},
        {"pos_neg", "corr(X_t,-X_t-l | X_t>0,X_t-l<0)", {S::Positive, S::Negative, T::Identity, T::Negate}},
        {"neg_neg", "corr(-X_t,-X_t-l | X_t<0,X_t-l<0)", {S::Negative, S::Negative, T::Negate, T::Negate}},
        {"neg_pos", "corr(-X_t,X_t-l | X_t<0,X_t-l>0)", {S::Negative, S::Positive, T::Negate, T::Identity}},
    };
}

/// Unconditioned views: plain autocorrelation and autocorrelation of |X|, and
/// the current-sign split without transforms.
[[nodiscard]] inline std::vector<NamedPair> auxiliary_pairs() {
    using S = SignCondition;
    using T = PairTransform;
    return {
        {"acf", "corr(X_t,X_t-l)", {S::Any, S::Any, T::Identity, T::Identity}},
        {"abs_acf", "corr(|X_t|,|X_t-l|)", {S::Any, S::Any, T::Absolute, T::Absolute}},
        {"pos_raw", "corr(X_t,X_t-l | X_t>0)", {S::Positive, S::Any, T::Identity, T::Identity}},
        {"neg_raw", "corr(X_t,X_t-l | X_t<0)", {S::Negative, S::Any, T::Identity, T::Identity}},
        {"neg_raw_abs", "corr(X_t,|X_t-l| | X_t<0)", {S::Negative, S::Any, T::Identity, T::Absolute}},
    };
}

/// Model-implied conditional moments per step: E[X_i | F_{i-1}] and Var[X_i | F_{i-1}].
struct InferredMoments {
    std::vector<double> cond_mean;
    std::vector<double> cond_var;
};

[[nodiscard]] inline InferredMoments inferred_moments(const IntensityPath& path, double delta,
                                                      double dt) {
    InferredMoments out;
    out.cond_mean.reserve(path.size());
    out.cond_var.reserve(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Intensities lam = path.lambda(i);
        out.cond_mean.push_back(conditional_mean(lam, delta, dt));
        out.cond_var.push_back(conditional_variance(lam, delta, dt));
    }
    return out;
}

/// Lag-1 least-squares AR coefficient of a series (demeaned).
[[nodiscard]] inline double ar1_coefficient(std::span<const double> x) {
    if (x.size() < 3) {
        throw std::invalid_argument("ar1_coefficient: need at least 3 values");
    }
    double mean = 0.0;
    for (double v : x) {
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        num += (x[i] - mean) * (x[i - 1] - mean);
        den += (x[i - 1] - mean) * (x[i - 1] - mean);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace sgarch
