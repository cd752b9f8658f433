#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sgarch {

/// The intensity recursions. Each direction (up/down) follows
///   lambda(t_i) = omega + beta * lambda(t_{i-1}) + news(eps(t_i), h(t_i))
/// with the news term given per variant.
enum class Variant {
    Basic,        // alpha * eps^2
    AsymGarch,    // alpha * (eps - gamma)^2
    NonlinAsym,   // alpha * (eps - gamma * sqrt(h))^2
    Gjr,          // (alpha + gamma * I[eps < 0]) * eps^2
    NewsType,     // alpha * (eps + gamma * |eps|)^2
    QGarch,       // alpha * eps^2 + gamma * eps
    HestonNandi,  // alpha * (z - gamma * sqrt(h))^2, z = eps / sqrt(h)
    VGarch,       // alpha * (z - gamma)^2
};

inline constexpr std::array<Variant, 8> kAllVariants{
    Variant::Basic,    Variant::AsymGarch, Variant::NonlinAsym,  Variant::Gjr,
    Variant::NewsType, Variant::QGarch,    Variant::HestonNandi, Variant::VGarch};

[[nodiscard]] constexpr bool has_gamma(Variant v) noexcept { return v != Variant::Basic; }

/// Variants whose news term is driven by the standardized shock z = eps / sqrt(h).
[[nodiscard]] constexpr bool uses_variance(Variant v) noexcept {
    return v == Variant::NonlinAsym || v == Variant::HestonNandi || v == Variant::VGarch;
}

[[nodiscard]] constexpr std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::Basic: return "basic";
        case Variant::AsymGarch: return "asym";
        case Variant::NonlinAsym: return "nonlin-asym";
        case Variant::Gjr: return "gjr";
        case Variant::NewsType: return "news";
        case Variant::QGarch: return "qgarch";
        case Variant::HestonNandi: return "heston-nandi";
        case Variant::VGarch: return "vgarch";
    }
    return "unknown";
}

[[nodiscard]] inline Variant parse_variant(std::string_view name) {
    std::string lower(name);
    for (auto& c : lower) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    for (Variant v : kAllVariants) {
        if (lower == to_string(v)) {
            return v;
        }
    }
    throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

/// Model variant plus the equality restrictions shared across directions.
struct ModelSpec {
    Variant variant = Variant::Basic;
    bool beta_equal = false;   // beta_plus == beta_minus
    bool alpha_equal = false;  // alpha_plus == alpha_minus
    bool gamma_equal = false;  // gamma_plus == gamma_minus
    double delta = 0.005;      // jump size in log-return units
    double dt = 1.0;           // observation step, trading days
};

inline void validate(const ModelSpec& spec) {
    if (!std::isfinite(spec.delta) || spec.delta <= 0.0) {
        throw std::invalid_argument("model spec: delta must be positive");
    }
    if (!std::isfinite(spec.dt) || spec.dt <= 0.0) {
        throw std::invalid_argument("model spec: dt must be positive");
    }
    if (spec.gamma_equal && !has_gamma(spec.variant)) {
        throw std::invalid_argument("model spec: gamma_equal requires a variant with gamma");
    }
}

/// Per-direction recursion parameters. gamma is ignored by Variant::Basic.
struct ParamSet {
    double omega_plus = 0.0;
    double omega_minus = 0.0;
    double beta_plus = 0.0;
    double beta_minus = 0.0;
    double alpha_plus = 0.0;
    double alpha_minus = 0.0;
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;

    friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

inline constexpr std::array<std::string_view, 8> kParamNames{
    "omega_plus", "omega_minus", "beta_plus",  "beta_minus",
    "alpha_plus", "alpha_minus", "gamma_plus", "gamma_minus"};

[[nodiscard]] inline std::array<double, 8> to_array(const ParamSet& p) {
    return {p.omega_plus, p.omega_minus, p.beta_plus,  p.beta_minus,
            p.alpha_plus, p.alpha_minus, p.gamma_plus, p.gamma_minus};
}

[[nodiscard]] inline ParamSet from_array(const std::array<double, 8>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
}

/// Checks the ParamSet invariants for spec. With allow_degenerate, omega == 0
/// is accepted (used by simulation of trivial processes).
inline void validate(const ParamSet& p, const ModelSpec& spec, bool allow_degenerate = false) {
    for (double v : to_array(p)) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("parameters: all values must be finite");
        }
    }
    const bool omega_ok = allow_degenerate ? (p.omega_plus >= 0.0 && p.omega_minus >= 0.0)
                                           : (p.omega_plus > 0.0 && p.omega_minus > 0.0);
    if (!omega_ok) {
        throw std::invalid_argument("parameters: omega must be positive");
    }
    if (p.beta_plus < 0.0 || p.beta_plus >= 1.0 || p.beta_minus < 0.0 || p.beta_minus >= 1.0) {
        throw std::invalid_argument("parameters: beta must lie in [0, 1)");
    }
    if (p.alpha_plus < 0.0 || p.alpha_minus < 0.0) {
        throw std::invalid_argument("parameters: alpha must be non-negative");
    }
    if (spec.beta_equal && p.beta_plus != p.beta_minus) {
        throw std::invalid_argument("parameters: beta_equal requires beta_plus == beta_minus");
    }
    if (spec.alpha_equal && p.alpha_plus != p.alpha_minus) {
        throw std::invalid_argument("parameters: alpha_equal requires alpha_plus == alpha_minus");
    }
    if (spec.gamma_equal && p.gamma_plus != p.gamma_minus) {
        throw std::invalid_argument("parameters: gamma_equal requires gamma_plus == gamma_minus");
    }
    if (spec.variant == Variant::Gjr &&
        (p.alpha_plus + p.gamma_plus < 0.0 || p.alpha_minus + p.gamma_minus < 0.0)) {
        throw std::invalid_argument("parameters: GJR requires alpha + gamma >= 0");
    }
}

}  // namespace sgarch
