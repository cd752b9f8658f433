#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sgarch {

struct NelderMeadOptions {
    int max_evaluations = 5000;
    /// Stop once max f - min f over the simplex falls below this.
    double f_tolerance = 1e-8;
    /// Edge length of the initial axis-aligned simplex.
    double initial_step = 0.1;
};

struct MinimizeResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
};

namespace detail {

inline double sanitize(double v) {
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace detail

/// Derivative-free simplex minimization with the dimension-adaptive
/// coefficients of Gao and Han (2012). NaN objective values count as +inf.
template <class F>
MinimizeResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    if (n == 0) {
        throw std::invalid_argument("nelder_mead: empty parameter vector");
    }
    const double dn = static_cast<double>(n);
    const double reflect = 1.0;
    const double expand = 1.0 + 2.0 / dn;
    const double contract = 0.75 - 1.0 / (2.0 * dn);
    const double shrink = 1.0 - 1.0 / dn;

    MinimizeResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        return detail::sanitize(f(x));
    };

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += opt.initial_step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        fv[i] = eval(pts[i]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    auto trial = [&](std::vector<double>& out, double coef, const std::vector<double>& worst) {
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
        }
    };

    for (;;) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        const double spread = fv[worst] - fv[best];
        if (std::isfinite(fv[best]) && spread < opt.f_tolerance) {
            res.converged = true;
            break;
        }
        if (res.evaluations >= opt.max_evaluations) {
            break;
        }
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& p = pts[order[k]];
            for (std::size_t j = 0; j < n; ++j) {
                centroid[j] += p[j];
            }
        }
        for (auto& c : centroid) {
            c /= dn;
        }

        trial(xr, reflect, pts[worst]);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            trial(xe, reflect * expand, pts[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            pts[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        trial(xc, outside ? reflect * contract : -contract, pts[worst]);
        const double fc = eval(xc);
        if (fc <= (outside ? fr : fv[worst])) {
            pts[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        const auto anchor = pts[best];
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == best) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                pts[k][j] = anchor[j] + shrink * (pts[k][j] - anchor[j]);
            }
            fv[k] = eval(pts[k]);
        }
    }

    const auto best_it = std::min_element(fv.begin(), fv.end());
    res.x = pts[static_cast<std::size_t>(best_it - fv.begin())];
    res.f = *best_it;
    return res;
}

struct RestartOptions {
    NelderMeadOptions simplex;
    /// Simplex edge for every run after the first.
    double restart_step = 0.05;
    int max_restarts = 8;
};

/// Repeated Nelder-Mead from the incumbent. Converged once two consecutive
/// runs each collapse below the tolerance and agree on the minimum within it.
template <class F>
MinimizeResult minimize_with_restarts(F&& f, std::vector<double> x0, const RestartOptions& opt) {
    MinimizeResult total;
    NelderMeadOptions run_opt = opt.simplex;
    bool previous_converged = false;
    double previous_f = std::numeric_limits<double>::infinity();
    total.x = std::move(x0);
    for (int run = 0; run <= opt.max_restarts; ++run) {
        if (run > 0) {
            run_opt.initial_step = opt.restart_step;
        }
        MinimizeResult r = nelder_mead(f, total.x, run_opt);
        total.evaluations += r.evaluations;
        total.iterations += r.iterations;
        total.restarts = run;
        const bool improved = r.f < total.f;
        if (improved || run == 0) {
            total.x = r.x;
            total.f = r.f;
        }
        if (r.converged && previous_converged && std::fabs(previous_f - r.f) < opt.simplex.f_tolerance) {
            total.converged = true;
            break;
        }
        previous_converged = r.converged;
        previous_f = r.f;
    }
    return total;
}

}  // namespace sgarch
