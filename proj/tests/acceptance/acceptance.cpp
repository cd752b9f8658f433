// End-to-end acceptance checks. One test per criterion; a listener prints a
// PASS/FAIL line for each. Optional: --input FILE [--column price|return]
// checks a fit on user-supplied daily data against the published estimates.

#include "sgarch/estimate.hpp"
#include "sgarch/io.hpp"
#include "sgarch/simulate.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace sgarch;

namespace {

std::optional<std::string> g_input;
ColumnKind g_column = ColumnKind::Price;

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void note(const std::string& s) { std::cout << "    " << s << "\n"; }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Published delta = 0.005 basic fit with a common beta.
ParamSet published_basic() { return {0.0140, 0.0107, 0.9402, 0.9402, 1095.3, 1069.3, 0.0, 0.0}; }

ModelSpec basic_beta_equal(double delta = 0.005) {
    ModelSpec s;
    s.delta = delta;
    s.beta_equal = true;
    return s;
}

long double poisson_pmf_ld(long k, long double lam) {
    if (k < 0) {
        return 0.0L;
    }
    return std::exp(static_cast<long double>(k) * std::log(lam) - lam -
                    std::lgamma(static_cast<long double>(k) + 1.0L));
}

long double skellam_convolution(long m, long double up, long double down) {
    long double s = 0.0L;
    for (long k = 0; k <= 400; ++k) {
        s += poisson_pmf_ld(k + m, up) * poisson_pmf_ld(k, down);
    }
    return s;
}

class PassFailPrinter : public ::testing::EmptyTestEventListener {
    void OnTestEnd(const ::testing::TestInfo& info) override {
        const auto* r = info.result();
        const char* tag = r->Skipped() ? "SKIP" : (r->Passed() ? "PASS" : "FAIL");
        std::cout << tag << "  " << info.test_suite_name() << "." << info.name() << "  ("
                  << fmt(static_cast<double>(r->elapsed_time()) / 1000.0) << " s)" << std::endl;
    }
};

}  // namespace

TEST(Acceptance, SkellamMatchesConvolution) {
    const Stopwatch clock;
    const double rates[] = {0.1, 1.0, 5.0, 20.0};
    double worst = 0.0;
    for (double up : rates) {
        for (double down : rates) {
            for (long m = -50; m <= 50; ++m) {
                const double got = std::exp(skellam_log_pmf(m, {up, down}));
                const double want = static_cast<double>(skellam_convolution(m, up, down));
                worst = std::max(worst, std::fabs(got - want));
            }
        }
    }
    note("max |pmf - convolution| = " + fmt(worst));
    EXPECT_LE(worst, 1e-10);
    EXPECT_LT(clock.seconds(), 1.0);
}

TEST(Acceptance, SkellamNormalizationAndMoments) {
    const Stopwatch clock;
    const double rates[] = {0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 20.0, 30.0};
    double worst_sum = 0.0;
    double worst_mean = 0.0;
    double worst_var = 0.0;
    for (double up : rates) {
        for (double down : rates) {
            double s = 0.0;
            double m1 = 0.0;
            double m2 = 0.0;
            for (long m = -200; m <= 200; ++m) {
                const double p = std::exp(skellam_log_pmf(m, {up, down}));
                s += p;
                m1 += p * static_cast<double>(m);
                m2 += p * static_cast<double>(m) * static_cast<double>(m);
            }
            worst_sum = std::max(worst_sum, std::fabs(s - 1.0));
            worst_mean = std::max(worst_mean, std::fabs(m1 - (up - down)));
            worst_var = std::max(worst_var, std::fabs(m2 - m1 * m1 - (up + down)));
        }
    }
    note("max |sum - 1| = " + fmt(worst_sum) + ", max mean error = " + fmt(worst_mean) +
         ", max variance error = " + fmt(worst_var));
    EXPECT_LE(worst_sum, 1e-8);
    EXPECT_LE(worst_mean, 1e-6);
    EXPECT_LE(worst_var, 1e-6);
    EXPECT_LT(clock.seconds(), 1.0);
}

TEST(Acceptance, UnconditionalStandardDeviation) {
    const double var = unconditional_variance(basic_beta_equal(), published_basic());
    const double annual = std::sqrt(252.0 * var);
    note("annualized unconditional sd = " + fmt(annual) + " (reference 0.165)");
    EXPECT_NEAR(annual, 0.165, 0.005);
}

TEST(Acceptance, NormalizedParameters) {
    struct Column {
        double delta;
        // omega+, beta, alpha+, omega-, alpha- as published, with the last printed digit.
        std::array<double, 5> raw;
        std::array<double, 5> raw_unit;
        std::array<double, 5> normalized;
        std::array<double, 5> normalized_unit;
    };
    const std::vector<Column> columns{
        {0.05, {0.0057, 0.9040, 17.77, 0.0053, 16.17}, {1e-4, 1e-4, 1e-2, 1e-4, 1e-2},
         {1.43e-5, 0.9040, 0.0442, 1.32e-5, 0.0404}, {1e-7, 1e-4, 1e-4, 1e-7, 1e-4}},
        {0.01, {0.0111, 0.9358, 275.1, 0.0093, 262.8}, {1e-4, 1e-4, 1e-1, 1e-4, 1e-1},
         {1.11e-6, 0.9358, 0.0275, 8.68e-7, 0.0263}, {1e-8, 1e-4, 1e-4, 1e-9, 1e-4}},
        {0.005, {0.0140, 0.9402, 1095.3, 0.0107, 1069.3}, {1e-4, 1e-4, 1e-1, 1e-4, 1e-1},
         {3.49e-7, 0.9402, 0.0274, 2.68e-7, 0.0267}, {1e-9, 1e-4, 1e-4, 1e-9, 1e-4}},
        {0.002, {0.0461, 0.9440, 6568.4, 0.0399, 6524.6}, {1e-4, 1e-4, 1e-1, 1e-4, 1e-1},
         {1.84e-7, 0.9440, 0.0263, 1.59e-7, 0.0261}, {1e-9, 1e-4, 1e-4, 1e-9, 1e-4}},
        {0.001, {5.2428, 0.8200, 29364, 5.1899, 29226}, {1e-4, 1e-4, 1, 1e-4, 1},
         {5.24e-6, 0.8200, 0.0294, 5.19e-6, 0.0292}, {1e-8, 1e-4, 1e-4, 1e-8, 1e-4}},
    };
    const char* names[] = {"omega+*", "beta", "alpha+*", "omega-*", "alpha-*"};
    int mismatches = 0;
    for (const Column& c : columns) {
        const ParamSet p{c.raw[0], c.raw[3], c.raw[1], c.raw[1], c.raw[2], c.raw[4], 0.0, 0.0};
        const NormalizedParams n = normalize_params(p, c.delta);
        const double got[] = {n.values.omega_plus, n.values.beta_plus, n.values.alpha_plus,
                              n.values.omega_minus, n.values.alpha_minus};
        for (int k = 0; k < 5; ++k) {
            // Both tables are rounded: allow half a printed unit on each side,
            // carried through the (linear) normalization.
            const double scale = k == 1 ? 1.0 : c.delta * c.delta;
            const double tol = 0.5 * c.normalized_unit[k] + 0.5 * c.raw_unit[k] * scale;
            const double gap = std::fabs(got[k] - c.normalized[k]);
            if (gap > tol) {
                ++mismatches;
                note("delta " + fmt(c.delta) + " " + names[k] + ": computed " + fmt(got[k]) +
                     ", published " + fmt(c.normalized[k]) + ", allowed gap " + fmt(tol));
            }
            EXPECT_LE(gap, tol) << "delta " << c.delta << " " << names[k];
        }
    }
    note(std::to_string(mismatches) + " of 25 entries outside rounding tolerance");
}

namespace {

struct EnsembleRun {
    std::map<std::pair<std::string, std::size_t>, EnsembleSummary> by_key;
    double seconds = 0.0;
};

const EnsembleRun& gjr_ensemble() {
    static const EnsembleRun run = [] {
        const Stopwatch clock;
        std::vector<EnsembleStatistic> req;
        for (const NamedPair& np : standard_conditional_pairs()) {
            for (std::size_t lag : {1u, 2u, 3u, 4u, 5u, 20u}) {
                req.push_back({np.id, EnsembleStatistic::Kind::Correlation, np.pair, lag});
            }
        }
        const auto pairs = standard_conditional_pairs();
        req.push_back({"q20_pos_abs", EnsembleStatistic::Kind::LjungBox, pairs[0].pair, 20});
        req.push_back({"q20_neg_abs", EnsembleStatistic::Kind::LjungBox, pairs[1].pair, 20});
        const auto out = simulate_ensemble(table9_gjr_spec(), table9_gjr_params(), 5000, 100,
                                           {5.0, 5.0}, 1, req);
        EnsembleRun r;
        for (const auto& s : out) {
            r.by_key.emplace(std::make_pair(s.statistic.name, s.statistic.lag), s);
        }
        r.seconds = clock.seconds();
        return r;
    }();
    return run;
}

}  // namespace

TEST(Acceptance, EnsembleConditionalCorrelations) {
    // Published ensemble means and cross-path standard errors at lags 1, 5, 20.
    struct Row {
        const char* id;
        std::array<double, 3> mean;
        std::array<double, 3> se;
    };
    const std::vector<Row> rows{
        {"pos_abs", {0.190, 0.169, 0.133}, {0.061, 0.059, 0.054}},
        {"neg_abs", {0.153, 0.143, 0.1221}, {0.049, 0.050, 0.047}},
        {"pos_pos", {0.171, 0.151, 0.118}, {0.075, 0.071, 0.068}},
        {"pos_neg", {0.210, 0.190, 0.149}, {0.063, 0.062, 0.057}},
        {"neg_neg", {0.189, 0.178, 0.150}, {0.061, 0.064, 0.059}},
        {"neg_pos", {0.120, 0.111, 0.100}, {0.050, 0.047, 0.048}},
    };
    const EnsembleRun& run = gjr_ensemble();
    const std::size_t lags[] = {1, 5, 20};
    for (const Row& r : rows) {
        std::string line = std::string(r.id) + ":";
        for (int k = 0; k < 3; ++k) {
            const EnsembleSummary& s = run.by_key.at({r.id, lags[k]});
            line += " lag " + std::to_string(lags[k]) + " " + fmt(s.mean) + " (sd " + fmt(s.sd) +
                    ") vs " + fmt(r.mean[k]);
            EXPECT_EQ(s.n_valid, 100u);
            EXPECT_NEAR(s.mean, r.mean[k], 2.0 * r.se[k]) << r.id << " lag " << lags[k];
        }
        note(line);
    }
    note("ensemble time " + fmt(run.seconds) + " s");
    EXPECT_LE(run.seconds, 600.0);
}

TEST(Acceptance, EnsembleAsymmetryOrdering) {
    const EnsembleRun& run = gjr_ensemble();
    for (std::size_t lag = 1; lag <= 5; ++lag) {
        const EnsembleSummary& up = run.by_key.at({"pos_abs", lag});
        const EnsembleSummary& down = run.by_key.at({"neg_abs", lag});
        note("lag " + std::to_string(lag) + ": up " + fmt(up.mean) + ", down " + fmt(down.mean) +
             ", se " + fmt(std::max(up.se, down.se)));
        EXPECT_GT(up.mean - down.mean, std::max(up.se, down.se)) << "lag " << lag;
    }
    const EnsembleSummary& qu = run.by_key.at({"q20_pos_abs", 20});
    const EnsembleSummary& qd = run.by_key.at({"q20_neg_abs", 20});
    std::size_t majority = 0;
    for (std::size_t k = 0; k < qu.values.size(); ++k) {
        majority += (qu.values[k] && qd.values[k] && *qu.values[k] > *qd.values[k]) ? 1 : 0;
    }
    note("Q20 means: up " + fmt(qu.mean) + ", down " + fmt(qd.mean) + "; up larger in " +
         std::to_string(majority) + " of 100 paths");
    EXPECT_GT(qu.mean, qd.mean);
    EXPECT_GT(majority, 50u);
}

TEST(Acceptance, ParameterRecovery) {
    const Stopwatch clock;
    const ModelSpec spec = basic_beta_equal();
    const ParamSet truth = published_basic();
    const NormalizedParams tn = normalize_params(truth, spec.delta);
    const Intensities lambda0 = default_lambda0(spec, truth);
    FitConfig refit;
    refit.n_starts = 1;
    int reps_ok = 0;
    for (std::uint64_t r = 0; r < 10; ++r) {
        const SimulatedPath sim = simulate_path(spec, truth, 5000, lambda0, 1.0, derive_seed(7000, r));
        const FitResult fit = fit_mle(spec, sim.path.returns);
        ASSERT_TRUE(fit.converged) << "rep " << r;
        const BootstrapResult b = bootstrap_se(fit, 200, derive_seed(7100, r), refit);
        const double est[5] = {fit.params.omega_plus, fit.params.omega_minus, fit.params.beta_plus,
                               fit.params.alpha_plus, fit.params.alpha_minus};
        const double se[5] = {b.se.omega_plus, b.se.omega_minus, b.se.beta_plus, b.se.alpha_plus,
                              b.se.alpha_minus};
        const double tv[5] = {truth.omega_plus, truth.omega_minus, truth.beta_plus,
                              truth.alpha_plus, truth.alpha_minus};
        int bracketed = 0;
        for (int k = 0; k < 5; ++k) {
            bracketed += std::fabs(est[k] - tv[k]) <= 2.0 * se[k] ? 1 : 0;
        }
        const double beta_gap = fit.params.beta_plus - truth.beta_plus;
        const double ap = fit.normalized.values.alpha_plus / tn.values.alpha_plus - 1.0;
        const double am = fit.normalized.values.alpha_minus / tn.values.alpha_minus - 1.0;
        note("rep " + std::to_string(r) + ": beta " + fmt(fit.params.beta_plus) + ", alpha+* rel " +
             fmt(ap) + ", alpha-* rel " + fmt(am) + ", bracketed " + std::to_string(bracketed) +
             "/5, se(beta) " + fmt(se[2]) + ", se(alpha+) " + fmt(se[3]) + ", dropped " +
             std::to_string(b.dropped));
        EXPECT_LE(std::fabs(beta_gap), 0.02) << "rep " << r;
        EXPECT_LE(std::fabs(ap), 0.30) << "rep " << r;
        EXPECT_LE(std::fabs(am), 0.30) << "rep " << r;
        EXPECT_GE(bracketed, 4) << "rep " << r;
        reps_ok += bracketed >= 4 ? 1 : 0;
    }
    note(std::to_string(reps_ok) + " of 10 reps bracket at least 4 of 5 parameters; " +
         fmt(clock.seconds()) + " s");
    EXPECT_LE(clock.seconds(), 1800.0);
}

TEST(AcceptanceSlow, EqualityTestCalibration) {
    const Stopwatch clock;
    const ModelSpec spec = basic_beta_equal();
    ParamSet null_params = published_basic();
    null_params.alpha_plus = null_params.alpha_minus = 0.5 * (1095.3 + 1069.3);
    const Intensities lambda0 = default_lambda0(spec, null_params);
    FitConfig cfg;
    cfg.n_starts = 1;
    int rejections = 0;
    int completed = 0;
    int errors = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const SimulatedPath sim =
            simulate_path(spec, null_params, 1000, lambda0, 1.0, derive_seed(8000, t));
        try {
            const EqualityTestResult r =
                test_alpha_equality(spec, sim.path.returns, 99, derive_seed(8100, t), cfg, cfg);
            ++completed;
            rejections += r.p_value < 0.05 ? 1 : 0;
        } catch (const std::exception& e) {
            ++errors;
            note("trial " + std::to_string(t) + ": " + e.what());
        }
    }
    const double rate = completed > 0 ? static_cast<double>(rejections) / completed : 0.0;
    note("rejections " + std::to_string(rejections) + " of " + std::to_string(completed) +
         " trials (rate " + fmt(rate) + "), errors " + std::to_string(errors) + ", " +
         fmt(clock.seconds()) + " s");
    EXPECT_GE(completed, 190);
    EXPECT_NEAR(rate, 0.05, 0.03);
    EXPECT_LE(clock.seconds(), 3600.0);
}

TEST(Acceptance, NestedLikelihoodOrdering) {
    const Stopwatch clock;
    const SimulatedPath sim =
        simulate_path(table9_gjr_spec(), table9_gjr_params(), 3000, {5.0, 5.0}, 1.0, 9000);
    const ModelComparison m = compare_nested_models(sim.path.returns, 0.005);
    const double i = -m.model_i.loglik;
    const double ii = -m.model_ii.loglik;
    const double iii = -m.model_iii.loglik;
    const double iv = -m.model_iv.loglik;
    note("-loglik I " + fmt(i) + ", II " + fmt(ii) + ", III " + fmt(iii) + ", IV " + fmt(iv));
    const double tol = 1e-4;
    EXPECT_LE(iv, ii + tol);
    EXPECT_LE(ii, i + tol);
    EXPECT_LE(iv, iii + tol);
    EXPECT_LE(iii, i + tol);
    EXPECT_LE(clock.seconds(), 600.0);
}

TEST(Acceptance, JumpSizeMonotonicity) {
    const Stopwatch clock;
    // A fine-grid series, then fits at three coarser jump sizes.
    ModelSpec fine = basic_beta_equal(0.001);
    const NormalizedParams n = normalize_params(published_basic(), 0.005);
    const double d2 = fine.delta * fine.delta;
    ParamSet p = n.values;
    p.omega_plus /= d2;
    p.omega_minus /= d2;
    p.alpha_plus /= d2;
    p.alpha_minus /= d2;
    const SimulatedPath sim = simulate_path(fine, p, 5000, default_lambda0(fine, p), 1.0, 10000);
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {0.002, 0.005, 0.01}) {
        const FitResult fit = fit_mle(basic_beta_equal(delta), sim.path.returns);
        note("delta " + fmt(delta) + ": -loglik " + fmt(-fit.loglik) +
             (fit.converged ? "" : " (not converged)"));
        EXPECT_LT(-fit.loglik, prev) << "delta " << delta;
        prev = -fit.loglik;
    }
    EXPECT_LE(clock.seconds(), 600.0);
}

TEST(Acceptance, AlgebraicIdentities) {
    double worst_decomp = 0.0;
    double worst_h = 0.0;
    double worst_m = 0.0;
    // Decomposition along filtered paths of every variant.
    for (Variant v : kAllVariants) {
        ModelSpec spec;
        spec.variant = v;
        const ParamSet p = v == Variant::Gjr ? table9_gjr_params()
                                             : ParamSet{0.0210, 0.0167, 0.9369, 0.9425, 86.99, 38.23, 0.0, 0.0};
        const SimulatedPath sim = simulate_path(spec, p, 2000, {5.0, 5.0}, 1.0, 11000);
        const IntensityPath path = filter(spec, p, sim.path.returns, {5.0, 5.0});
        for (std::size_t i = 0; i < path.size(); ++i) {
            const Intensities lam = path.lambda(i);
            const ReturnDecomposition r = decompose_return(lam, spec.delta, spec.dt);
            const double target = spec.delta * (lam.plus - lam.minus) * spec.dt;
            const double scale = std::fabs(r.mu) + std::fabs(r.ito) + std::fabs(target);
            worst_decomp = std::max(worst_decomp, std::fabs(r.mu - r.ito - target) / scale);
        }
    }
    // Variance and mean recursions for a common-beta basic model.
    const ModelSpec spec = basic_beta_equal();
    const ParamSet p = published_basic();
    const SimulatedPath sim = simulate_path(spec, p, 5000, default_lambda0(spec, p), 1.0, 11001);
    const IntensityPath path = filter(spec, p, sim.path.returns, default_lambda0(spec, p));
    const double d = spec.delta;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const double e2 = path.eps[i] * path.eps[i];
        const double h_rec = d * d * (p.omega_plus + p.omega_minus) + p.beta_plus * path.h[i] +
                             d * d * (p.alpha_plus + p.alpha_minus) * e2;
        worst_h = std::max(worst_h, std::fabs(path.h[i + 1] - h_rec) / path.h[i + 1]);
        const double m_now = d * (path.lambda_plus[i] - path.lambda_minus[i]);
        const double m_next = d * (path.lambda_plus[i + 1] - path.lambda_minus[i + 1]);
        const double m_rec = d * (p.omega_plus - p.omega_minus) + p.beta_plus * m_now +
                             d * (p.alpha_plus - p.alpha_minus) * e2;
        // Relative to the size of the summands, since m itself can vanish.
        const double scale = d * (path.lambda_plus[i + 1] + path.lambda_minus[i + 1]);
        worst_m = std::max(worst_m, std::fabs(m_next - m_rec) / scale);
    }
    note("max relative gaps: decomposition " + fmt(worst_decomp) + ", h " + fmt(worst_h) + ", m " +
         fmt(worst_m));
    EXPECT_LE(worst_decomp, 1e-12);
    EXPECT_LE(worst_h, 1e-12);
    EXPECT_LE(worst_m, 1e-12);
}

TEST(Acceptance, OptionalInputFit) {
    if (!g_input) {
        GTEST_SKIP() << "no --input given";
    }
    const ReturnSeries series = load_series(*g_input, g_column);
    const ModelSpec spec = basic_beta_equal();
    const FitResult fit = fit_mle(spec, series.returns);
    ASSERT_TRUE(fit.converged);
    FitConfig refit;
    refit.n_starts = 1;
    const BootstrapResult b = bootstrap_se(fit, 200, 12000, refit);
    const ParamSet ref = published_basic();
    const std::array<double, 8> est = to_array(fit.params);
    const std::array<double, 8> se = to_array(b.se);
    const std::array<double, 8> want = to_array(ref);
    for (std::size_t k : {0u, 1u, 2u, 4u, 5u}) {
        note(std::string(kParamNames[k]) + ": " + fmt(est[k]) + " (se " + fmt(se[k]) +
             ") vs " + fmt(want[k]));
        EXPECT_LE(std::fabs(est[k] - want[k]), 3.0 * se[k]) << kParamNames[k];
    }
}

int main(int argc, char** argv) {
    ::testing::InitGoogleTest(&argc, argv);
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--input" && i + 1 < argc) {
            g_input = argv[++i];
        } else if (a == "--column" && i + 1 < argc) {
            g_column = parse_column_kind(argv[++i]);
        } else {
            std::cerr << "unknown argument " << a << "\n";
            return 2;
        }
    }
    auto& listeners = ::testing::UnitTest::GetInstance()->listeners();
    listeners.Append(new PassFailPrinter);
    return RUN_ALL_TESTS();
}
