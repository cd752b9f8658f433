#include "sgarch/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

using namespace sgarch;

namespace {

ModelSpec basic(bool beta_equal = false) {
    ModelSpec s;
    s.beta_equal = beta_equal;
    return s;
}

}  // namespace

TEST(SimulatePath, EmptyProcessStaysFlat) {
    const ParamSet p{};
    const SimulatedPath sim = simulate_path(basic(), p, 500, {0.0, 0.0}, 42.0, 3);
    for (std::size_t i = 0; i < 500; ++i) {
        EXPECT_EQ(sim.path.returns[i], 0.0);
        EXPECT_EQ(sim.path.counts[i], 0);
    }
    for (double s : sim.prices) {
        EXPECT_EQ(s, 42.0);
    }
}

TEST(SimulatePath, SymmetricModelHasZeroMean) {
    const ParamSet p{0.012, 0.012, 0.94, 0.94, 1080.0, 1080.0, 0.0, 0.0};
    const std::size_t n = 100000;
    const SimulatedPath sim = simulate_path(basic(true), p, n, {5.0, 5.0}, 1.0, 4);
    const auto& x = sim.path.returns;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    const double se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    EXPECT_LT(std::fabs(mean), 4.0 * se);
    // Equal intensities throughout, so the conditional mean is identically zero.
    EXPECT_EQ(sim.path.lambda_plus, sim.path.lambda_minus);
}

TEST(SimulatePath, PriceIsExponentialOfCumulativeJumps) {
    const SimulatedPath sim =
        simulate_path(table9_gjr_spec(), table9_gjr_params(), 5000, {5.0, 5.0}, 100.0, 5);
    std::int64_t cum = 0;
    ASSERT_EQ(sim.prices.size(), 5001u);
    EXPECT_EQ(sim.prices[0], 100.0);
    for (std::size_t i = 0; i < 5000; ++i) {
        cum += sim.path.counts[i];
        EXPECT_EQ(sim.path.returns[i], 0.005 * static_cast<double>(sim.path.counts[i]));
        const double log_ratio = std::log(sim.prices[i + 1] / 100.0);
        EXPECT_NEAR(log_ratio, 0.005 * static_cast<double>(cum),
                    1e-13 * std::max(1.0, std::fabs(log_ratio)));
    }
}

TEST(SimulatePath, ReproducibleUnderSeed) {
    const SimulatedPath a =
        simulate_path(table9_gjr_spec(), table9_gjr_params(), 2000, {5.0, 5.0}, 1.0, 77);
    const SimulatedPath b =
        simulate_path(table9_gjr_spec(), table9_gjr_params(), 2000, {5.0, 5.0}, 1.0, 77);
    const SimulatedPath c =
        simulate_path(table9_gjr_spec(), table9_gjr_params(), 2000, {5.0, 5.0}, 1.0, 78);
    EXPECT_EQ(a.path.returns, b.path.returns);
    EXPECT_EQ(a.path.lambda_plus, b.path.lambda_plus);
    EXPECT_EQ(a.prices, b.prices);
    EXPECT_NE(a.path.returns, c.path.returns);
}

TEST(SimulatePath, IidModelHasNoConditionalCorrelation) {
    const ParamSet p{5.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const SimulatedPath sim = simulate_path(basic(), p, 5000, {5.0, 5.0}, 1.0, 6);
    for (const NamedPair& np : standard_conditional_pairs()) {
        for (std::size_t lag = 1; lag <= 5; ++lag) {
            const CorrelationEstimate e = conditional_correlation(sim.path.returns, lag, np.pair);
            ASSERT_TRUE(e.corr.has_value()) << np.id;
            EXPECT_LT(std::fabs(*e.corr), 3.0 / std::sqrt(static_cast<double>(e.n)))
                << np.id << " lag " << lag;
        }
    }
}

TEST(SimulatePath, RejectsBadInput) {
    const ParamSet p = table9_gjr_params();
    EXPECT_THROW((void)simulate_path(table9_gjr_spec(), p, 0, {5.0, 5.0}, 1.0, 1),
                 std::invalid_argument);
    EXPECT_THROW((void)simulate_path(table9_gjr_spec(), p, 10, {-1.0, 5.0}, 1.0, 1),
                 std::invalid_argument);
    EXPECT_THROW((void)simulate_path(table9_gjr_spec(), p, 10, {5.0, 5.0}, 0.0, 1),
                 std::invalid_argument);
    ParamSet bad = p;
    bad.beta_plus = 1.0;
    EXPECT_THROW((void)simulate_path(table9_gjr_spec(), bad, 10, {5.0, 5.0}, 1.0, 1),
                 std::invalid_argument);
}

TEST(SimulateEnsemble, SummariesMatchPerPathRecomputation) {
    const ModelSpec spec = table9_gjr_spec();
    const ParamSet p = table9_gjr_params();
    const auto pairs = standard_conditional_pairs();
    std::vector<EnsembleStatistic> req{
        {"pos_abs_1", EnsembleStatistic::Kind::Correlation, pairs[0].pair, 1},
        {"q5_neg_abs", EnsembleStatistic::Kind::LjungBox, pairs[1].pair, 5},
    };
    const auto out = simulate_ensemble(spec, p, 1000, 6, {5.0, 5.0}, 9, req, 2);
    ASSERT_EQ(out.size(), 2u);
    std::vector<double> direct;
    for (std::size_t k = 0; k < 6; ++k) {
        const SimulatedPath sim = simulate_path(spec, p, 1000, {5.0, 5.0}, 1.0, derive_seed(9, k));
        direct.push_back(*conditional_correlation(sim.path.returns, 1, pairs[0].pair).corr);
        EXPECT_EQ(*out[1].values[k], modified_ljung_box(sim.path.returns, 5, pairs[1].pair));
    }
    const double mean = std::accumulate(direct.begin(), direct.end(), 0.0) / 6.0;
    double ss = 0.0;
    for (double v : direct) {
        ss += (v - mean) * (v - mean);
    }
    EXPECT_EQ(out[0].n_valid, 6u);
    EXPECT_NEAR(out[0].mean, mean, 1e-15);
    EXPECT_NEAR(out[0].sd, std::sqrt(ss / 5.0), 1e-15);
    EXPECT_NEAR(out[0].se, out[0].sd / std::sqrt(6.0), 1e-15);
}

TEST(SimulateEnsemble, IndependentOfThreadCount) {
    const auto pairs = standard_conditional_pairs();
    std::vector<EnsembleStatistic> req;
    for (const auto& np : pairs) {
        req.push_back({np.id, EnsembleStatistic::Kind::Correlation, np.pair, 2});
    }
    const auto a = simulate_ensemble(table9_gjr_spec(), table9_gjr_params(), 800, 5, {5.0, 5.0},
                                     10, req, 1);
    const auto b = simulate_ensemble(table9_gjr_spec(), table9_gjr_params(), 800, 5, {5.0, 5.0},
                                     10, req, 4);
    for (std::size_t s = 0; s < req.size(); ++s) {
        EXPECT_EQ(a[s].values, b[s].values);
        EXPECT_EQ(a[s].mean, b[s].mean);
    }
}

TEST(SimulateEnsemble, NeedsTwoPaths) {
    EXPECT_THROW((void)simulate_ensemble(table9_gjr_spec(), table9_gjr_params(), 100, 1,
                                         {5.0, 5.0}, 1, {}),
                 std::invalid_argument);
}
