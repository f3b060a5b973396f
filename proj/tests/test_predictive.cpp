#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mpp/errors.hpp"
#include "mpp/predictive.hpp"
#include "support/oracles.hpp"

using namespace mpp;

namespace {

PosteriorParams synthetic_posterior(Index k, Index n, bool conjugate, std::uint64_t seed) {
    RngStream rng(seed, 0);
    const oracle::MarketModel model = oracle::weekly_market(k, rng);
    const ReturnsWindow w = oracle::gaussian_window(n, model.mu, model.sigma, rng);
    if (!conjugate) return posterior_params(w, DiffusePrior{});
    const ReturnsWindow presample = oracle::gaussian_window(n, model.mu, model.sigma, rng);
    EmpiricalBayesFit fit = empirical_bayes_hyperparams(presample, static_cast<double>(n));
    return posterior_params(w, ConjugatePrior{fit.m0, static_cast<double>(n), static_cast<double>(n), fit.s0});
}

}  // namespace

TEST(WealthStep, Cases) {
    const Vector x = Vector::LinSpaced(3, -0.02, 0.04);
    EXPECT_DOUBLE_EQ(wealth_step(2.0, Vector::Zero(3), x, 0.01), 2.0 * 1.01);
    EXPECT_DOUBLE_EQ(wealth_step(2.0, Vector::LinSpaced(3, -5, 5), Vector::Constant(3, 0.01), 0.01), 2.0 * 1.01);
    EXPECT_DOUBLE_EQ(wealth_step(1.0, Vector::Constant(1, 1.0), Vector::Constant(1, 0.03), 0.01), 1.03);
}

TEST(PredictiveWealth, RiskFreePortfolioIsDeterministic) {
    const PosteriorParams p = synthetic_posterior(3, 40, false, 61);
    const WealthSampleBatch b = sample_predictive_wealth(p, Vector::Zero(3), 2.5, 0.01, 1000, RngStream(1, 1));
    EXPECT_TRUE((b.draws.array() == 2.5 * 1.01).all());
    EXPECT_EQ(default_probability(b), 0.0);
    const CredibleBand band = credible_band(b, 0.95);
    EXPECT_EQ(band.lower, band.upper);
    EXPECT_EQ(band.point, 2.5 * 1.01);
}

TEST(PredictiveWealth, MeanIdentity) {
    for (bool conjugate : {false, true}) {
        const PosteriorParams p = synthetic_posterior(3, 50, conjugate, 62);
        const double rf = 0.01;
        // Choose v so that v'(mean - rf 1) = 0.02.
        const Vector excess = (p.mean.array() - rf).matrix();
        const Vector v = 0.02 * excess / excess.squaredNorm();
        const WealthSampleBatch b = sample_predictive_wealth(p, v, 1.0, rf, 1'000'000, RngStream(62, 1));
        const double mean = b.draws.mean();
        const double sd = std::sqrt((b.draws.array() - mean).square().sum() / (b.size() - 1.0));
        EXPECT_NEAR(mean, 1.03, 3.0 * sd / std::sqrt(static_cast<double>(b.size())));
    }
}

TEST(PredictiveWealth, AgreesWithTwoStageOracle) {
    for (Index k : {1, 3}) {
        for (bool conjugate : {false, true}) {
            const PosteriorParams p = synthetic_posterior(k, 30, conjugate, 63 + k);
            const Vector v = Vector::LinSpaced(k, 1.5, -0.5);
            const WealthSampleBatch b = sample_predictive_wealth(p, v, 1.0, 0.001, 20'000, RngStream(63, 1));
            const Vector oracle = oracle::hierarchical_wealth_draws(p, v, 1.0, 0.001, 20'000, 63);
            EXPECT_GT(oracle::ks_two_sample(b.draws, oracle).p_value, 0.01) << "k=" << k << " conj=" << conjugate;
        }
    }
}

TEST(PredictiveWealth, DefaultFrequencyMatchesTwoStageOracle) {
    const PosteriorParams p = synthetic_posterior(2, 60, false, 64);
    // Leveraged enough that defaults are common.
    const Vector v = Vector::Constant(2, 15.0);
    const Index B = 100'000;
    const double a = default_probability(sample_predictive_wealth(p, v, 1.0, 0.0, B, RngStream(64, 1)));
    const double b = default_probability(oracle::hierarchical_wealth_draws(p, v, 1.0, 0.0, B, 64));
    ASSERT_GT(a, 0.01);
    const double se = std::sqrt(a * (1.0 - a) / B + b * (1.0 - b) / B);
    EXPECT_NEAR(a, b, 3.0 * se);
}

TEST(PredictiveWealth, RejectsBadInputs) {
    const PosteriorParams p = synthetic_posterior(2, 30, false, 65);
    EXPECT_THROW(sample_predictive_wealth(p, Vector::Zero(3), 1.0, 0.0, 10, RngStream(1, 1)), Error);
    EXPECT_THROW(sample_predictive_wealth(p, Vector::Zero(2), 1.0, 0.0, 0, RngStream(1, 1)), Error);
}

TEST(CredibleBand, ConstantBatch) {
    const CredibleBand b = credible_band(Vector::Constant(500, 0.1), 0.9);
    EXPECT_EQ(b.lower, 0.1);
    EXPECT_EQ(b.upper, 0.1);
    EXPECT_EQ(b.point, 0.1);
}

TEST(CredibleBand, NormalQuantiles) {
    RngStream rng(66, 0);
    const CredibleBand b = credible_band(sample_standard_normal(1'000'000, rng), 0.95);
    EXPECT_NEAR(b.lower, -1.959964, 0.01);
    EXPECT_NEAR(b.upper, 1.959964, 0.01);
    EXPECT_NEAR(b.point, 0.0, 0.005);
}

TEST(CredibleBand, TypeSevenInterpolation) {
    Vector x = Vector::LinSpaced(101, 0.0, 100.0);
    std::reverse(x.begin(), x.end());
    const CredibleBand b = credible_band(x, 0.95);
    EXPECT_NEAR(b.lower, 2.5, 1e-12);
    EXPECT_NEAR(b.upper, 97.5, 1e-12);
}

TEST(CredibleBand, Preconditions) {
    const Vector x = Vector::LinSpaced(200, 0.0, 1.0);
    for (double level : {0.0, 1.0, -0.5, 1.5}) {
        try {
            credible_band(x, level);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
        }
    }
    try {
        credible_band(Vector::LinSpaced(99, 0.0, 1.0), 0.9);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewSamples);
    }
}

TEST(CredibleBand, WiderLevelWidensBand) {
    RngStream rng(67, 0);
    Vector x(5000);
    for (Index i = 0; i < x.size(); ++i) x(i) = sample_student_t(4.0, rng);
    double prev = 0.0;
    for (double level = 0.05; level < 0.999; level += 0.05) {
        const double w = credible_band(x, level).width();
        EXPECT_GT(w, prev) << "level " << level;
        prev = w;
    }
}

TEST(DefaultProbability, StrictNegativityAndScaleInvariance) {
    Vector x(4);
    x << -1.0, 0.0, 0.5, 2.0;
    EXPECT_EQ(default_probability(x), 0.25);
    EXPECT_EQ(default_probability(Vector(x * 7.5)), 0.25);

    RngStream rng(68, 0);
    Vector y = sample_standard_normal(100'001, rng);
    Vector sorted = y;
    std::sort(sorted.begin(), sorted.end());
    y.array() -= sorted(50'000);
    EXPECT_NEAR(default_probability(y), 0.5, 3.0 * std::sqrt(0.25 / y.size()));
}
