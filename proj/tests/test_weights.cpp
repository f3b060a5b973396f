#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "mpp/errors.hpp"
#include "mpp/weights.hpp"
#include "support/oracles.hpp"

using namespace mpp;

namespace {

ReturnsWindow column(std::vector<double> x) {
    return ReturnsWindow(Eigen::Map<Vector>(x.data(), static_cast<Index>(x.size())));
}

void expect_code(ErrorCode code, auto&& fn) {
    try {
        fn();
        FAIL() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

PosteriorParams synthetic_posterior(Index k, Index n, bool conjugate, std::uint64_t seed) {
    RngStream rng(seed, 0);
    const oracle::MarketModel model = oracle::weekly_market(k, rng);
    const ReturnsWindow w = oracle::gaussian_window(n, model.mu, model.sigma, rng);
    if (!conjugate) return posterior_params(w, DiffusePrior{});
    const ReturnsWindow presample = oracle::gaussian_window(n, model.mu, model.sigma, rng);
    const double d0 = static_cast<double>(n);
    EmpiricalBayesFit fit = empirical_bayes_hyperparams(presample, d0);
    return posterior_params(w, ConjugatePrior{fit.m0, static_cast<double>(n), d0, fit.s0});
}

const PortfolioContext kUnit = PortfolioContext::flat(1.0, 1.0, 0, 1, 0.0);

}  // namespace

TEST(DiscountFactor, EmptyProductAndCompounding) {
    EXPECT_DOUBLE_EQ(discount_factor(PortfolioContext::flat(2.0, 1.0, 4, 5, 0.03)), 0.5);
    PortfolioContext ctx = PortfolioContext::flat(1.0, 1.0, 3, 5, 0.0);
    ctx.rf_schedule[4] = 0.05;
    EXPECT_DOUBLE_EQ(discount_factor(ctx), 1.0 / 1.05);
    EXPECT_DOUBLE_EQ(discount_factor(PortfolioContext::flat(1.0, 2.0, 2, 5, 0.01)), 1.0 / (2.0 * 1.01 * 1.01));
}

TEST(DiscountFactor, Preconditions) {
    expect_code(ErrorCode::ZeroWealth, [] { discount_factor(PortfolioContext::flat(1.0, 0.0, 0, 1, 0.0)); });
    expect_code(ErrorCode::InvalidArgument, [] { discount_factor(PortfolioContext::flat(0.0, 1.0, 0, 1, 0.0)); });
    expect_code(ErrorCode::InvalidArgument, [] { discount_factor(PortfolioContext::flat(1.0, 1.0, 1, 1, 0.0)); });
    expect_code(ErrorCode::InvalidArgument, [] { discount_factor(PortfolioContext::flat(1.0, 1.0, 0, 2, -1.0)); });
    PortfolioContext short_schedule = PortfolioContext::flat(1.0, 1.0, 0, 3, 0.0);
    short_schedule.rf_schedule.pop_back();
    expect_code(ErrorCode::InvalidArgument, [&] { discount_factor(short_schedule); });
}

TEST(OracleWeights, HandArithmeticAndHomogeneity) {
    const LatentParams p{Vector::Constant(1, 0.10), SpdMatrix(Matrix::Constant(1, 1, 0.04))};
    EXPECT_NEAR(oracle_weights(p, PortfolioContext::flat(1.0, 1.0, 0, 1, 0.02))(0), 2.0, 1e-14);

    const LatentParams flat{Vector::Constant(3, 0.01), SpdMatrix::identity(3)};
    EXPECT_TRUE(oracle_weights(flat, PortfolioContext::flat(1.0, 1.0, 0, 1, 0.01)).isZero(0.0));

    RngStream rng(31, 0);
    const oracle::MarketModel m = oracle::weekly_market(4, rng);
    const Vector w1 = oracle_weights({m.mu, m.sigma}, PortfolioContext::flat(1.0, 1.0, 0, 3, 0.001));
    const Vector w2 = oracle_weights({m.mu, m.sigma}, PortfolioContext::flat(1.0, 2.0, 0, 3, 0.001));
    EXPECT_LT((w2 - 0.5 * w1).norm(), 1e-14 * w1.norm());
}

TEST(PluginWeights, HandArithmeticAndDefinition) {
    const ReturnsWindow w = column({0.01, 0.02, 0.03});
    EXPECT_NEAR(plugin_weights(w, kUnit)(0), 200.0, 1e-10);
    EXPECT_TRUE(plugin_weights(w, PortfolioContext::flat(1.0, 1.0, 0, 1, 0.02)).isZero(1e-12));

    RngStream rng(32, 0);
    const oracle::MarketModel m = oracle::weekly_market(3, rng);
    const ReturnsWindow x = oracle::gaussian_window(50, m.mu, m.sigma, rng);
    const SampleMoments sm = sample_moments(x);
    EXPECT_EQ(plugin_weights(x, kUnit), oracle_weights({sm.mean, sm.cov}, kUnit));
    expect_code(ErrorCode::DegenerateSample, [] { plugin_weights(column({0.01, 0.01, 0.01}), kUnit); });
}

TEST(BayesEstimate, HandArithmetic) {
    const PosteriorParams p = posterior_params(column({0.01, 0.02, 0.03}), DiffusePrior{});
    EXPECT_NEAR(bayes_estimate(p, kUnit)(0), 200.0, 1e-10);
    EXPECT_TRUE(bayes_estimate(p, PortfolioContext::flat(1.0, 1.0, 0, 1, 0.02)).isZero(1e-12));
}

TEST(BayesEstimate, MatchesQuadratureOracle) {
    for (bool conjugate : {false, true}) {
        const PosteriorParams p = synthetic_posterior(1, 30, conjugate, 33);
        const oracle::ScalarMoments q = oracle::quadrature_weight_moments(p, 0.7, 0.001);
        const PortfolioContext ctx = PortfolioContext::flat(1.0 / 0.7, 1.0, 0, 1, 0.001);
        EXPECT_NEAR(bayes_estimate(p, ctx)(0) / q.mean, 1.0, 1e-8);
    }
}

TEST(BayesEstimate, MatchesFastSamplerMean) {
    const PosteriorParams p = synthetic_posterior(4, 60, false, 34);
    const WeightSampleBatch b = sample_weights_fast(p, kUnit, 100'000, RngStream(34, 1));
    const Vector mean = oracle::column_means(b.draws);
    const Vector se = oracle::mean_standard_errors(b.draws);
    const Vector est = bayes_estimate(p, kUnit);
    for (Index j = 0; j < 4; ++j) EXPECT_NEAR(mean(j), est(j), 3.0 * se(j)) << "coordinate " << j;
}

TEST(WeightCovariance, HandArithmetic) {
    // k = 1, n = 3, S = 0.0002, d = 0.02, K = 3, v = 3:
    // 2 * [(0.02 / 0.0002)^2 + (1 + 3 * 0.02^2 / 0.0002) / 3 / 0.0002] = 2 * (10000 + 11666.67).
    const PosteriorParams p = posterior_params(column({0.01, 0.02, 0.03}), DiffusePrior{});
    EXPECT_NEAR(weight_covariance(p, kUnit)(0, 0), 130000.0 / 3.0, 1e-6);
}

TEST(WeightCovariance, ZeroExcessReturnLeavesScaledInverse) {
    const PosteriorParams p = synthetic_posterior(3, 40, false, 35);
    PortfolioContext ctx = PortfolioContext::flat(2.0, 1.0, 0, 1, 0.0);
    PosteriorParams centred = p;
    centred.mean.setConstant(0.0);
    const double c = discount_factor(ctx);
    const Matrix expected = c * c * (p.chi2_df - 1.0) / p.precision * spd_inverse(p.scale).matrix();
    EXPECT_LT(relative_frobenius(weight_covariance(centred, ctx).matrix(), expected), 1e-12);
}

TEST(WeightCovariance, MatchesQuadratureOracle) {
    for (bool conjugate : {false, true}) {
        for (Index n : {12, 30, 200}) {
            const PosteriorParams p = synthetic_posterior(1, n, conjugate, 36 + n);
            const oracle::ScalarMoments q = oracle::quadrature_weight_moments(p, 1.0, 0.0005);
            const PortfolioContext ctx = PortfolioContext::flat(1.0, 1.0, 0, 1, 0.0005);
            EXPECT_NEAR(weight_covariance(p, ctx)(0, 0) / q.variance, 1.0, 1e-7)
                << "n=" << n << " conjugate=" << conjugate;
        }
    }
}

TEST(WeightCovariance, MatchesFastSamplerCovariance) {
    const PosteriorParams p = synthetic_posterior(3, 50, false, 37);
    const WeightSampleBatch b = sample_weights_fast(p, kUnit, 200'000, RngStream(37, 1));
    EXPECT_LT(relative_frobenius(oracle::sample_covariance(b.draws), weight_covariance(p, kUnit).matrix()), 0.05);
}

TEST(WeightCovariance, SymmetricPsdOnRandomInputs) {
    RngStream rng(38, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const Index k = 1 + trial % 6;
        const PosteriorParams p = synthetic_posterior(k, k + 5 + trial, trial % 2 == 1, 380 + trial);
        const Matrix v = weight_covariance(p, PortfolioContext::flat(1.0 + rng.uniform(), 1.0, 0, 2, 0.001)).matrix();
        EXPECT_EQ(v, v.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> eig(v);
        EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    }
}

TEST(AsymptoticCovariance, HandArithmetic) {
    // Breve scale 0.0001, d = 0.02: 0.02^2 / 0.0001^2 + (1 + 0.02^2 / 0.0001) / 0.0001.
    const PosteriorParams p = posterior_params(column({0.01, 0.02, 0.03}), DiffusePrior{});
    ASSERT_NEAR(p.asymptotic_scale()(0, 0), 0.0001, 1e-18);
    EXPECT_NEAR(asymptotic_covariance(p, kUnit)(0, 0), 90000.0, 1e-6);

    PosteriorParams centred = p;
    centred.mean.setZero();
    EXPECT_NEAR(asymptotic_covariance(centred, kUnit)(0, 0), 10000.0, 1e-8);
}

TEST(AsymptoticCovariance, IsLimitOfScaledExactCovariance) {
    RngStream rng(39, 0);
    const oracle::MarketModel m = oracle::weekly_market(3, rng);
    const double n = 1e5;
    for (bool conjugate : {false, true}) {
        PosteriorParams p{conjugate ? PriorKind::Conjugate : PriorKind::Diffuse,
                          static_cast<Index>(n), m.mu, SpdMatrix(m.sigma.matrix() * (n - 1.0)),
                          n - 3.0, n, n + 4.0, n};
        if (conjugate) {
            const double d0 = 50.0, r0 = 20.0;
            p.precision = n + r0;
            p.t_df = n + d0 - 6.0;
            p.chi2_df = n + d0 - 3.0;
            p.iw_df = n + d0 + 1.0;
            p.scale = SpdMatrix(m.sigma.matrix() * (n + r0));
        }
        const PortfolioContext ctx = PortfolioContext::flat(3.0, 1.0, 0, 1, 0.0005);
        const Matrix scaled = n * weight_covariance(p, ctx).matrix();
        const Matrix limit = asymptotic_covariance(p, ctx).matrix();
        EXPECT_LT(((scaled - limit).array() / limit.array()).abs().maxCoeff(), 0.02);
    }
}

TEST(Samplers, BasicMeanMatchesBayesEstimate) {
    const PosteriorParams p = synthetic_posterior(2, 40, false, 40);
    const WeightSampleBatch b = sample_weights_basic(p, kUnit, 100'000, Matrix::Identity(2, 2), RngStream(40, 1));
    const Vector mean = oracle::column_means(b.draws);
    const Vector se = oracle::mean_standard_errors(b.draws);
    const Vector est = bayes_estimate(p, kUnit);
    for (Index j = 0; j < 2; ++j) EXPECT_NEAR(mean(j), est(j), 3.0 * se(j));
}

TEST(Samplers, ZeroExcessReturnCentresDraws) {
    PosteriorParams p = synthetic_posterior(3, 40, false, 41);
    p.mean.setConstant(0.0);
    for (auto sampler : {&sample_weights_basic, static_cast<WeightSampleBatch (*)(const PosteriorParams&,
                                                                                 const PortfolioContext&, Index,
                                                                                 const Matrix&, const RngStream&)>(
                                                    &sample_weights_fast)}) {
        const WeightSampleBatch b = sampler(p, kUnit, 50'000, Matrix::Identity(3, 3), RngStream(41, 1));
        const Vector mean = oracle::column_means(b.draws);
        const Vector se = oracle::mean_standard_errors(b.draws);
        for (Index j = 0; j < 3; ++j) EXPECT_NEAR(mean(j), 0.0, 3.0 * se(j));
    }
}

TEST(Samplers, SingleAssetSurvivesHeavyTails) {
    // Few observations give an F draw with a heavy right tail; the k = 1
    // conditional factor then cancels to rounding noise of either sign.
    for (bool conjugate : {false, true}) {
        const PosteriorParams p = synthetic_posterior(1, conjugate ? 6 : 4, conjugate, 49);
        const PortfolioContext ctx = PortfolioContext::flat(20.0, 1.0, 0, 4, 0.0005);
        const Matrix l = Matrix::Identity(1, 1);
        EXPECT_TRUE(sample_weights_fast(p, ctx, 200'000, l, RngStream(49, 1)).draws.allFinite());
        EXPECT_TRUE(sample_weights_basic(p, ctx, 200'000, l, RngStream(49, 2)).draws.allFinite());
    }
}

TEST(Samplers, FastIsCheaperPerDrawFromEightAssets) {
    using clock = std::chrono::steady_clock;
    for (Index k : {8, 12}) {
        const PosteriorParams p = synthetic_posterior(k, 60, false, 50);
        const Matrix l = Matrix::Identity(k, k);
        const auto t0 = clock::now();
        const WeightSampleBatch fast = sample_weights_fast(p, kUnit, 20'000, l, RngStream(50, 1));
        const auto t1 = clock::now();
        const WeightSampleBatch basic = sample_weights_basic(p, kUnit, 20'000, l, RngStream(50, 2));
        const auto t2 = clock::now();
        EXPECT_LT(t1 - t0, t2 - t1) << "k=" << k;
        EXPECT_EQ(fast.size(), basic.size());
    }
}

TEST(Samplers, Deterministic) {
    const PosteriorParams p = synthetic_posterior(3, 40, true, 42);
    const Matrix l = Matrix::Identity(3, 3);
    EXPECT_EQ(sample_weights_basic(p, kUnit, 9000, l, RngStream(1, 2)).draws,
              sample_weights_basic(p, kUnit, 9000, l, RngStream(1, 2)).draws);
    EXPECT_EQ(sample_weights_fast(p, kUnit, 9000, l, RngStream(1, 2)).draws,
              sample_weights_fast(p, kUnit, 9000, l, RngStream(1, 2)).draws);
    EXPECT_NE(sample_weights_fast(p, kUnit, 100, l, RngStream(1, 2)).draws,
              sample_weights_fast(p, kUnit, 100, l, RngStream(1, 3)).draws);
}

TEST(Samplers, FastAndBasicAgreeInDistribution) {
    // Per-coordinate KS p-values over many independent seed pairs must look
    // uniform, and p < 0.01 must be no more frequent than chance allows
    // (P[Binomial(60, 0.01) >= 5] < 1e-3).
    for (bool conjugate : {false, true}) {
        const PosteriorParams p = synthetic_posterior(3, 60, conjugate, 43);
        const Matrix l = Matrix::Identity(3, 3);
        std::vector<double> pvalues;
        for (std::uint64_t rep = 0; rep < 20; ++rep) {
            const Matrix a = sample_weights_basic(p, kUnit, 20'000, l, RngStream(430 + rep, 1)).draws;
            const Matrix b = sample_weights_fast(p, kUnit, 20'000, l, RngStream(430 + rep, 2)).draws;
            for (Index j = 0; j < 3; ++j)
                pvalues.push_back(oracle::ks_two_sample(Vector(a.col(j)), Vector(b.col(j))).p_value);
        }
        const auto small = std::count_if(pvalues.begin(), pvalues.end(), [](double x) { return x < 0.01; });
        EXPECT_LE(small, 4) << "conjugate=" << conjugate;
        EXPECT_GT(oracle::ks_uniform(pvalues).p_value, 0.01) << "conjugate=" << conjugate;
    }
}

TEST(Samplers, FastAgreesWithHierarchicalOracle) {
    for (bool conjugate : {false, true}) {
        const PosteriorParams p = synthetic_posterior(2, 40, conjugate, 44);
        const Matrix a = oracle::hierarchical_weight_draws(p, kUnit, 20'000, 44);
        const Matrix b = sample_weights_fast(p, kUnit, 20'000, RngStream(44, 2)).draws;
        for (Index j = 0; j < 2; ++j) {
            EXPECT_GT(oracle::ks_two_sample(Vector(a.col(j)), Vector(b.col(j))).p_value, 0.01)
                << "coordinate " << j << " conjugate=" << conjugate;
        }
    }
}

TEST(Samplers, SelectorPicksLinearCombinations) {
    const PosteriorParams p = synthetic_posterior(4, 50, false, 45);
    Matrix l(2, 4);
    l << 1, 0, 0, 0, 1, 1, 1, 1;
    for (auto fast : {false, true}) {
        const WeightSampleBatch b = fast ? sample_weights_fast(p, kUnit, 100'000, l, RngStream(45, 1))
                                         : sample_weights_basic(p, kUnit, 100'000, l, RngStream(45, 1));
        ASSERT_EQ(b.draws.cols(), 2);
        const Vector mean = oracle::column_means(b.draws);
        const Vector se = oracle::mean_standard_errors(b.draws);
        const Vector est = l * bayes_estimate(p, kUnit);
        for (Index j = 0; j < 2; ++j) EXPECT_NEAR(mean(j), est(j), 3.0 * se(j));
        const Matrix cov = l * weight_covariance(p, kUnit).matrix() * l.transpose();
        EXPECT_LT(relative_frobenius(oracle::sample_covariance(b.draws), cov), 0.05);
    }
}

TEST(Samplers, RejectInvalidSelector) {
    const PosteriorParams p = synthetic_posterior(3, 30, false, 46);
    Matrix rank_deficient(2, 3);
    rank_deficient << 1, 2, 3, 2, 4, 6;
    expect_code(ErrorCode::InvalidSelector,
                [&] { sample_weights_fast(p, kUnit, 10, rank_deficient, RngStream(1, 1)); });
    expect_code(ErrorCode::InvalidSelector,
                [&] { sample_weights_basic(p, kUnit, 10, Matrix::Identity(2, 2), RngStream(1, 1)); });
    expect_code(ErrorCode::InvalidSelector,
                [&] { sample_weights_basic(p, kUnit, 10, Matrix::Identity(4, 3), RngStream(1, 1)); });
    expect_code(ErrorCode::InvalidArgument,
                [&] { sample_weights_fast(p, kUnit, 0, Matrix::Identity(3, 3), RngStream(1, 1)); });
}

TEST(Samplers, RiskAversionScalesEverything) {
    const PosteriorParams p = synthetic_posterior(3, 40, true, 47);
    const PortfolioContext a = PortfolioContext::flat(1.0, 1.0, 0, 1, 0.0);
    const PortfolioContext b = PortfolioContext::flat(4.0, 1.0, 0, 1, 0.0);
    const Matrix da = sample_weights_fast(p, a, 5000, RngStream(47, 1)).draws;
    const Matrix db = sample_weights_fast(p, b, 5000, RngStream(47, 1)).draws;
    EXPECT_LT((db - 0.25 * da).cwiseAbs().maxCoeff(), 1e-12 * da.cwiseAbs().maxCoeff());
    EXPECT_LT((bayes_estimate(p, b) - 0.25 * bayes_estimate(p, a)).norm(), 1e-14 * bayes_estimate(p, a).norm());
    EXPECT_LT(relative_frobenius(weight_covariance(p, b).matrix(), weight_covariance(p, a).matrix() / 16.0), 1e-14);
}

TEST(StandardizeBatch, CentresAndScales) {
    const PosteriorParams p = synthetic_posterior(3, 80, true, 48);
    const WeightSampleBatch b = sample_weights_fast(p, kUnit, 200'000, RngStream(48, 1));
    const Matrix z = standardize_batch(b);
    const Vector mean = oracle::column_means(z);
    const Vector var = oracle::sample_covariance(z).diagonal();
    const double n = static_cast<double>(z.rows());
    for (Index j = 0; j < 3; ++j) {
        EXPECT_NEAR(mean(j), 0.0, 3.0 * std::sqrt(var(j) / n));
        // SE of a sample variance: sqrt((m4 - var^2) / n).
        const double m4 = (z.col(j).array() - mean(j)).pow(4).mean();
        EXPECT_NEAR(var(j), 1.0, 3.0 * std::sqrt((m4 - var(j) * var(j)) / n));
    }
}
