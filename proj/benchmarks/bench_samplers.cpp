#include <benchmark/benchmark.h>

#include <cmath>

#include "mpp/linalg.hpp"
#include "mpp/posterior.hpp"
#include "mpp/predictive.hpp"
#include "mpp/random.hpp"
#include "mpp/weights.hpp"

using namespace mpp;

namespace {

// Equicorrelated weekly-scale returns, n = 4k rows (at least 60).
PosteriorParams make_posterior(Index k) {
    RngStream rng(7, 0);
    const Index n = std::max<Index>(60, 4 * k);
    Vector mu(k), vol(k);
    for (Index i = 0; i < k; ++i) {
        mu(i) = 0.002 + 0.002 * rng.normal();
        vol(i) = 0.02 + 0.02 * rng.uniform();
    }
    Matrix corr = Matrix::Constant(k, k, 0.3);
    corr.diagonal().setOnes();
    const Matrix chol = SpdMatrix(vol.asDiagonal() * corr * vol.asDiagonal()).cholesky_lower();
    Matrix x(n, k);
    Vector z(k);
    for (Index t = 0; t < n; ++t) {
        fill_standard_normal(z, rng);
        x.row(t) = (mu + chol * z).transpose();
    }
    return posterior_params(ReturnsWindow(x), DiffusePrior{});
}

const PortfolioContext kCtx = PortfolioContext::flat(10.0, 1.0, 0, 13, 0.0005);

void BM_FastSampler(benchmark::State& state) {
    const Index k = state.range(0);
    const Index B = state.range(1);
    const PosteriorParams post = make_posterior(k);
    for (auto _ : state) {
        auto batch = sample_weights_fast(post, kCtx, B, RngStream(1, 0));
        benchmark::DoNotOptimize(batch.draws.data());
    }
    state.SetItemsProcessed(state.iterations() * B);
}

void BM_BasicSampler(benchmark::State& state) {
    const Index k = state.range(0);
    const Index B = state.range(1);
    const PosteriorParams post = make_posterior(k);
    const Matrix l = Matrix::Identity(k, k);
    for (auto _ : state) {
        auto batch = sample_weights_basic(post, kCtx, B, l, RngStream(1, 0));
        benchmark::DoNotOptimize(batch.draws.data());
    }
    state.SetItemsProcessed(state.iterations() * B);
}

// Single-coordinate selector: the per-draw root is 1x1 for any k.
void BM_FastSamplerOneWeight(benchmark::State& state) {
    const Index k = state.range(0);
    const Index B = state.range(1);
    const PosteriorParams post = make_posterior(k);
    const Matrix l = Matrix::Identity(k, k).topRows(1);
    for (auto _ : state) {
        auto batch = sample_weights_fast(post, kCtx, B, l, RngStream(1, 0));
        benchmark::DoNotOptimize(batch.draws.data());
    }
    state.SetItemsProcessed(state.iterations() * B);
}

void BM_PsdSqrt(benchmark::State& state) {
    const Index k = state.range(0);
    RngStream rng(3, 0);
    Matrix a(k, k);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    const Matrix m = a * a.transpose();
    Matrix root(k, k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(psd_sqrt_into(m, root));
    }
}

void BM_PredictiveWealth(benchmark::State& state) {
    const Index k = state.range(0);
    const Index B = state.range(1);
    const PosteriorParams post = make_posterior(k);
    const Vector v = bayes_estimate(post, kCtx);
    for (auto _ : state) {
        auto batch = sample_predictive_wealth(post, v, 1.0, 0.0005, B, RngStream(1, 0));
        benchmark::DoNotOptimize(batch.draws.data());
    }
    state.SetItemsProcessed(state.iterations() * B);
}

void BM_CredibleBand(benchmark::State& state) {
    const Index B = state.range(0);
    RngStream rng(5, 0);
    Vector draws(B);
    fill_standard_normal(draws, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(credible_band(draws, 0.95));
    }
    state.SetItemsProcessed(state.iterations() * B);
}

}  // namespace

BENCHMARK(BM_FastSampler)->ArgsProduct({{1, 3, 8, 12, 25}, {100'000}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BasicSampler)->ArgsProduct({{1, 3, 8, 12, 25}, {100'000}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FastSamplerOneWeight)->ArgsProduct({{8, 25}, {100'000}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PsdSqrt)->RangeMultiplier(2)->Range(2, 32);
BENCHMARK(BM_PredictiveWealth)->ArgsProduct({{3, 12}, {100'000}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CredibleBand)->Arg(100'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
