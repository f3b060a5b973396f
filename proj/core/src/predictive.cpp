#include "mpp/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpp/errors.hpp"
#include "mpp/parallel.hpp"

namespace mpp {

namespace {
constexpr Index kMinBandSamples = 100;
}

double wealth_step(double w_prev, const Vector& v, const Vector& realized_returns, double rf_next) {
    if (v.size() != realized_returns.size()) {
        raise(ErrorCode::InvalidArgument, "wealth_step: weight/return dimension mismatch");
    }
    const double excess = v.dot((realized_returns.array() - rf_next).matrix());
    return w_prev * (1.0 + rf_next + excess);
}

WealthSampleBatch sample_predictive_wealth(const PosteriorParams& post, const Vector& v, double w_now,
                                           double rf_next, Index B, const RngStream& rng, int period) {
    if (B < 1) raise(ErrorCode::InvalidArgument, "batch size B must be >= 1");
    if (v.size() != post.k()) raise(ErrorCode::InvalidArgument, "portfolio dimension does not match posterior");
    if (!(post.t_df > 0.0)) raise(ErrorCode::InsufficientSample, "predictive distribution needs t_df > 0");
    if (!std::isfinite(w_now) || !std::isfinite(rf_next) || !v.allFinite()) {
        raise(ErrorCode::InvalidArgument, "predictive wealth: non-finite input");
    }

    const double drift = 1.0 + rf_next + v.dot((post.mean.array() - rf_next).matrix());
    const double spread = std::sqrt(std::max(0.0, v.dot(post.scale.matrix() * v)));
    const double d = post.t_df;
    const double a1 = 1.0 / std::sqrt(post.precision * d);
    const double a2 = 1.0 / std::sqrt(d + 1.0);

    Vector draws(B);
    parallel_chunks(static_cast<std::size_t>(B), kSamplerChunk,
                    [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        RngStream r = rng.substream(chunk);
        for (std::size_t i = begin; i < end; ++i) {
            const double t1 = sample_student_t(d, r);
            const double t2 = sample_student_t(d + 1.0, r);
            const double kappa = t1 * a1 + std::sqrt(1.0 + t1 * t1 / d) * t2 * a2;
            draws(static_cast<Index>(i)) = w_now * (drift + spread * kappa);
        }
    });
    return {std::move(draws), rng, period};
}

double sorted_quantile(const Vector& sorted, double prob) {
    const Index n = sorted.size();
    const double h = (static_cast<double>(n) - 1.0) * prob;
    const Index lo = std::clamp<Index>(static_cast<Index>(std::floor(h)), 0, n - 1);
    const Index hi = std::min<Index>(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0 || sorted(hi) == sorted(lo)) return sorted(lo);
    return sorted(lo) + frac * (sorted(hi) - sorted(lo));
}

CredibleBand credible_band(const Vector& draws, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        raise(ErrorCode::InvalidArgument, "credible level must lie in (0, 1), got " + std::to_string(level));
    }
    if (draws.size() < kMinBandSamples) {
        raise(ErrorCode::TooFewSamples,
              "credible band needs at least 100 draws, got " + std::to_string(draws.size()));
    }
    Vector sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    const double first = draws(0);
    const double point = first + (draws.array() - first).sum() / static_cast<double>(draws.size());
    return {level, sorted_quantile(sorted, 0.5 * (1.0 - level)), sorted_quantile(sorted, 0.5 * (1.0 + level)), point};
}

double default_probability(const Vector& draws) {
    if (draws.size() < 1) raise(ErrorCode::TooFewSamples, "default probability needs at least one draw");
    const auto defaults = std::count_if(draws.begin(), draws.end(), [](double w) { return w < 0.0; });
    return static_cast<double>(defaults) / static_cast<double>(draws.size());
}

}  // namespace mpp
