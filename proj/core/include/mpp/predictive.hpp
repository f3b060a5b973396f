#pragma once

#include "mpp/linalg.hpp"
#include "mpp/posterior.hpp"
#include "mpp/random.hpp"

namespace mpp {

/// W_{t+1} = W_t (1 + r_f + v' (x - r_f 1)).
double wealth_step(double w_prev, const Vector& v, const Vector& realized_returns, double rf_next);

struct WealthSampleBatch {
    Vector draws;
    RngStream seed;
    int period = 1;  ///< label of the predicted period, t + 1

    Index size() const noexcept { return draws.size(); }
};

/// Posterior-predictive draws of next-period wealth for a held portfolio v:
///   W (1 + r_f + v'(m - r_f 1) + sqrt(v' S v) [t1 / sqrt(v0 d) + sqrt(1 + t1^2 / d) t2 / sqrt(d + 1)])
/// with t1 ~ t(d), t2 ~ t(d + 1), d = t_df, v0 = precision, m = mean, S = scale.
WealthSampleBatch sample_predictive_wealth(const PosteriorParams& post, const Vector& v, double w_now,
                                           double rf_next, Index B, const RngStream& rng, int period = 1);

struct CredibleBand {
    double level;
    double lower;
    double upper;
    double point;  ///< batch mean

    double width() const noexcept { return upper - lower; }
};

/// Equal-tailed band from linearly interpolated ("type 7") empirical
/// quantiles. For very narrow levels on skewed batches the mean may fall
/// outside [lower, upper]; the band is reported as computed.
CredibleBand credible_band(const Vector& draws, double level);

inline CredibleBand credible_band(const WealthSampleBatch& batch, double level) {
    return credible_band(batch.draws, level);
}

/// Linearly interpolated ("type 7") empirical quantile of a sorted sample.
double sorted_quantile(const Vector& sorted, double prob);

/// Fraction of draws with strictly negative wealth.
double default_probability(const Vector& draws);

inline double default_probability(const WealthSampleBatch& batch) {
    return default_probability(batch.draws);
}

}  // namespace mpp
