#pragma once

#include <vector>

#include "mpp/linalg.hpp"
#include "mpp/posterior.hpp"
#include "mpp/random.hpp"
#include "mpp/returns.hpp"

namespace mpp {

/// Investor state at period t of a T-period horizon.
/// rf_schedule[i - 1] holds the net risk-free rate r_{f,i}, i = 1..T.
struct PortfolioContext {
    double gamma = 1.0;
    double wealth = 1.0;
    int t = 0;
    int horizon = 1;
    std::vector<double> rf_schedule;

    /// Throws InvalidArgument on gamma <= 0, t outside [0, T-1], a short
    /// schedule, or a gross rate 1 + r_f <= 0.
    void validate() const;

    /// Risk-free rate earned over the coming period, r_{f,t+1}.
    double rf_next() const { return rf_schedule.at(static_cast<std::size_t>(t)); }

    /// Context with a flat rate over the whole horizon.
    static PortfolioContext flat(double gamma, double wealth, int t, int horizon, double rf);
};

/// C_t = 1 / (gamma W_t prod_{i=t+2}^{T} (1 + r_{f,i})); the empty product is 1.
double discount_factor(const PortfolioContext& ctx);

struct LatentParams {
    Vector mu;
    SpdMatrix sigma;
};

/// w_t = C_t Sigma^{-1} (mu - r_{f,t+1} 1).
Vector oracle_weights(const LatentParams& params, const PortfolioContext& ctx);

/// oracle_weights evaluated at the sample mean and covariance.
Vector plugin_weights(const ReturnsWindow& window, const PortfolioContext& ctx);

/// Posterior mean of w_t: C_t (chi2_df - 1) scale^{-1} (mean - r_f 1).
Vector bayes_estimate(const PosteriorParams& post, const PortfolioContext& ctx);

/// Exact posterior covariance of w_t:
///   C^2 (K - 1) [S^{-1} d d' S^{-1} + (1 + v d' S^{-1} d) / v * S^{-1}]
/// with K = chi2_df, v = precision, S = scale, d = mean - r_f 1.
SpdMatrix weight_covariance(const PosteriorParams& post, const PortfolioContext& ctx);

/// Large-n limit of n * weight_covariance:
///   C^2 [A^{-1} d d' A^{-1} + (1 + d' A^{-1} d) A^{-1}],  A = post.asymptotic_scale().
SpdMatrix asymptotic_covariance(const PosteriorParams& post, const PortfolioContext& ctx);

struct WeightSampleBatch {
    Matrix draws;  ///< B x p, one draw of L w_t per row
    RngStream seed;
    PosteriorParams posterior;
    PortfolioContext context;
    Matrix selector;  ///< L, p x k

    Index size() const noexcept { return draws.rows(); }
};

/// Draws of L w_t from the hierarchical representation: mu from its
/// marginal t, then a chi-square / Gaussian pair conditional on mu. Solves
/// a k x k system per draw.
WeightSampleBatch sample_weights_basic(const PosteriorParams& post, const PortfolioContext& ctx, Index B,
                                       const Matrix& selector, const RngStream& rng);

/// Same distribution as sample_weights_basic, parameterized by (Q, u) with
/// Q ~ F(k, t_df) and u uniform on the sphere. No factorization per draw:
/// the conditional covariance factor is applied in low-rank form, O(pk).
WeightSampleBatch sample_weights_fast(const PosteriorParams& post, const PortfolioContext& ctx, Index B,
                                      const Matrix& selector, const RngStream& rng);

inline WeightSampleBatch sample_weights_fast(const PosteriorParams& post, const PortfolioContext& ctx, Index B,
                                             const RngStream& rng) {
    return sample_weights_fast(post, ctx, B, Matrix::Identity(post.k(), post.k()), rng);
}

/// (draw_j - [L w_hat]_j) / sqrt([L V L']_jj) per column, with w_hat and V
/// the posterior mean and covariance. Throws DegenerateVariance on a
/// non-positive diagonal.
Matrix standardize_batch(const WeightSampleBatch& batch);

}  // namespace mpp
