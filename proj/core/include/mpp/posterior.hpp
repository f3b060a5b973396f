#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "mpp/linalg.hpp"
#include "mpp/returns.hpp"

namespace mpp {

/// Jeffreys prior pi(mu, Sigma) ∝ |Sigma|^{-(k+1)/2}.
struct DiffusePrior {};

/// Normal-inverse-Wishart prior: mu | Sigma ~ N(m0, Sigma / r0), Sigma ~ IW_k(d0, S0).
struct ConjugatePrior {
    Vector m0;
    double r0;
    double d0;
    SpdMatrix s0;
};

using PriorSpec = std::variant<DiffusePrior, ConjugatePrior>;

enum class PriorKind { Diffuse, Conjugate };

std::string_view to_string(PriorKind kind) noexcept;

struct SampleMoments {
    Vector mean;
    SpdMatrix cov;  ///< unbiased, divisor n - 1
};

/// Posterior of (mu, Sigma) given a window:
///   mu | x            ~ t_k(t_df, mean, scale / (precision * t_df))
///   Sigma | mu, x     ~ IW_k(iw_df, scale + precision (mu - mean)(mu - mean)')
/// and Sigma^{-1} | mu, x is Wishart with chi2_df = iw_df - k - 1 degrees.
struct PosteriorParams {
    PriorKind kind;
    Index n;  ///< window length
    Vector mean;
    SpdMatrix scale;
    double t_df;
    double chi2_df;
    double iw_df;
    double precision;

    Index k() const noexcept { return mean.size(); }

    /// Scale of the conditional inverse-Wishart given mu.
    Matrix conditional_scale(const Vector& mu) const;

    /// chi2_df - 1: n - 1 (diffuse) or n + d0 - k - 1 (conjugate).
    double estimate_multiplier() const noexcept { return chi2_df - 1.0; }

    /// Large-sample covariance proxy: scale / (n - 1) for diffuse, scale / (n + r0) for conjugate.
    Matrix asymptotic_scale() const;
};

/// Column means and unbiased covariance. Throws DegenerateSample when the
/// covariance is singular (n <= k, constant or collinear columns).
SampleMoments sample_moments(const ReturnsWindow& window);

PosteriorParams posterior_params(const ReturnsWindow& window, const PriorSpec& prior);

struct EmpiricalBayesFit {
    Vector m0;
    SpdMatrix s0;
};

/// Marginal-likelihood maximizers for the conjugate prior on a presample:
/// m0 = presample mean, S0 = ((d0 - k - 1)(n - 1) / n) * presample covariance.
EmpiricalBayesFit empirical_bayes_hyperparams(const ReturnsWindow& presample, double d0);

}  // namespace mpp
