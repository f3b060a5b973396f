#include "mpp/weights.hpp"

#include <cmath>
#include <string>

#include "mpp/errors.hpp"
#include "mpp/parallel.hpp"

namespace mpp {

namespace {

constexpr double kSelectorRankTolerance = 1e-10;

Vector excess_mean(const Vector& mean, double rf) {
    return (mean.array() - rf).matrix();
}

void check_selector(const Matrix& L, Index k) {
    if (L.cols() != k || L.rows() < 1 || L.rows() > k) {
        raise(ErrorCode::InvalidSelector, "selector must be p x " + std::to_string(k) + " with 1 <= p <= k, got " +
                                              std::to_string(L.rows()) + "x" + std::to_string(L.cols()));
    }
    if (!L.allFinite()) raise(ErrorCode::InvalidSelector, "selector has non-finite entries");
    Eigen::ColPivHouseholderQR<Matrix> qr(L.transpose());
    qr.setThreshold(kSelectorRankTolerance);
    if (qr.rank() != L.rows()) {
        raise(ErrorCode::InvalidSelector, "selector is not of full row rank");
    }
}

// Root of the conditional covariance factor eps * P - z z'. It is PSD by
// Cauchy-Schwarz, so rounding can push it slightly negative relative to its
// own spectrum; noise is judged against the size of the terms instead. With
// k = 1 the factor vanishes identically.
void conditional_root(const Matrix& m, double reference, bool vanishes, Matrix& root) {
    if (vanishes || m.cwiseAbs().maxCoeff() <= kPsdClampTolerance * reference) {
        root.setZero(m.rows(), m.cols());
        return;
    }
    psd_sqrt_into(m, root);
}

void check_batch_size(Index B) {
    if (B < 1) raise(ErrorCode::InvalidArgument, "batch size B must be >= 1");
}

}  // namespace

void PortfolioContext::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        raise(ErrorCode::InvalidArgument, "gamma must be positive, got " + std::to_string(gamma));
    }
    if (!std::isfinite(wealth)) raise(ErrorCode::InvalidArgument, "wealth must be finite");
    if (horizon < 1) raise(ErrorCode::InvalidArgument, "horizon T must be >= 1");
    if (t < 0 || t > horizon - 1) {
        raise(ErrorCode::InvalidArgument,
              "period t=" + std::to_string(t) + " outside [0, " + std::to_string(horizon - 1) + "]");
    }
    if (rf_schedule.size() < static_cast<std::size_t>(horizon)) {
        raise(ErrorCode::InvalidArgument, "risk-free schedule shorter than horizon");
    }
    for (double r : rf_schedule) {
        if (!std::isfinite(r) || !(1.0 + r > 0.0)) {
            raise(ErrorCode::InvalidArgument, "risk-free rate must satisfy 1 + r_f > 0, got " + std::to_string(r));
        }
    }
}

PortfolioContext PortfolioContext::flat(double gamma, double wealth, int t, int horizon, double rf) {
    return {gamma, wealth, t, horizon, std::vector<double>(static_cast<std::size_t>(std::max(horizon, 1)), rf)};
}

double discount_factor(const PortfolioContext& ctx) {
    ctx.validate();
    if (ctx.wealth == 0.0) raise(ErrorCode::ZeroWealth, "current wealth is zero");
    double prod = 1.0;
    for (int i = ctx.t + 2; i <= ctx.horizon; ++i) {
        prod *= 1.0 + ctx.rf_schedule[static_cast<std::size_t>(i - 1)];
    }
    return 1.0 / (ctx.gamma * ctx.wealth * prod);
}

Vector oracle_weights(const LatentParams& params, const PortfolioContext& ctx) {
    if (params.mu.size() != params.sigma.dim()) {
        raise(ErrorCode::InvalidArgument, "mu/sigma dimension mismatch");
    }
    const double c = discount_factor(ctx);
    return c * params.sigma.solve(excess_mean(params.mu, ctx.rf_next()));
}

Vector plugin_weights(const ReturnsWindow& window, const PortfolioContext& ctx) {
    SampleMoments m = sample_moments(window);
    return oracle_weights(LatentParams{std::move(m.mean), std::move(m.cov)}, ctx);
}

Vector bayes_estimate(const PosteriorParams& post, const PortfolioContext& ctx) {
    const double c = discount_factor(ctx);
    return c * post.estimate_multiplier() * post.scale.solve(excess_mean(post.mean, ctx.rf_next()));
}

SpdMatrix weight_covariance(const PosteriorParams& post, const PortfolioContext& ctx) {
    const double c = discount_factor(ctx);
    const Index k = post.k();
    const Vector d = excess_mean(post.mean, ctx.rf_next());
    const Vector sd = post.scale.solve(d);
    const Matrix sinv = post.scale.solve(Matrix::Identity(k, k));
    const double v = post.precision;
    const double quad = d.dot(sd);
    Matrix cov = c * c * post.estimate_multiplier() * (sd * sd.transpose() + ((1.0 + v * quad) / v) * sinv);
    return SpdMatrix(symmetrize(cov));
}

SpdMatrix asymptotic_covariance(const PosteriorParams& post, const PortfolioContext& ctx) {
    const double c = discount_factor(ctx);
    const Index k = post.k();
    const SpdMatrix a(post.asymptotic_scale());
    const Vector d = excess_mean(post.mean, ctx.rf_next());
    const Vector ad = a.solve(d);
    const Matrix ainv = a.solve(Matrix::Identity(k, k));
    Matrix cov = c * c * (ad * ad.transpose() + (1.0 + d.dot(ad)) * ainv);
    return SpdMatrix(symmetrize(cov));
}

WeightSampleBatch sample_weights_basic(const PosteriorParams& post, const PortfolioContext& ctx, Index B,
                                       const Matrix& selector, const RngStream& rng) {
    check_batch_size(B);
    const Index k = post.k();
    check_selector(selector, k);
    const double c = discount_factor(ctx);
    const double rf = ctx.rf_next();
    const Index p = selector.rows();

    const MvtSampler mu_sampler(post.t_df, post.mean,
                                SpdMatrix(post.scale.matrix() / (post.precision * post.t_df)));

    Matrix draws(B, p);
    parallel_chunks(static_cast<std::size_t>(B), kSamplerChunk,
                    [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        RngStream r = rng.substream(chunk);
        Vector mu(k), z0(p);
        Matrix root(p, p);
        Eigen::LLT<Matrix> llt(k);
        for (std::size_t i = begin; i < end; ++i) {
            mu_sampler.draw(mu, r);
            llt.compute(post.conditional_scale(mu));
            if (llt.info() != Eigen::Success) {
                raise(ErrorCode::NotSpd, "conditional posterior scale is not positive definite");
            }
            const Vector delta = excess_mean(mu, rf);
            const Vector ainv_delta = llt.solve(delta);
            const Vector a = selector * ainv_delta;
            const Matrix l_ainv_lt = selector * llt.solve(selector.transpose());
            const double eps = delta.dot(ainv_delta);
            const Matrix m = symmetrize(eps * l_ainv_lt - a * a.transpose());
            conditional_root(m, std::abs(eps) * l_ainv_lt.cwiseAbs().maxCoeff() + a.squaredNorm(), k == 1, root);

            const double eta = sample_chi2(post.chi2_df, r);
            fill_standard_normal(z0, r);
            draws.row(static_cast<Index>(i)) = (c * (eta * a + std::sqrt(eta) * (root * z0))).transpose();
        }
    });
    return {std::move(draws), rng, post, ctx, selector};
}

WeightSampleBatch sample_weights_fast(const PosteriorParams& post, const PortfolioContext& ctx, Index B,
                                      const Matrix& selector, const RngStream& rng) {
    check_batch_size(B);
    const Index k = post.k();
    check_selector(selector, k);
    const double c = discount_factor(ctx);
    const Index p = selector.rows();
    const double kd = static_cast<double>(k);
    const double dy = post.t_df;
    const double inv_v = 1.0 / post.precision;

    // The only factorization: S^{-1/2}, once per batch.
    const Matrix s_half = spd_inv_sqrt(post.scale).matrix();
    const Vector s_half_d = s_half * excess_mean(post.mean, ctx.rf_next());
    const Matrix l_s_half = selector * s_half;

    // Given (Q, u), S*(mu)^{-1} = F F' with F = S^{-1/2} (I - beta u u') and
    // S^{-1/2}(mu - rf) = g. With h = F' (mu - rf), eps = |h|^2 and the
    // conditional factor eps L F F' L' - L F h h' F' L' equals R R' for
    // R = L F (sqrt(eps) I - h h' / sqrt(eps)), so a draw is
    // c L F (eta h + sqrt(eta) R0 z) with z ~ N(0, I_k), all in O(pk).
    Matrix draws(B, p);
    parallel_chunks(static_cast<std::size_t>(B), kSamplerChunk,
                    [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        RngStream r = rng.substream(chunk);
        Vector u(k), g(k), h(k), z(k), y(k), ly(p);
        for (std::size_t i = begin; i < end; ++i) {
            const double f = sample_f(kd, dy, r);
            fill_unit_sphere(u, r);
            const double q = kd * f / dy;
            const double root_1q = std::sqrt(1.0 + q);
            const double beta = q / (root_1q * (1.0 + root_1q));  // 1 - 1/sqrt(1+q) without cancellation

            g = s_half_d + std::sqrt(q * inv_v) * u;
            h = g - (beta * u.dot(g)) * u;
            const double eps = h.squaredNorm();

            const double eta = sample_chi2(post.chi2_df, r);
            fill_standard_normal(z, r);
            y = eta * h;
            if (eps > 0.0) {
                const double se = std::sqrt(eps);
                y += std::sqrt(eta) * (se * z - (h.dot(z) / se) * h);
            }
            ly.noalias() = l_s_half * u;
            draws.row(static_cast<Index>(i)) = (c * (l_s_half * y - (beta * u.dot(y)) * ly)).transpose();
        }
    });
    return {std::move(draws), rng, post, ctx, selector};
}

Matrix standardize_batch(const WeightSampleBatch& batch) {
    const Matrix& L = batch.selector;
    const Vector center = L * bayes_estimate(batch.posterior, batch.context);
    const Matrix cov = L * weight_covariance(batch.posterior, batch.context).matrix() * L.transpose();
    Matrix out(batch.draws.rows(), batch.draws.cols());
    for (Index j = 0; j < out.cols(); ++j) {
        const double var = cov(j, j);
        if (!(var > 0.0) || !std::isfinite(var)) {
            raise(ErrorCode::DegenerateVariance, "weight variance of coordinate " + std::to_string(j) + " is not positive");
        }
        out.col(j) = (batch.draws.col(j).array() - center(j)) / std::sqrt(var);
    }
    return out;
}

}  // namespace mpp
