#include "mpp/posterior.hpp"

#include <string>

#include "mpp/errors.hpp"

namespace mpp {

std::string_view to_string(PriorKind kind) noexcept {
    return kind == PriorKind::Diffuse ? "diffuse" : "conjugate";
}

namespace {

struct Scatter {
    Vector mean;
    Matrix scatter;  // sum of centered outer products
};

Scatter scatter_of(const ReturnsWindow& w) {
    const Matrix& x = w.returns();
    Scatter s;
    s.mean = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - s.mean.transpose();
    s.scatter = symmetrize(centered.transpose() * centered);
    return s;
}

}  // namespace

Matrix PosteriorParams::conditional_scale(const Vector& mu) const {
    const Vector d = mu - mean;
    return scale.matrix() + precision * d * d.transpose();
}

Matrix PosteriorParams::asymptotic_scale() const {
    const double denom = kind == PriorKind::Diffuse ? static_cast<double>(n) - 1.0 : precision;
    return scale.matrix() / denom;
}

SampleMoments sample_moments(const ReturnsWindow& window) {
    const Index n = window.n();
    const Index k = window.k();
    if (n <= k) {
        raise(ErrorCode::DegenerateSample,
              "sample covariance is singular: n=" + std::to_string(n) + " <= k=" + std::to_string(k) +
                  " (window ending " + window.dates().back() + ")");
    }
    Scatter s = scatter_of(window);
    try {
        return {std::move(s.mean), SpdMatrix(s.scatter / static_cast<double>(n - 1))};
    } catch (const Error&) {
        raise(ErrorCode::DegenerateSample,
              "sample covariance is not positive definite (window ending " + window.dates().back() + ")");
    }
}

PosteriorParams posterior_params(const ReturnsWindow& window, const PriorSpec& prior) {
    const Index n = window.n();
    const Index k = window.k();
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);

    if (std::holds_alternative<DiffusePrior>(prior)) {
        SampleMoments m = sample_moments(window);
        return PosteriorParams{PriorKind::Diffuse,
                               n,
                               std::move(m.mean),
                               SpdMatrix(m.cov.matrix() * (nd - 1.0)),
                               nd - kd,
                               nd,
                               nd + kd + 1.0,
                               nd};
    }

    const auto& c = std::get<ConjugatePrior>(prior);
    if (c.m0.size() != k || c.s0.dim() != k) {
        raise(ErrorCode::InvalidArgument, "conjugate prior dimension does not match k=" + std::to_string(k));
    }
    if (!(c.r0 > 0.0)) {
        raise(ErrorCode::InvalidArgument, "conjugate prior needs r0 > 0, got " + std::to_string(c.r0));
    }
    if (!(c.d0 > kd + 1.0)) {
        raise(ErrorCode::InvalidDf, "conjugate prior needs d0 > k + 1, got d0=" + std::to_string(c.d0));
    }
    if (!(nd + c.d0 - 2.0 * kd > 0.0)) {
        raise(ErrorCode::InsufficientSample, "conjugate posterior needs n + d0 - 2k > 0");
    }

    // The window scatter may be singular here (n <= k); S0 keeps the posterior scale SPD.
    const Scatter s = scatter_of(window);
    const double prec = nd + c.r0;
    Vector mean = (nd * s.mean + c.r0 * c.m0) / prec;
    const Vector gap = s.mean - c.m0;
    Matrix scale = s.scatter + c.s0.matrix() + (nd * c.r0 / prec) * gap * gap.transpose();
    try {
        return PosteriorParams{PriorKind::Conjugate,
                               n,
                               std::move(mean),
                               SpdMatrix(symmetrize(scale)),
                               nd + c.d0 - 2.0 * kd,
                               nd + c.d0 - kd,
                               nd + c.d0 + 1.0,
                               prec};
    } catch (const Error&) {
        raise(ErrorCode::DegenerateSample,
              "conjugate posterior scale is not positive definite (window ending " + window.dates().back() + ")");
    }
}

EmpiricalBayesFit empirical_bayes_hyperparams(const ReturnsWindow& presample, double d0) {
    const Index n = presample.n();
    const Index k = presample.k();
    if (!(d0 > static_cast<double>(k) + 1.0)) {
        raise(ErrorCode::InvalidDf, "empirical Bayes needs d0 > k + 1, got d0=" + std::to_string(d0));
    }
    if (n <= k) {
        raise(ErrorCode::InsufficientSample, "empirical Bayes presample needs n > k");
    }
    SampleMoments m = sample_moments(presample);
    const double nd = static_cast<double>(n);
    const double factor = (d0 - static_cast<double>(k) - 1.0) * (nd - 1.0) / nd;
    return {std::move(m.mean), SpdMatrix(m.cov.matrix() * factor)};
}

}  // namespace mpp
