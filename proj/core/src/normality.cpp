#include "mpp/normality.hpp"

#include <cmath>
#include <string>

#include "mpp/errors.hpp"

namespace mpp {

namespace {
constexpr Index kMinNormalitySamples = 20;
}

NormalityResult normality_check(const Vector& samples) {
    const Index b = samples.size();
    if (b < kMinNormalitySamples) {
        raise(ErrorCode::TooFewSamples, "normality check needs at least 20 samples, got " + std::to_string(b));
    }
    if (!samples.allFinite()) raise(ErrorCode::InvalidArgument, "normality check: non-finite sample");

    // Shift by the first value so a constant input centers to exact zeros.
    const Eigen::ArrayXd shifted = samples.array() - samples(0);
    const Eigen::ArrayXd centered = shifted - shifted.mean();
    const double bd = static_cast<double>(b);
    const double m2 = centered.square().sum() / bd;
    if (!(m2 > 0.0)) raise(ErrorCode::DegenerateVariance, "normality check: zero sample variance");
    const double m3 = centered.cube().sum() / bd;
    const double m4 = centered.square().square().sum() / bd;

    NormalityResult r{};
    r.skewness = m3 / std::pow(m2, 1.5);
    r.kurtosis = m4 / (m2 * m2);
    const double excess = r.kurtosis - 3.0;
    r.statistic = bd * (r.skewness * r.skewness / 6.0 + excess * excess / 24.0);
    // Survival function of chi-square with 2 degrees of freedom.
    r.p_value = std::exp(-0.5 * r.statistic);
    return r;
}

}  // namespace mpp
