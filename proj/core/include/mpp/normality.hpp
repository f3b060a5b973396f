#pragma once

#include "mpp/linalg.hpp"

namespace mpp {

struct NormalityResult {
    double statistic;
    double p_value;
    double skewness;
    double kurtosis;  ///< non-excess; 3 under normality
};

/// Jarque–Bera test: B (skew^2 / 6 + (kurt - 3)^2 / 24), referred to chi-square(2).
/// Throws TooFewSamples for fewer than 20 values and DegenerateVariance on
/// constant input.
NormalityResult normality_check(const Vector& samples);

}  // namespace mpp
