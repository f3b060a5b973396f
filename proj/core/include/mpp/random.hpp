#pragma once

#include <cstdint>
#include <random>

#include "mpp/linalg.hpp"

namespace mpp {

/// Seeded random stream. Two streams built from the same (seed, stream_id)
/// produce the same draw sequence; different stream ids give independent
/// substreams. Uniform and normal variates are generated here rather than
/// through <random> distributions so sequences are identical on every
/// standard library.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Fresh stream with the same seed and an id derived from (stream_id, index).
    RngStream substream(std::uint64_t index) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    double normal();

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Gamma(shape, scale) via Marsaglia–Tsang; shape < 1 uses the u^{1/shape} boost.
double sample_gamma(double shape, double scale, RngStream& rng);

/// Chi-square with real-valued df, realized as Gamma(df/2, 2).
double sample_chi2(double df, RngStream& rng);

/// F(d1, d2) as (chi2_{d1}/d1) / (chi2_{d2}/d2).
double sample_f(double d1, double d2, RngStream& rng);

double sample_student_t(double df, RngStream& rng);

Vector sample_standard_normal(Index k, RngStream& rng);
void fill_standard_normal(Vector& out, RngStream& rng);

/// Uniform on the unit sphere in R^k: z / |z| with z standard normal.
Vector sample_unit_sphere(Index k, RngStream& rng);
void fill_unit_sphere(Vector& out, RngStream& rng);

/// Multivariate t: location + L z sqrt(df / chi2_df), L L' = dispersion.
Vector sample_mvt(double df, const Vector& location, const SpdMatrix& dispersion, RngStream& rng);

/// Multivariate t sampler with the dispersion factor computed once.
class MvtSampler {
public:
    MvtSampler(double df, Vector location, const SpdMatrix& dispersion);

    Index dim() const noexcept { return location_.size(); }
    void draw(Vector& out, RngStream& rng) const;
    Vector draw(RngStream& rng) const;

private:
    double df_;
    Vector location_;
    Matrix factor_;
};

}  // namespace mpp
