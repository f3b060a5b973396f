#include "mpp/random.hpp"

#include <cmath>
#include <string>

#include "mpp/errors.hpp"

namespace mpp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void check_df(double df, const char* what) {
    if (!(df > 0.0) || !std::isfinite(df)) {
        raise(ErrorCode::InvalidDf,
              std::string(what) + ": degrees of freedom must be positive, got " + std::to_string(df));
    }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
}

RngStream RngStream::substream(std::uint64_t index) const {
    return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

double RngStream::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double sample_gamma(double shape, double scale, RngStream& rng) {
    check_df(shape, "sample_gamma");
    if (shape < 1.0) {
        const double g = sample_gamma(shape + 1.0, 1.0, rng);
        return scale * g * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

double sample_chi2(double df, RngStream& rng) {
    check_df(df, "sample_chi2");
    return sample_gamma(0.5 * df, 2.0, rng);
}

double sample_f(double d1, double d2, RngStream& rng) {
    check_df(d1, "sample_f");
    check_df(d2, "sample_f");
    const double a = sample_chi2(d1, rng) / d1;
    const double b = sample_chi2(d2, rng) / d2;
    return a / b;
}

double sample_student_t(double df, RngStream& rng) {
    check_df(df, "sample_student_t");
    const double z = rng.normal();
    return z / std::sqrt(sample_chi2(df, rng) / df);
}

void fill_standard_normal(Vector& out, RngStream& rng) {
    for (Index i = 0; i < out.size(); ++i) out(i) = rng.normal();
}

Vector sample_standard_normal(Index k, RngStream& rng) {
    Vector z(k);
    fill_standard_normal(z, rng);
    return z;
}

void fill_unit_sphere(Vector& out, RngStream& rng) {
    double norm2 = 0.0;
    do {
        fill_standard_normal(out, rng);
        norm2 = out.squaredNorm();
    } while (norm2 == 0.0);
    out /= std::sqrt(norm2);
}

Vector sample_unit_sphere(Index k, RngStream& rng) {
    if (k < 1) raise(ErrorCode::InvalidArgument, "sample_unit_sphere: k must be >= 1");
    Vector u(k);
    fill_unit_sphere(u, rng);
    return u;
}

MvtSampler::MvtSampler(double df, Vector location, const SpdMatrix& dispersion)
    : df_(df), location_(std::move(location)), factor_(dispersion.cholesky_lower()) {
    check_df(df, "sample_mvt");
    if (location_.size() != dispersion.dim()) {
        raise(ErrorCode::InvalidArgument, "sample_mvt: location/dispersion dimension mismatch");
    }
}

void MvtSampler::draw(Vector& out, RngStream& rng) const {
    const Vector z = sample_standard_normal(location_.size(), rng);
    const double w = std::sqrt(df_ / sample_chi2(df_, rng));
    out = location_ + w * (factor_ * z);
}

Vector MvtSampler::draw(RngStream& rng) const {
    Vector out;
    draw(out, rng);
    return out;
}

Vector sample_mvt(double df, const Vector& location, const SpdMatrix& dispersion, RngStream& rng) {
    return MvtSampler(df, location, dispersion).draw(rng);
}

}  // namespace mpp
