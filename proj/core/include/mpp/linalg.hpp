#pragma once

#include <Eigen/Dense>

namespace mpp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Symmetric positive-definite matrix. Construction validates symmetry
/// (relative tolerance 1e-12) and strict positivity of the spectrum;
/// the stored value is the exactly symmetrized input.
class SpdMatrix {
public:
    explicit SpdMatrix(const Matrix& m);

    static SpdMatrix identity(Index k);
    static SpdMatrix diagonal(const Vector& d);

    Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(Index i, Index j) const { return m_(i, j); }

    /// Solve m x = b via the cached Cholesky factor.
    template <class Rhs>
    auto solve(const Eigen::MatrixBase<Rhs>& b) const {
        return llt_.solve(b).eval();
    }
    /// Lower Cholesky factor L with L L' = m.
    Matrix cholesky_lower() const { return llt_.matrixL(); }

private:
    Matrix m_;
    Eigen::LLT<Matrix> llt_;
};

struct PsdSqrtResult {
    Matrix root;
    int clamped_count = 0;
};

/// Relative clamp threshold for psd_sqrt.
inline constexpr double kPsdClampTolerance = 1e-10;

SpdMatrix spd_inverse(const SpdMatrix& m);

/// Symmetric inverse square root m^{-1/2}.
SpdMatrix spd_inv_sqrt(const SpdMatrix& m);

/// Symmetric square root m^{1/2}.
SpdMatrix spd_sqrt(const SpdMatrix& m);

/// Symmetric PSD square root of a symmetric matrix. Eigenvalues in
/// [-tau * lambda_max, 0) are clamped to zero and counted; anything more
/// negative raises IndefiniteMatrix.
PsdSqrtResult psd_sqrt(const Matrix& m);

/// Same as psd_sqrt but writes into a caller-provided buffer; used on the
/// per-draw hot path.
int psd_sqrt_into(const Matrix& m, Matrix& root);

/// Relative Frobenius distance ||a - b||_F / ||b||_F.
double relative_frobenius(const Matrix& a, const Matrix& b);

/// (m + m') / 2
Matrix symmetrize(const Matrix& m);

}  // namespace mpp
