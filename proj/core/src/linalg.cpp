#include "mpp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpp/errors.hpp"

namespace mpp {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

bool is_symmetric(const Matrix& m, double tol) {
    const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace

Matrix symmetrize(const Matrix& m) {
    return 0.5 * (m + m.transpose());
}

SpdMatrix::SpdMatrix(const Matrix& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        raise(ErrorCode::NotSpd, "matrix must be square and non-empty, got " +
                                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) {
        raise(ErrorCode::NotSpd, "matrix has non-finite entries");
    }
    if (!is_symmetric(m, kSymmetryTolerance)) {
        raise(ErrorCode::NotSpd, "matrix is not symmetric");
    }
    m_ = symmetrize(m);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(m_, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        raise(ErrorCode::NotSpd, "eigendecomposition failed");
    }
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    // Numerical rank test: a spectrum below k * eps * lambda_max is
    // indistinguishable from a singular matrix.
    const double floor = static_cast<double>(m_.rows()) *
                         std::numeric_limits<double>::epsilon() * std::abs(lmax);
    if (!(lmax > 0.0) || !(lmin > floor)) {
        raise(ErrorCode::NotSpd, "matrix is not positive definite (min eigenvalue " +
                                     std::to_string(lmin) + ")");
    }
    llt_.compute(m_);
    if (llt_.info() != Eigen::Success) {
        raise(ErrorCode::NotSpd, "Cholesky factorization failed");
    }
}

SpdMatrix SpdMatrix::identity(Index k) {
    return SpdMatrix(Matrix::Identity(k, k));
}

SpdMatrix SpdMatrix::diagonal(const Vector& d) {
    return SpdMatrix(Matrix(d.asDiagonal()));
}

SpdMatrix spd_inverse(const SpdMatrix& m) {
    const Index k = m.dim();
    return SpdMatrix(symmetrize(m.solve(Matrix::Identity(k, k))));
}

namespace {

Matrix spectral_power(const SpdMatrix& m, double power) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m.matrix());
    if (eig.info() != Eigen::Success) {
        raise(ErrorCode::NotSpd, "eigendecomposition failed");
    }
    const Vector scaled = eig.eigenvalues().array().pow(power).matrix();
    const Matrix& v = eig.eigenvectors();
    return symmetrize(v * scaled.asDiagonal() * v.transpose());
}

}  // namespace

SpdMatrix spd_inv_sqrt(const SpdMatrix& m) {
    return SpdMatrix(spectral_power(m, -0.5));
}

SpdMatrix spd_sqrt(const SpdMatrix& m) {
    return SpdMatrix(spectral_power(m, 0.5));
}

int psd_sqrt_into(const Matrix& m, Matrix& root) {
    if (m.rows() != m.cols()) {
        raise(ErrorCode::InvalidArgument, "psd_sqrt: matrix must be square");
    }
    const Index p = m.rows();
    if (p == 1) {
        const double x = m(0, 0);
        root.resize(1, 1);
        if (x >= 0.0) {
            root(0, 0) = std::sqrt(x);
            return 0;
        }
        // A lone negative eigenvalue is always below -tau * |lambda_max|.
        raise(ErrorCode::IndefiniteMatrix, "psd_sqrt: negative 1x1 input " + std::to_string(x));
    }

    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    if (eig.info() != Eigen::Success) {
        raise(ErrorCode::IndefiniteMatrix, "psd_sqrt: eigendecomposition failed");
    }
    Vector lambda = eig.eigenvalues();
    const double lmax = lambda.cwiseAbs().maxCoeff();
    const double floor = -kPsdClampTolerance * lmax;
    int clamped = 0;
    for (Index i = 0; i < p; ++i) {
        if (lambda(i) < 0.0) {
            if (lambda(i) < floor) {
                raise(ErrorCode::IndefiniteMatrix,
                      "psd_sqrt: eigenvalue " + std::to_string(lambda(i)) +
                          " below clamp threshold " + std::to_string(floor));
            }
            lambda(i) = 0.0;
            ++clamped;
        }
    }
    const Matrix& v = eig.eigenvectors();
    root.noalias() = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
    root = symmetrize(root);
    return clamped;
}

PsdSqrtResult psd_sqrt(const Matrix& m) {
    PsdSqrtResult out;
    out.clamped_count = psd_sqrt_into(m, out.root);
    return out;
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
    return (a - b).norm() / b.norm();
}

}  // namespace mpp
