#pragma once

#include <optional>

#include <Eigen/Core>

namespace dnsvec {

/// Dense row-major matrix of 64-bit reals.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Dense column vector; vectors in the ontology space are indexed by ElementId.
using Vector = Eigen::VectorXd;

/// Relative cut-off for singular values: sigma <= kRankTolerance * sigma_max counts as zero.
inline constexpr double kRankTolerance = 1e-10;

/// Moore-Penrose pseudo-inverse. Full column rank matrices go through the
/// normal equations (A^T A)^{-1} A^T with a Cholesky factorization; anything
/// else falls back to the SVD route. Throws NonFinite.
Matrix pseudo_inverse(const Matrix& a);

/// (A^T A)^{-1} A^T, or nullopt when the Gram matrix is not numerically
/// positive definite.
std::optional<Matrix> pseudo_inverse_normal_equations(const Matrix& a);

/// Pseudo-inverse from the thin SVD, truncating singular values at
/// kRankTolerance * sigma_max.
Matrix pseudo_inverse_svd(const Matrix& a);

/// Numerical rank with the same truncation rule. Throws NonFinite.
int rank_of(const Matrix& a);

struct LeastSquares {
  Vector coefficients;
  double residual_norm = 0.0;  // ||A x - v||_2
};

/// x = A^+ v together with the residual of the fit. Throws DimensionMismatch.
LeastSquares solve_coefficients(const Matrix& a, const Matrix& a_pinv, const Vector& v);

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what);

}  // namespace dnsvec
