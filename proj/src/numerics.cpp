#include "dnsvec/numerics.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "dnsvec/error.hpp"

namespace dnsvec {

namespace {

// Pivots below this fraction of the largest Gram diagonal are treated as a
// loss of positive definiteness; such matrices take the SVD route.
constexpr double kPivotTolerance = 1e-12;

// In-place lower Cholesky factor of a symmetric matrix; false if not SPD.
bool cholesky(Matrix& g) {
  const Eigen::Index k = g.rows();
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) max_diag = std::max(max_diag, g(i, i));
  if (max_diag <= 0.0) return false;

  for (Eigen::Index j = 0; j < k; ++j) {
    double pivot = g(j, j);
    for (Eigen::Index p = 0; p < j; ++p) pivot -= g(j, p) * g(j, p);
    if (!(pivot > kPivotTolerance * max_diag)) return false;
    const double root = std::sqrt(pivot);
    g(j, j) = root;
    for (Eigen::Index i = j + 1; i < k; ++i) {
      double sum = g(i, j);
      for (Eigen::Index p = 0; p < j; ++p) sum -= g(i, p) * g(j, p);
      g(i, j) = sum / root;
    }
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) g(i, j) = 0.0;
  }
  return true;
}

// Solves L L^T X = B in place, column by column of B.
void cholesky_solve(const Matrix& l, Matrix& b) {
  const Eigen::Index k = l.rows();
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    for (Eigen::Index i = 0; i < k; ++i) {
      double sum = b(i, c);
      for (Eigen::Index p = 0; p < i; ++p) sum -= l(i, p) * b(p, c);
      b(i, c) = sum / l(i, i);
    }
    for (Eigen::Index i = k - 1; i >= 0; --i) {
      double sum = b(i, c);
      for (Eigen::Index p = i + 1; p < k; ++p) sum -= l(p, i) * b(p, c);
      b(i, c) = sum / l(i, i);
    }
  }
}

Eigen::JacobiSVD<Eigen::MatrixXd> thin_svd(const Matrix& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(Eigen::MatrixXd(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
  }
}

std::optional<Matrix> pseudo_inverse_normal_equations(const Matrix& a) {
  require_finite(a, "matrix");
  if (a.cols() == 0) return Matrix(0, a.rows());
  if (a.cols() > a.rows()) return std::nullopt;
  Matrix gram = a.transpose() * a;
  if (!cholesky(gram)) return std::nullopt;
  Matrix out = a.transpose();
  cholesky_solve(gram, out);
  return out;
}

Matrix pseudo_inverse_svd(const Matrix& a) {
  require_finite(a, "matrix");
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  const auto svd = thin_svd(a);
  const auto& sigma = svd.singularValues();
  const double cutoff = kRankTolerance * (sigma.size() ? sigma(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix pseudo_inverse(const Matrix& a) {
  if (auto primary = pseudo_inverse_normal_equations(a)) return std::move(*primary);
  return pseudo_inverse_svd(a);
}

int rank_of(const Matrix& a) {
  require_finite(a, "matrix");
  if (a.size() == 0) return 0;
  const Eigen::VectorXd sigma = thin_svd(a).singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double cutoff = kRankTolerance * sigma(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) rank += sigma(i) > cutoff ? 1 : 0;
  return rank;
}

LeastSquares solve_coefficients(const Matrix& a, const Matrix& a_pinv, const Vector& v) {
  if (v.size() != a.rows() || a_pinv.cols() != a.rows() || a_pinv.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "vector of dimension " + std::to_string(v.size()) + " does not match basis with " +
                    std::to_string(a.rows()) + " rows");
  }
  LeastSquares out;
  out.coefficients = a_pinv * v;
  out.residual_norm = (a * out.coefficients - v).norm();
  return out;
}

}  // namespace dnsvec
