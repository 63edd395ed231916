#include "cobo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cobo {

namespace {

bool try_cholesky(const Matrix& a, double jitter, Matrix& lower) {
  Eigen::LLT<Matrix> llt;
  if (jitter > 0.0) {
    Matrix shifted = a;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
  } else {
    llt.compute(a);
  }
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  // LLT only reports failure on non-positive pivots; a NaN pivot slips through.
  return lower.diagonal().allFinite() && (lower.diagonal().array() > 0.0).all();
}

double condition_estimate(const Matrix& a) {
  if (a.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  const Vector& w = es.eigenvalues();
  const double hi = w.maxCoeff();
  const double lo = w.minCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

CholeskyFactor robust_cholesky(const Matrix& a, const JitterPolicy& policy) {
  CholeskyFactor out;
  if (try_cholesky(a, 0.0, out.lower)) return out;
  for (double delta = policy.initial; delta <= policy.maximum * (1.0 + 1e-12);
       delta *= policy.growth) {
    if (try_cholesky(a, delta, out.lower)) {
      out.jitter = delta;
      return out;
    }
  }
  const double cond = condition_estimate(a);
  std::ostringstream msg;
  msg << "Cholesky factorization failed for a " << a.rows() << "x" << a.cols()
      << " matrix after jitter up to " << policy.maximum
      << " (condition estimate " << cond << ")";
  throw FactorizationError(msg.str(), cond);
}

double max_asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eigen: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw std::runtime_error("symmetric_eigen: no convergence");
  return {es.eigenvalues(), es.eigenvectors()};
}

Vector singular_values(const Matrix& b) {
  Eigen::BDCSVD<Matrix> svd(b);
  return svd.singularValues();
}

SymmetricRoots symmetric_roots(const Matrix& a, double inverse_floor) {
  const SymmetricEigen es = symmetric_eigen(a);
  const Vector& lambda = es.values;
  Vector root(lambda.size());
  Vector inverse_root(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    root(i) = std::sqrt(std::max(lambda(i), 0.0));
    inverse_root(i) = 1.0 / std::sqrt(std::max(lambda(i), inverse_floor));
  }
  const Matrix& q = es.vectors;
  SymmetricRoots out;
  out.root = symmetrize(q * root.asDiagonal() * q.transpose());
  out.inverse_root = symmetrize(q * inverse_root.asDiagonal() * q.transpose());
  return out;
}

Matrix gram_sqrt(const Matrix& b) {
  Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU);
  const Matrix& u = svd.matrixU();
  return symmetrize(u * svd.singularValues().asDiagonal() * u.transpose());
}

}  // namespace cobo
