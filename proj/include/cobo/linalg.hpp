#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cobo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when a kernel or covariance matrix cannot be factorized even
/// after the largest allowed diagonal jitter.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Jitter schedule used before every Cholesky factorization: the matrix is
/// first tried as given, then with +delta*I for delta = 1e-8, 1e-7, ... 1e-4.
struct JitterPolicy {
  double initial = 1e-8;
  double growth = 10.0;
  double maximum = 1e-4;
};

/// Lower Cholesky factor together with the jitter that made it succeed
/// (0 when no jitter was needed).
struct CholeskyFactor {
  Matrix lower;
  double jitter = 0.0;
};

CholeskyFactor robust_cholesky(const Matrix& a, const JitterPolicy& policy = {});

double max_asymmetry(const Matrix& a);
Matrix symmetrize(const Matrix& a);
double min_eigenvalue(const Matrix& a);

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (columns). Only the lower triangle of `a` is read.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Singular values in descending order.
Vector singular_values(const Matrix& b);

/// Square root and inverse square root of a symmetric matrix from one
/// eigendecomposition. Negative eigenvalues are clamped to zero for the root
/// and to `inverse_floor` for the inverse root.
struct SymmetricRoots {
  Matrix root;
  Matrix inverse_root;
};
SymmetricRoots symmetric_roots(const Matrix& a, double inverse_floor);

/// (B Bᵀ)^{1/2} computed from the singular values of B. Unlike taking the
/// eigen square root of the product, singular values near zero keep full
/// absolute accuracy.
Matrix gram_sqrt(const Matrix& b);

}  // namespace cobo
