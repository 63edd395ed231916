#pragma once

// 2-Wasserstein barycenter of Gaussian models on a shared grid.
//
// The barycenter mean is the average of the input means. The covariance K
// solves  sum_n (K^{1/2} K_n K^{1/2})^{1/2} = N K,  found with the Bures
// fixed-point map
//
//   S <- S^{-1/2} ( (1/N) sum_n (S^{1/2} K_n S^{1/2})^{1/2} )^2 S^{-1/2}
//
// started from the arithmetic mean of the inputs.

#include "cobo/gp_core.hpp"
#include "cobo/linalg.hpp"

#include <span>
#include <vector>

namespace cobo {

struct BarycenterConfig {
  double tol = 1e-7;       // relative Frobenius residual of the fixed-point equation
  int max_iter = 200;
  double jitter = 1e-8;    // added to every input covariance before iterating
  // Inputs are solved in the eigenspace of their average restricted to
  // eigenvalues above subspace_tol * largest; the complement carries only
  // jitter. Set to 0 to always iterate in the full space.
  double subspace_tol = 1e-13;

  void validate() const;
  bool operator==(const BarycenterConfig&) const = default;
};

struct CovarianceBarycenter {
  Matrix cov;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  int subspace_dim = 0;
  std::vector<double> residual_history;  // residual of each iterate, starting at S_0
};

/// Fused server-side model.
struct CentralGP {
  DiscretizedGP model;
  double residual = 0.0;
  int iterations_used = 0;
  bool converged = true;
};

/// Symmetric PSD square root; eigenvalues below zero are clamped first.
/// Throws std::invalid_argument when the input is asymmetric beyond 1e-8.
Matrix sqrtm_psd(const Matrix& a);

Vector mean_barycenter(std::span<const Vector> means);

/// Never throws on non-convergence: the best iterate is returned with
/// `converged == false` and the caller decides whether to accept it.
CovarianceBarycenter covariance_barycenter(std::span<const Matrix> covs,
                                           const BarycenterConfig& cfg = {});

/// Relative residual ||sum_n (K^{1/2} C_n K^{1/2})^{1/2} - N K||_F / (N ||K||_F)
/// evaluated in the full space with the singular-value square-root route.
/// Inputs are used as given; callers add any jitter themselves.
double fixed_point_residual(std::span<const Matrix> covs, const Matrix& k);

double w2_gaussian(const Vector& m1, const Matrix& c1, const Vector& m2, const Matrix& c2);

/// Sum of squared W2 distances from (mean, cov) to every model.
double w2_objective(const Vector& mean, const Matrix& cov, std::span<const DiscretizedGP> models);

CentralGP barycenter(std::span<const DiscretizedGP> models, const BarycenterConfig& cfg = {});

}  // namespace cobo
