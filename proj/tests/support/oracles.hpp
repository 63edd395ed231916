#pragma once

// Straightforward test-only recomputations. Nothing here calls the library's
// numerical kernels; only plain containers and loops are shared.

#include "cobo/acquisition.hpp"
#include "cobo/gp_core.hpp"

#include <functional>
#include <span>
#include <vector>

namespace cobo::oracle {

/// Gauss-Jordan elimination with partial pivoting.
Matrix inverse(const Matrix& a);

/// Plain Cholesky, no jitter; throws when a pivot is not positive.
Matrix cholesky(const Matrix& a);

double rbf(const KernelSpec& k, const Point& a, const Point& b);

struct Posterior {
  double mean = 0.0;
  double cov = 0.0;
};

/// k(a)ᵀ (K + s I)⁻¹ y and k(a,b) - k(a)ᵀ (K + s I)⁻¹ k(b) with an explicit inverse.
Posterior posterior(std::span<const Observation> data, const KernelSpec& k, double noise_var, const Point& a,
                    const Point& b);

/// Monte Carlo Co-KG value of one joint decision, written out loop by loop.
double cokg_value(const DiscretizedGP& central, std::span<const DiscretizedGP> locals,
                  const std::vector<std::size_t>& x, double beta, const Matrix& xi, double noise_var);

struct Enumerated {
  std::vector<std::size_t> best;
  double value = 0.0;
};

/// Maximum of cokg_value over every joint decision; the first maximum in
/// lexicographic order wins.
Enumerated enumerate_cokg(const DiscretizedGP& central, std::span<const DiscretizedGP> locals, double beta,
                          const Matrix& xi, double noise_var);

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal density (weights sum to 1),
/// nodes from the eigenvalues of the Jacobi matrix.
Quadrature gauss_hermite(int n);

/// E[max_z (mu(z) + s(z) xi)] - max_z mu(z) for xi ~ N(0,1) by quadrature.
double kg_quadrature(const DiscretizedGP& model, std::size_t x, double noise_var, int nodes);

/// log N(y; 0, K + s I) through the explicit inverse and a Cholesky log-determinant.
double log_likelihood(std::span<const Observation> data, const KernelSpec& k, double noise_var);

/// The noise_var among step, 2 step, ... 1 with the largest log-likelihood.
double best_grid_noise(std::span<const Observation> data, const KernelSpec& k, double step);

/// Maximum of f over an n x n lattice of [0,1]^2.
double dense_scan_max(const std::function<double(double, double)>& f, int n);

}  // namespace cobo::oracle
