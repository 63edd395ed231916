#pragma once

// Serial, straightforward versions of the parallel kernels. They favour
// clarity over speed and serve as cross-checks in tests and benchmarks.

#include "cobo/acquisition.hpp"
#include "cobo/barycenter.hpp"
#include "cobo/gp_core.hpp"

#include <span>

namespace cobo::reference {

Matrix kernel_matrix(const KernelSpec& k, const Matrix& a, const Matrix& b);

DiscretizedGP discretize(const LocalAgent& agent, const Grid& grid);

/// Full-space fixed point with singular-value square roots at every step.
CovarianceBarycenter covariance_barycenter(std::span<const Matrix> covs, const BarycenterConfig& cfg = {});

double cokg_estimate(const DiscretizedGP& central, std::span<const DiscretizedGP> locals, const JointDecision& x,
                     double beta, const FantasyDraws& draws, double noise_var);

/// Enumerates every joint decision with cokg_estimate above.
AcqResult optimize_exhaustive(const DiscretizedGP& central, std::span<const DiscretizedGP> locals, double beta,
                              const FantasyDraws& draws, double noise_var);

}  // namespace cobo::reference
