// The parallel kernels against their serial reference versions.

#include "cobo/reference.hpp"

#include "doctest.h"
#include "generators.hpp"

#include <cmath>

using namespace cobo;
using cobo::testing::Gen;

TEST_CASE("kernel matrix") {
  Gen gen(201);
  const KernelSpec k = gen.kernel();
  const Matrix a = gen.normal_matrix(30, 2);
  const Matrix b = gen.normal_matrix(17, 2);
  CHECK((kernel_matrix(k, a, b) - reference::kernel_matrix(k, a, b)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("discretize") {
  Gen gen(202);
  const Grid grid = Grid::uniform(2, 9);
  for (int trial = 0; trial < 5; ++trial) {
    const LocalAgent agent = gen.grid_agent(grid, gen.integer(1, 20), gen.kernel(), 0.02);
    const DiscretizedGP fast = discretize(agent, grid);
    const DiscretizedGP slow = reference::discretize(agent, grid);
    CHECK((fast.mean - slow.mean).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((fast.cov - slow.cov).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("covariance barycenter") {
  Gen gen(203);
  const Grid grid = Grid::uniform(2, 9);
  std::vector<Matrix> covs;
  for (int n = 0; n < 4; ++n) covs.push_back(discretize(gen.grid_agent(grid, 6, KernelSpec{}, 0.02), grid).cov);
  const CovarianceBarycenter fast = covariance_barycenter(covs);
  const CovarianceBarycenter slow = reference::covariance_barycenter(covs);
  CHECK(fast.converged);
  CHECK(slow.converged);
  CHECK((fast.cov - slow.cov).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("Co-KG estimate and exhaustive maximization") {
  Gen gen(204);
  for (int trial = 0; trial < 3; ++trial) {
    const DiscretizedGP c = gen.model(12, 5);
    const std::vector<DiscretizedGP> locals{gen.model(12, 4), gen.model(12, 4)};
    const FantasyDraws draws = FantasyDraws::generate(8, 2, static_cast<std::uint64_t>(trial));
    const JointDecision x{{gen.index(12), gen.index(12)}};
    CHECK(std::abs(cokg_estimate(c, locals, x, 0.8, draws, 0.02) -
                   reference::cokg_estimate(c, locals, x, 0.8, draws, 0.02)) <= 1e-12);
    const AcqResult fast = optimize_cokg(c, locals, 0.8, AcqConfig{}, draws, 0.02, 0);
    const AcqResult slow = reference::optimize_exhaustive(c, locals, 0.8, draws, 0.02);
    CHECK(fast.best == slow.best);
    CHECK(std::abs(fast.value - slow.value) <= 1e-12);
  }
}
