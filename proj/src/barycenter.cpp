#include "cobo/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cobo {

namespace {

// Below this residual the square roots switch from eigendecompositions of
// S^{1/2} K_n S^{1/2} to singular values of S^{1/2} K_n^{1/2}. The eigen
// route is cheaper but its accuracy floors around 1e-7 on near-singular
// posteriors; the singular-value route does not.
constexpr double kPolishThreshold = 1e-6;
// Give up when the best residual has not improved for this many iterations.
constexpr int kStallLimit = 25;
// Full-space iteration below this size; the eigen-split is not worth it.
constexpr Eigen::Index kMinReducedSize = 64;

bool needs_lift(const Matrix& c, double jitter) {
  if (jitter <= 0.0) return false;
  Matrix shifted = c;
  shifted.diagonal().array() -= jitter;
  Eigen::LLT<Matrix> llt(shifted);
  return llt.info() != Eigen::Success;
}

struct FixedPointResult {
  Matrix s;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

FixedPointResult solve_fixed_point(const std::vector<Matrix>& inputs, const BarycenterConfig& cfg) {
  const auto n_models = static_cast<int>(inputs.size());
  const double n = static_cast<double>(n_models);
  const Eigen::Index dim = inputs.front().rows();

  Matrix s = Matrix::Zero(dim, dim);
  for (const auto& c : inputs) s += c;
  s = symmetrize(s / n);

  std::vector<Matrix> input_roots;  // filled on first polish step
  std::vector<Matrix> parts(inputs.size());
  bool polish = false;

  FixedPointResult best;
  std::vector<double> history;
  int since_best = 0;
  for (int k = 0; k <= cfg.max_iter; ++k) {
    const SymmetricRoots roots = symmetric_roots(s, cfg.jitter);

    if (polish && input_roots.empty()) {
      input_roots.resize(inputs.size());
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n_models; ++i) input_roots[i] = sqrtm_psd(inputs[i]);
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_models; ++i) {
      if (polish) {
        parts[i] = gram_sqrt(roots.root * input_roots[i]);
      } else {
        parts[i] = symmetric_roots(symmetrize(roots.root * inputs[i] * roots.root), 0.0).root;
      }
    }
    Matrix total = Matrix::Zero(dim, dim);
    for (const auto& p : parts) total += p;  // fixed agent order

    const double residual = (total - n * s).norm() / (n * s.norm());
    history.push_back(residual);
    if (residual < best.residual) {
      best.s = s;
      best.residual = residual;
      best.iterations = k;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (residual <= cfg.tol) {
      best.converged = true;
      break;
    }
    if (k == cfg.max_iter || since_best >= kStallLimit) break;
    if (!polish && (residual < kPolishThreshold ||
                    (history.size() > 1 && residual > 0.9 * history[history.size() - 2]))) {
      polish = true;
    }

    const Matrix avg = total / n;
    s = symmetrize(roots.inverse_root * avg * avg * roots.inverse_root);
  }
  best.history = std::move(history);
  return best;
}

}  // namespace

void BarycenterConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("barycenter tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("barycenter max_iter must be >= 1");
  if (!(jitter > 0.0)) throw std::invalid_argument("barycenter jitter must be positive");
  if (!(subspace_tol >= 0.0)) throw std::invalid_argument("barycenter subspace_tol must be >= 0");
}

Matrix sqrtm_psd(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("sqrtm_psd: matrix is not square");
  const double asym = max_asymmetry(a);
  if (asym > 1e-8)
    throw std::invalid_argument("sqrtm_psd: matrix asymmetric by " + std::to_string(asym));
  return symmetric_roots(symmetrize(a), 0.0).root;
}

Vector mean_barycenter(std::span<const Vector> means) {
  if (means.empty()) throw std::invalid_argument("mean_barycenter: no models");
  const Eigen::Index d = means.front().size();
  Vector out = Vector::Zero(d);
  for (const auto& m : means) {
    if (m.size() != d) throw DimensionError("mean_barycenter: length mismatch");
    out += m;
  }
  return out / static_cast<double>(means.size());
}

CovarianceBarycenter covariance_barycenter(std::span<const Matrix> covs, const BarycenterConfig& cfg) {
  cfg.validate();
  if (covs.empty()) throw std::invalid_argument("covariance_barycenter: no models");
  const Eigen::Index dim = covs.front().rows();
  for (const auto& c : covs) {
    if (c.rows() != dim || c.cols() != dim)
      throw DimensionError("covariance_barycenter: matrix size mismatch");
  }
  const double n = static_cast<double>(covs.size());

  // Active subspace of the average input. Every input is dominated by
  // N times the average, so outside this subspace all of them are below
  // N * subspace_tol * lambda_max and only the jitter remains.
  Matrix basis;
  if (cfg.subspace_tol > 0.0 && dim >= kMinReducedSize) {
    Matrix avg = Matrix::Zero(dim, dim);
    for (const auto& c : covs) avg += c;
    const SymmetricEigen es = symmetric_eigen(symmetrize(avg / n));
    const Vector& lambda = es.values;
    const double cut = cfg.subspace_tol * std::max(lambda(dim - 1), 0.0);
    Eigen::Index active = 0;
    for (Eigen::Index i = 0; i < dim; ++i) active += lambda(i) > cut ? 1 : 0;
    if (active < (4 * dim) / 5) basis = es.vectors.rightCols(std::max<Eigen::Index>(active, 1));
  }

  std::vector<Matrix> inputs;
  inputs.reserve(covs.size());
  if (basis.size() > 0) {
    for (const auto& c : covs) {
      Matrix projected = symmetrize(basis.transpose() * c * basis);
      projected.diagonal().array() += cfg.jitter;
      inputs.push_back(std::move(projected));
    }
  } else {
    for (const auto& c : covs) {
      Matrix lifted = symmetrize(c);
      if (needs_lift(lifted, cfg.jitter)) lifted.diagonal().array() += cfg.jitter;
      inputs.push_back(std::move(lifted));
    }
  }

  FixedPointResult fp = solve_fixed_point(inputs, cfg);

  CovarianceBarycenter out;
  out.residual = fp.residual;
  out.iterations = fp.iterations;
  out.converged = fp.converged;
  out.residual_history = std::move(fp.history);
  if (basis.size() > 0) {
    out.subspace_dim = static_cast<int>(basis.cols());
    Matrix shifted = fp.s;
    shifted.diagonal().array() -= cfg.jitter;
    out.cov = symmetrize(basis * shifted * basis.transpose());
    out.cov.diagonal().array() += cfg.jitter;
  } else {
    out.subspace_dim = static_cast<int>(dim);
    out.cov = std::move(fp.s);
  }
  return out;
}

double fixed_point_residual(std::span<const Matrix> covs, const Matrix& k) {
  const double n = static_cast<double>(covs.size());
  const Matrix s = symmetrize(k);
  const Matrix root = sqrtm_psd(s);
  Matrix total = Matrix::Zero(s.rows(), s.cols());
  for (const auto& c : covs) total += gram_sqrt(root * sqrtm_psd(symmetrize(c)));
  return (total - n * s).norm() / (n * s.norm());
}

double w2_gaussian(const Vector& m1, const Matrix& c1, const Vector& m2, const Matrix& c2) {
  if (m1.size() != m2.size() || c1.rows() != c2.rows() || c1.rows() != m1.size())
    throw DimensionError("w2_gaussian: dimension mismatch");
  const Matrix r1 = sqrtm_psd(c1);
  const Matrix r2 = sqrtm_psd(c2);
  // tr((C1^{1/2} C2 C1^{1/2})^{1/2}) is the nuclear norm of C2^{1/2} C1^{1/2}.
  const double cross = singular_values(r2 * r1).sum();
  const double sq = (m1 - m2).squaredNorm() + c1.trace() + c2.trace() - 2.0 * cross;
  return std::sqrt(std::max(sq, 0.0));
}

double w2_objective(const Vector& mean, const Matrix& cov, std::span<const DiscretizedGP> models) {
  double total = 0.0;
  for (const auto& m : models) {
    const double w = w2_gaussian(mean, cov, m.mean, m.cov);
    total += w * w;
  }
  return total;
}

CentralGP barycenter(std::span<const DiscretizedGP> models, const BarycenterConfig& cfg) {
  if (models.empty()) throw std::invalid_argument("barycenter: no models");
  const std::size_t d = models.front().size();
  for (const auto& m : models) {
    if (m.size() != d || static_cast<std::size_t>(m.cov.rows()) != d)
      throw DimensionError("barycenter: models live on different grids");
  }
  CentralGP out;
  if (models.size() == 1) {
    out.model = models.front();
    return out;
  }
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  means.reserve(models.size());
  covs.reserve(models.size());
  for (const auto& m : models) {
    means.push_back(m.mean);
    covs.push_back(m.cov);
  }
  out.model.mean = mean_barycenter(means);
  CovarianceBarycenter cb = covariance_barycenter(covs, cfg);
  out.model.cov = std::move(cb.cov);
  out.residual = cb.residual;
  out.iterations_used = cb.iterations;
  out.converged = cb.converged;
  return out;
}

}  // namespace cobo
