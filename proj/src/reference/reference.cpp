#include "cobo/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace cobo::reference {

Matrix kernel_matrix(const KernelSpec& k, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("kernel_matrix: dimension mismatch");
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double sq = 0.0;
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double diff = a(i, c) - b(j, c);
        sq += diff * diff;
      }
      out(i, j) = k.amplitude * std::exp(-sq / k.lengthscale_sq);
    }
  }
  return out;
}

DiscretizedGP discretize(const LocalAgent& agent, const Grid& grid) {
  const Matrix& pts = grid.coordinates();
  DiscretizedGP out;
  out.cov = reference::kernel_matrix(agent.kernel(), pts, pts);
  out.mean = Vector::Zero(pts.rows());
  if (agent.size() == 0) return out;
  const Matrix cross = reference::kernel_matrix(agent.kernel(), agent.inputs(), pts);
  const Matrix v = agent.factor().lower.triangularView<Eigen::Lower>().solve(cross);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    out.mean(i) = cross.col(i).dot(agent.weights());
    for (Eigen::Index j = 0; j < pts.rows(); ++j) out.cov(i, j) -= v.col(i).dot(v.col(j));
  }
  return out;
}

CovarianceBarycenter covariance_barycenter(std::span<const Matrix> covs, const BarycenterConfig& cfg) {
  cfg.validate();
  if (covs.empty()) throw std::invalid_argument("covariance_barycenter: no models");
  const double n = static_cast<double>(covs.size());
  const Eigen::Index dim = covs.front().rows();
  std::vector<Matrix> roots;
  Matrix s = Matrix::Zero(dim, dim);
  for (const auto& c : covs) {
    Matrix lifted = symmetrize(c);
    lifted.diagonal().array() += cfg.jitter;
    roots.push_back(sqrtm_psd(lifted));
    s += lifted;
  }
  s /= n;

  CovarianceBarycenter out;
  out.subspace_dim = static_cast<int>(dim);
  for (int k = 0; k <= cfg.max_iter; ++k) {
    const SymmetricRoots r = symmetric_roots(s, cfg.jitter);
    Matrix total = Matrix::Zero(dim, dim);
    for (const auto& root : roots) total += gram_sqrt(r.root * root);
    const double residual = (total - n * s).norm() / (n * s.norm());
    out.residual_history.push_back(residual);
    out.cov = s;
    out.residual = residual;
    out.iterations = k;
    if (residual <= cfg.tol) {
      out.converged = true;
      break;
    }
    const Matrix avg = total / n;
    s = symmetrize(r.inverse_root * avg * avg * r.inverse_root);
  }
  return out;
}

double cokg_estimate(const DiscretizedGP& central, std::span<const DiscretizedGP> locals, const JointDecision& x,
                     double beta, const FantasyDraws& draws, double noise_var) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto d = static_cast<Eigen::Index>(central.size());
  Matrix sigma(n, n);
  Matrix cross(n, d);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto xa = static_cast<Eigen::Index>(x.indices[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < n; ++b)
      sigma(a, b) = central.cov(xa, static_cast<Eigen::Index>(x.indices[static_cast<std::size_t>(b)]));
    sigma(a, a) += noise_var;
    cross.row(a) = central.cov.row(xa);
  }
  const CholeskyFactor f = robust_cholesky(sigma);
  const Matrix w = f.lower.triangularView<Eigen::Lower>().solve(cross);

  double total = 0.0;
  for (Eigen::Index m = 0; m < draws.xi.rows(); ++m) {
    double best = -INFINITY;
    for (Eigen::Index z = 0; z < d; ++z) {
      double v = central.mean(z);
      for (Eigen::Index a = 0; a < n; ++a) v += draws.xi(m, a) * w(a, z);
      best = std::max(best, v);
    }
    double local = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      const DiscretizedGP& model = locals[static_cast<std::size_t>(a)];
      const auto xa = static_cast<Eigen::Index>(x.indices[static_cast<std::size_t>(a)]);
      const double denom = std::sqrt(std::max(model.cov(xa, xa), 0.0) + noise_var);
      double lbest = -INFINITY;
      for (Eigen::Index z = 0; z < d; ++z) {
        const double s = denom > 0.0 ? model.cov(xa, z) / denom : 0.0;
        lbest = std::max(lbest, model.mean(z) + s * draws.xi(m, a));
      }
      local += lbest;
    }
    total += best + beta * local;
  }
  return total / static_cast<double>(draws.xi.rows());
}

AcqResult optimize_exhaustive(const DiscretizedGP& central, std::span<const DiscretizedGP> locals, double beta,
                              const FantasyDraws& draws, double noise_var) {
  const std::size_t n = locals.size();
  const std::size_t d = central.size();
  JointDecision x;
  x.indices.assign(n, 0);
  AcqResult out;
  out.exhaustive = true;
  bool first = true;
  while (true) {
    const double v = reference::cokg_estimate(central, locals, x, beta, draws, noise_var);
    ++out.evaluations;
    if (first || v > out.value) {
      out.value = v;
      out.best = x;
      first = false;
    }
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++x.indices[k] < d) break;
      x.indices[k] = 0;
      if (k == 0) return out;
    }
    if (n == 0) return out;
  }
}

}  // namespace cobo::reference
