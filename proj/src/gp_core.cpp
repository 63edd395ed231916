#include "cobo/gp_core.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace cobo {

Point::Point(std::initializer_list<double> c) : coords(static_cast<Eigen::Index>(c.size())) {
  Eigen::Index i = 0;
  for (double v : c) coords(i++) = v;
}

bool Point::operator==(const Point& other) const {
  return coords.size() == other.coords.size() && coords == other.coords;
}

Grid::Grid(std::vector<std::size_t> per_axis) : per_axis_(std::move(per_axis)) {
  if (per_axis_.empty()) throw DimensionError("grid needs at least one axis");
  std::size_t total = 1;
  for (std::size_t r : per_axis_) {
    if (r == 0) throw DimensionError("grid resolution must be positive on every axis");
    total *= r;
  }
  const auto d = static_cast<Eigen::Index>(per_axis_.size());
  points_.resize(static_cast<Eigen::Index>(total), d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (Eigen::Index k = d - 1; k >= 0; --k) {
      const std::size_t r = per_axis_[static_cast<std::size_t>(k)];
      const std::size_t i = rest % r;
      rest /= r;
      points_(static_cast<Eigen::Index>(idx), k) =
          r == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(r - 1);
    }
  }
}

Grid Grid::uniform(std::size_t dim, std::size_t per_axis) {
  return Grid(std::vector<std::size_t>(dim, per_axis));
}

Point Grid::point(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("grid index out of range");
  return Point(points_.row(static_cast<Eigen::Index>(index)).transpose());
}

std::size_t Grid::index_of(std::span<const std::size_t> axis_indices) const {
  if (axis_indices.size() != per_axis_.size()) throw DimensionError("axis index count mismatch");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < per_axis_.size(); ++k) {
    if (axis_indices[k] >= per_axis_[k]) throw std::out_of_range("axis index out of range");
    idx = idx * per_axis_[k] + axis_indices[k];
  }
  return idx;
}

void KernelSpec::validate() const {
  if (!(lengthscale_sq > 0.0) || !std::isfinite(lengthscale_sq))
    throw std::invalid_argument("kernel lengthscale_sq must be positive");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude))
    throw std::invalid_argument("kernel amplitude must be positive");
}

double kernel_eval(const KernelSpec& k, const Point& a, const Point& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << "kernel_eval: dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw DimensionError(msg.str());
  }
  return k.amplitude * std::exp(-(a.coords - b.coords).squaredNorm() / k.lengthscale_sq);
}

Matrix kernel_matrix(const KernelSpec& k, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("kernel_matrix: dimension mismatch");
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.rows();
  Matrix out(n, m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = k.amplitude * std::exp(-(a.row(i) - b.row(j)).squaredNorm() / k.lengthscale_sq);
    }
  }
  return out;
}

LocalAgent::LocalAgent(int id, KernelSpec kernel, double noise_var)
    : id_(id), kernel_(kernel), noise_var_(noise_var) {
  kernel_.validate();
  if (!(noise_var_ >= 0.0)) throw std::invalid_argument("noise variance must be non-negative");
}

void LocalAgent::observe(Observation obs) {
  if (!data_.empty() && obs.x.dim() != data_.front().x.dim())
    throw DimensionError("observation dimension differs from the agent's data");
  data_.push_back(std::move(obs));
  refresh();
}

void LocalAgent::observe_all(std::span<const Observation> obs) {
  for (const auto& o : obs) {
    if (!data_.empty() && o.x.dim() != data_.front().x.dim())
      throw DimensionError("observation dimension differs from the agent's data");
    data_.push_back(o);
  }
  refresh();
}

void LocalAgent::refresh() {
  const auto n = static_cast<Eigen::Index>(data_.size());
  const auto d = static_cast<Eigen::Index>(data_.front().x.dim());
  inputs_.resize(n, d);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inputs_.row(i) = data_[static_cast<std::size_t>(i)].x.coords.transpose();
    y(i) = data_[static_cast<std::size_t>(i)].y;
  }
  Matrix gram = kernel_matrix(kernel_, inputs_, inputs_);
  gram.diagonal().array() += noise_var_;
  factor_ = robust_cholesky(gram);
  const Matrix& l = factor_.lower;
  weights_ = l.transpose().triangularView<Eigen::Upper>().solve(l.triangularView<Eigen::Lower>().solve(y));
}

PosteriorValue posterior_eval(const LocalAgent& agent, const Point& query_a, const Point& query_b) {
  const KernelSpec& k = agent.kernel();
  const double prior = kernel_eval(k, query_a, query_b);
  if (agent.size() == 0) return {0.0, prior};
  if (query_a.dim() != static_cast<std::size_t>(agent.inputs().cols()))
    throw DimensionError("posterior_eval: query dimension differs from the agent's data");

  Matrix queries(2, agent.inputs().cols());
  queries.row(0) = query_a.coords.transpose();
  queries.row(1) = query_b.coords.transpose();
  const Matrix cross = kernel_matrix(k, agent.inputs(), queries);  // n x 2
  const Matrix v = agent.factor().lower.triangularView<Eigen::Lower>().solve(cross);
  PosteriorValue out;
  out.mean = cross.col(0).dot(agent.weights());
  out.cov = prior - v.col(0).dot(v.col(1));
  return out;
}

DiscretizedGP discretize(const LocalAgent& agent, const Grid& grid) {
  if (agent.size() > 0 && grid.dim() != static_cast<std::size_t>(agent.inputs().cols()))
    throw DimensionError("discretize: grid dimension differs from the agent's data");
  DiscretizedGP out;
  out.cov = kernel_matrix(agent.kernel(), grid.coordinates(), grid.coordinates());
  if (agent.size() == 0) {
    out.mean = Vector::Zero(static_cast<Eigen::Index>(grid.size()));
    return out;
  }
  const Matrix cross = kernel_matrix(agent.kernel(), agent.inputs(), grid.coordinates());
  out.mean = cross.transpose() * agent.weights();
  const Matrix v = agent.factor().lower.triangularView<Eigen::Lower>().solve(cross);
  out.cov.noalias() -= v.transpose() * v;
  out.cov = symmetrize(out.cov);
  return out;
}

Vector posterior_mean_on_grid(const LocalAgent& agent, const Grid& grid) {
  if (agent.size() == 0) return Vector::Zero(static_cast<Eigen::Index>(grid.size()));
  return kernel_matrix(agent.kernel(), agent.inputs(), grid.coordinates()).transpose() *
         agent.weights();
}

Vector posterior_variance_on_grid(const LocalAgent& agent, const Grid& grid) {
  Vector var = Vector::Constant(static_cast<Eigen::Index>(grid.size()), agent.kernel().amplitude);
  if (agent.size() == 0) return var;
  const Matrix cross = kernel_matrix(agent.kernel(), agent.inputs(), grid.coordinates());
  const Matrix v = agent.factor().lower.triangularView<Eigen::Lower>().solve(cross);
  var -= v.colwise().squaredNorm().transpose();
  return var;
}

ModelDiagnostics diagnose(const DiscretizedGP& model) {
  ModelDiagnostics d;
  d.asymmetry = max_asymmetry(model.cov);
  d.min_eigenvalue = min_eigenvalue(model.cov);
  d.max_variance = model.cov.diagonal().maxCoeff();
  d.min_variance = model.cov.diagonal().minCoeff();
  return d;
}

double log_marginal_likelihood(std::span<const Observation> data, const KernelSpec& kernel,
                               double noise_var) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Matrix x(n, static_cast<Eigen::Index>(data.front().x.dim()));
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = data[static_cast<std::size_t>(i)].x.coords.transpose();
    y(i) = data[static_cast<std::size_t>(i)].y;
  }
  Matrix gram = kernel_matrix(kernel, x, x);
  gram.diagonal().array() += noise_var;
  const CholeskyFactor f = robust_cholesky(gram);
  const Vector alpha = f.lower.triangularView<Eigen::Lower>().solve(y);
  const double log_det = 2.0 * f.lower.diagonal().array().log().sum();
  return -0.5 * alpha.squaredNorm() - 0.5 * log_det -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double mle_noise_variance(std::span<const Observation> data, const KernelSpec& kernel) {
  if (data.size() < 2)
    throw std::invalid_argument("mle_noise_variance needs at least 2 observations (got " +
                                std::to_string(data.size()) + ")");
  kernel.validate();
  const double lo = std::log(kMinNoiseVariance);
  const double hi = std::log(kMaxNoiseVariance);
  auto neg_ll = [&](double log_var) {
    return -log_marginal_likelihood(data, kernel, std::exp(log_var));
  };

  // Coarse scan brackets the global optimum; Brent refines inside the bracket.
  constexpr int kScan = 41;
  std::vector<double> grid_u(kScan);
  std::vector<double> grid_f(kScan);
  for (int i = 0; i < kScan; ++i) {
    grid_u[i] = lo + (hi - lo) * i / (kScan - 1);
    grid_f[i] = neg_ll(grid_u[i]);
  }
  const auto best = static_cast<int>(std::min_element(grid_f.begin(), grid_f.end()) - grid_f.begin());
  const double a = grid_u[std::max(best - 1, 0)];
  const double b = grid_u[std::min(best + 1, kScan - 1)];
  // 20 bits keeps the log-space error well below 1e-4 on this interval.
  const auto [u_star, f_star] = boost::math::tools::brent_find_minima(neg_ll, a, b, 20);

  double u = u_star;
  double f = f_star;
  if (grid_f[best] < f) {
    u = grid_u[best];
    f = grid_f[best];
  }
  // Brent never lands exactly on an interval end; the endpoints are checked
  // directly so a boundary maximum is reported as the clamp value.
  if (grid_f.front() <= f) return kMinNoiseVariance;
  if (grid_f.back() < f) return kMaxNoiseVariance;
  return std::clamp(std::exp(u), kMinNoiseVariance, kMaxNoiseVariance);
}

double server_noise_variance(std::span<const double> estimates) {
  if (estimates.empty()) throw std::invalid_argument("server_noise_variance: no estimates");
  double sum = 0.0;
  for (double e : estimates) sum += e;
  return sum / static_cast<double>(estimates.size());
}

}  // namespace cobo
