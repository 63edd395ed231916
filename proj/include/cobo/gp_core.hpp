#pragma once

// Exact GP regression with an RBF kernel on the normalized box [0,1]^d,
// posterior discretization onto a fixed grid, and noise-variance estimation.

#include "cobo/linalg.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace cobo {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A decision variable in the normalized feasible set.
struct Point {
  Vector coords;

  Point() = default;
  explicit Point(Vector c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c);

  std::size_t dim() const { return static_cast<std::size_t>(coords.size()); }
  double operator[](std::size_t i) const { return coords(static_cast<Eigen::Index>(i)); }
  bool operator==(const Point& other) const;
};

/// Uniform tensor grid over [0,1]^d in row-major order (last axis fastest).
class Grid {
 public:
  explicit Grid(std::vector<std::size_t> per_axis);
  static Grid uniform(std::size_t dim, std::size_t per_axis);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return per_axis_.size(); }
  const std::vector<std::size_t>& per_axis() const { return per_axis_; }

  Point point(std::size_t index) const;
  /// Row i is grid point i.
  const Matrix& coordinates() const { return points_; }
  std::size_t index_of(std::span<const std::size_t> axis_indices) const;

 private:
  std::vector<std::size_t> per_axis_;
  Matrix points_;
};

/// k(a, b) = amplitude * exp(-||a - b||^2 / lengthscale_sq).
struct KernelSpec {
  double lengthscale_sq = 0.1;
  double amplitude = 1.0;

  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

double kernel_eval(const KernelSpec& k, const Point& a, const Point& b);

/// Cross-kernel matrix between the rows of `a` and the rows of `b`.
Matrix kernel_matrix(const KernelSpec& k, const Matrix& a, const Matrix& b);

struct Observation {
  Point x;
  double y = 0.0;
};

/// One agent's private data and GP posterior. The dataset is append-only;
/// the Cholesky factor of (K + noise_var I) is refreshed on every append.
class LocalAgent {
 public:
  LocalAgent(int id, KernelSpec kernel, double noise_var);

  int id() const { return id_; }
  const KernelSpec& kernel() const { return kernel_; }
  double noise_var() const { return noise_var_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<Observation>& data() const { return data_; }
  /// Jitter the last factorization needed on top of noise_var (diagnostic).
  double jitter_used() const { return factor_.jitter; }

  void observe(Observation obs);
  void observe_all(std::span<const Observation> obs);

  // Cached posterior pieces; meaningful only when size() > 0.
  const Matrix& inputs() const { return inputs_; }
  const CholeskyFactor& factor() const { return factor_; }
  const Vector& weights() const { return weights_; }

 private:
  void refresh();

  int id_;
  KernelSpec kernel_;
  double noise_var_;
  std::vector<Observation> data_;
  Matrix inputs_;
  CholeskyFactor factor_;
  Vector weights_;  // (K + noise I)^{-1} y
};

struct PosteriorValue {
  double mean = 0.0;  // posterior mean at query_a
  double cov = 0.0;   // posterior covariance between query_a and query_b
};

PosteriorValue posterior_eval(const LocalAgent& agent, const Point& query_a, const Point& query_b);

/// A GP restricted to the grid: the only object an agent hands to the server.
struct DiscretizedGP {
  Vector mean;
  Matrix cov;

  std::size_t size() const { return static_cast<std::size_t>(mean.size()); }
};

DiscretizedGP discretize(const LocalAgent& agent, const Grid& grid);
Vector posterior_mean_on_grid(const LocalAgent& agent, const Grid& grid);
Vector posterior_variance_on_grid(const LocalAgent& agent, const Grid& grid);

/// Symmetry, PSD and variance-bound diagnostics for a discretized model.
struct ModelDiagnostics {
  double asymmetry = 0.0;
  double min_eigenvalue = 0.0;
  double max_variance = 0.0;
  double min_variance = 0.0;
};
ModelDiagnostics diagnose(const DiscretizedGP& model);

/// Gaussian marginal log-likelihood of y under N(0, K + noise_var I).
double log_marginal_likelihood(std::span<const Observation> data, const KernelSpec& kernel,
                               double noise_var);

/// Maximum-likelihood noise variance over [1e-6, 1], searched in log space.
/// Requires at least two observations.
double mle_noise_variance(std::span<const Observation> data, const KernelSpec& kernel);

inline constexpr double kMinNoiseVariance = 1e-6;
inline constexpr double kMaxNoiseVariance = 1.0;

/// Server-side pooling of the agents' noise estimates (arithmetic mean).
double server_noise_variance(std::span<const double> estimates);

}  // namespace cobo
