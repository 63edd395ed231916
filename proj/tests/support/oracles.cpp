#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cobo::oracle {

Matrix inverse(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix m = a;
  Matrix inv = Matrix::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(pivot, c))) pivot = r;
    if (m(pivot, c) == 0.0) throw std::runtime_error("oracle inverse: singular matrix");
    m.row(c).swap(m.row(pivot));
    inv.row(c).swap(inv.row(pivot));
    const double p = m(c, c);
    for (Eigen::Index j = 0; j < n; ++j) {
      m(c, j) /= p;
      inv(c, j) /= p;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m(r, c);
      for (Eigen::Index j = 0; j < n; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

Matrix cholesky(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) throw std::runtime_error("oracle cholesky: matrix not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

double rbf(const KernelSpec& k, const Point& a, const Point& b) {
  double sq = 0.0;
  for (std::size_t c = 0; c < a.dim(); ++c) sq += (a[c] - b[c]) * (a[c] - b[c]);
  return k.amplitude * std::exp(-sq / k.lengthscale_sq);
}

Posterior posterior(std::span<const Observation> data, const KernelSpec& k, double noise_var, const Point& a,
                    const Point& b) {
  const auto n = static_cast<Eigen::Index>(data.size());
  if (n == 0) return {0.0, rbf(k, a, b)};
  Matrix gram(n, n);
  Vector ka(n), kb(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& oi = data[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = rbf(k, oi.x, data[static_cast<std::size_t>(j)].x);
    gram(i, i) += noise_var;
    ka(i) = rbf(k, oi.x, a);
    kb(i) = rbf(k, oi.x, b);
    y(i) = oi.y;
  }
  const Matrix inv = inverse(gram);
  Posterior out;
  out.cov = rbf(k, a, b);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out.mean += ka(i) * inv(i, j) * y(j);
      out.cov -= ka(i) * inv(i, j) * kb(j);
    }
  }
  return out;
}

double cokg_value(const DiscretizedGP& central, std::span<const DiscretizedGP> locals,
                  const std::vector<std::size_t>& x, double beta, const Matrix& xi, double noise_var) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto d = static_cast<Eigen::Index>(central.size());
  const auto at = [&](Eigen::Index a) { return static_cast<Eigen::Index>(x[static_cast<std::size_t>(a)]); };

  Matrix sigma(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) sigma(a, b) = central.cov(at(a), at(b)) + (a == b ? noise_var : 0.0);
  const Matrix l = cholesky(sigma);

  // s(:, z) solves L s = K(x, z) by forward substitution.
  Matrix s(n, d);
  for (Eigen::Index z = 0; z < d; ++z) {
    for (Eigen::Index a = 0; a < n; ++a) {
      double v = central.cov(at(a), z);
      for (Eigen::Index b = 0; b < a; ++b) v -= l(a, b) * s(b, z);
      s(a, z) = v / l(a, a);
    }
  }

  double total = 0.0;
  for (Eigen::Index m = 0; m < xi.rows(); ++m) {
    double central_max = -INFINITY;
    for (Eigen::Index z = 0; z < d; ++z) {
      double v = central.mean(z);
      for (Eigen::Index a = 0; a < n; ++a) v += s(a, z) * xi(m, a);
      if (v > central_max) central_max = v;
    }
    double local_sum = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      const DiscretizedGP& model = locals[static_cast<std::size_t>(a)];
      const double scale = std::sqrt(model.cov(at(a), at(a)) + noise_var);
      double local_max = -INFINITY;
      for (Eigen::Index z = 0; z < d; ++z) {
        const double v = model.mean(z) + model.cov(at(a), z) / scale * xi(m, a);
        if (v > local_max) local_max = v;
      }
      local_sum += local_max;
    }
    total += central_max + beta * local_sum;
  }
  return total / static_cast<double>(xi.rows());
}

Enumerated enumerate_cokg(const DiscretizedGP& central, std::span<const DiscretizedGP> locals, double beta,
                          const Matrix& xi, double noise_var) {
  const std::size_t n = locals.size();
  const std::size_t d = central.size();
  std::size_t total = 1;
  for (std::size_t a = 0; a < n; ++a) total *= d;
  Enumerated out;
  out.value = -INFINITY;
  std::vector<std::size_t> x(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (std::size_t a = n; a-- > 0;) {
      x[a] = rest % d;
      rest /= d;
    }
    const double v = cokg_value(central, locals, x, beta, xi, noise_var);
    if (v > out.value) {
      out.value = v;
      out.best = x;
    }
  }
  return out;
}

Quadrature gauss_hermite(int n) {
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Matrix> es(jacobi);
  Quadrature q;
  for (int i = 0; i < n; ++i) {
    q.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    q.weights.push_back(v * v);
  }
  return q;
}

double kg_quadrature(const DiscretizedGP& model, std::size_t x, double noise_var, int nodes) {
  const auto xi = static_cast<Eigen::Index>(x);
  const double scale = std::sqrt(model.cov(xi, xi) + noise_var);
  const Quadrature q = gauss_hermite(nodes);
  double expected = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    double best = -INFINITY;
    for (Eigen::Index z = 0; z < model.mean.size(); ++z)
      best = std::max(best, model.mean(z) + model.cov(xi, z) / scale * q.nodes[i]);
    expected += q.weights[i] * best;
  }
  return expected - model.mean.maxCoeff();
}

double log_likelihood(std::span<const Observation> data, const KernelSpec& k, double noise_var) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Matrix a(n, n);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = rbf(k, data[static_cast<std::size_t>(i)].x, data[static_cast<std::size_t>(j)].x);
    a(i, i) += noise_var;
    y(i) = data[static_cast<std::size_t>(i)].y;
  }
  const Matrix inv = inverse(a);
  const Matrix l = cholesky(a);
  double quad = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) quad += y(i) * inv(i, j) * y(j);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(l(i, i));
  return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double best_grid_noise(std::span<const Observation> data, const KernelSpec& k, double step) {
  double best = step;
  double best_ll = -INFINITY;
  const int count = static_cast<int>(std::lround(1.0 / step));
  for (int i = 1; i <= count; ++i) {
    const double s = step * i;
    const double ll = log_likelihood(data, k, s);
    if (ll > best_ll) {
      best_ll = ll;
      best = s;
    }
  }
  return best;
}

double dense_scan_max(const std::function<double(double, double)>& f, int n) {
  double best = -INFINITY;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) best = std::max(best, f(i / double(n - 1), j / double(n - 1)));
  return best;
}

}  // namespace cobo::oracle
