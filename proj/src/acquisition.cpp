#include "cobo/acquisition.hpp"

#include "cobo/rng.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

namespace cobo {

namespace {

// Scratch space for one central-term evaluation. `chol` holds the rows of
// the Cholesky factor of K_c(x,x) + (noise + delta) I, column j of `w` holds
// row j of D(x)^{-1} K_c(x, :), and `acc` (D x M) the fantasy means.
struct Workspace {
  Matrix chol;
  Matrix w;
  Matrix acc;

  Workspace(Eigen::Index n, Eigen::Index d, Eigen::Index m) : chol(n, n), w(d, n), acc(d, m) {}
};

// Computes row j of the factor and of W given rows 0..j-1. Returns false on
// a non-positive pivot.
bool central_row(const Matrix& k, std::span<const std::size_t> x, Eigen::Index j, double shift,
                 Workspace& ws) {
  const auto xj = static_cast<Eigen::Index>(x[static_cast<std::size_t>(j)]);
  for (Eigen::Index c = 0; c < j; ++c) {
    double s = k(xj, static_cast<Eigen::Index>(x[static_cast<std::size_t>(c)]));
    for (Eigen::Index l = 0; l < c; ++l) s -= ws.chol(j, l) * ws.chol(c, l);
    ws.chol(j, c) = s / ws.chol(c, c);
  }
  double pivot = k(xj, xj) + shift;
  for (Eigen::Index l = 0; l < j; ++l) pivot -= ws.chol(j, l) * ws.chol(j, l);
  if (!(pivot > 0.0) || !std::isfinite(pivot)) return false;
  const double diag = std::sqrt(pivot);
  ws.chol(j, j) = diag;

  const Eigen::Index d = k.rows();
  const double* kx = k.col(xj).data();
  double* wj = ws.w.col(j).data();
  for (Eigen::Index z = 0; z < d; ++z) wj[z] = kx[z];
  for (Eigen::Index l = 0; l < j; ++l) {
    const double c = ws.chol(j, l);
    const double* wl = ws.w.col(l).data();
    for (Eigen::Index z = 0; z < d; ++z) wj[z] -= c * wl[z];
  }
  for (Eigen::Index z = 0; z < d; ++z) wj[z] /= diag;
  return true;
}

void broadcast_mean(const Vector& mu, Matrix& acc) {
  for (Eigen::Index m = 0; m < acc.cols(); ++m) acc.col(m) = mu;
}

// acc(z, m) += xi(m, j) * W(j, z)
void accumulate(const Matrix& xi, Eigen::Index j, const Matrix& w, Matrix& acc) {
  const Eigen::Index d = acc.rows();
  const double* wj = w.col(j).data();
  for (Eigen::Index m = 0; m < acc.cols(); ++m) {
    const double s = xi(m, j);
    double* a = acc.col(m).data();
    for (Eigen::Index z = 0; z < d; ++z) a[z] += s * wj[z];
  }
}

double mean_of_maxima(const Matrix& acc) {
  double total = 0.0;
  for (Eigen::Index m = 0; m < acc.cols(); ++m) total += acc.col(m).maxCoeff();
  return total / static_cast<double>(acc.cols());
}

// mean_of_maxima of base + sum_{j >= from} xi(:, j) W(:, j) without forming
// the whole sum; the additions happen in the same order as accumulate.
// `scratch` holds base.rows() doubles.
double mean_of_maxima_from(const Matrix& base, const Matrix& xi, Eigen::Index from, const Matrix& w,
                           double* scratch) {
  const Eigen::Index d = base.rows();
  double total = 0.0;
  for (Eigen::Index m = 0; m < base.cols(); ++m) {
    const double* a = base.col(m).data();
    for (Eigen::Index z = 0; z < d; ++z) scratch[z] = a[z];
    for (Eigen::Index j = from; j < w.cols(); ++j) {
      const double s = xi(m, j);
      const double* wj = w.col(j).data();
      for (Eigen::Index z = 0; z < d; ++z) scratch[z] += s * wj[z];
    }
    total += Eigen::Map<const Vector>(scratch, d).maxCoeff();
  }
  return total / static_cast<double>(base.cols());
}

// Factorizes every row, escalating jitter on failure.
void central_rows(const DiscretizedGP& central, std::span<const std::size_t> x, double noise_var,
                  Workspace& ws) {
  const JitterPolicy policy;
  const auto n = static_cast<Eigen::Index>(x.size());
  double delta = 0.0;
  while (true) {
    bool ok = true;
    for (Eigen::Index j = 0; j < n && ok; ++j) ok = central_row(central.cov, x, j, noise_var + delta, ws);
    if (ok) return;
    delta = delta == 0.0 ? policy.initial : delta * policy.growth;
    if (delta > policy.maximum * (1.0 + 1e-12)) {
      Matrix sigma(n, n);
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
          sigma(a, b) = central.cov(static_cast<Eigen::Index>(x[static_cast<std::size_t>(a)]),
                                    static_cast<Eigen::Index>(x[static_cast<std::size_t>(b)]));
      sigma.diagonal().array() += noise_var;
      throw FactorizationError("joint decision covariance is not positive definite",
                               sigma.norm() / std::max(std::abs(min_eigenvalue(sigma)), 1e-300));
    }
  }
}

double central_value(const DiscretizedGP& central, std::span<const std::size_t> x,
                     const Matrix& xi, double noise_var, Workspace& ws) {
  central_rows(central, x, noise_var, ws);
  broadcast_mean(central.mean, ws.acc);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(x.size()); ++j) accumulate(xi, j, ws.w, ws.acc);
  return mean_of_maxima(ws.acc);
}

Vector local_sigma_row(const DiscretizedGP& model, std::size_t x_index, double noise_var) {
  const auto d = static_cast<Eigen::Index>(model.size());
  if (x_index >= model.size()) throw std::out_of_range("sigma_local: grid index out of range");
  const auto xi = static_cast<Eigen::Index>(x_index);
  const double var = model.cov(xi, xi);
  if (var < -1e-8)
    throw std::invalid_argument("sigma_local: negative posterior variance " + std::to_string(var));
  const double denom = std::sqrt(std::max(var, 0.0) + noise_var);
  if (denom == 0.0) return Vector::Zero(d);
  Vector out(d);
  for (Eigen::Index z = 0; z < d; ++z) out(z) = model.cov(xi, z) / denom;
  return out;
}

double mean_fantasy_max(const Vector& mu, const Vector& sigma, const Matrix& xi, Eigen::Index column) {
  double total = 0.0;
  for (Eigen::Index m = 0; m < xi.rows(); ++m) total += (mu + xi(m, column) * sigma).maxCoeff();
  return total / static_cast<double>(xi.rows());
}

std::uint64_t saturating_power(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    out *= base;
  }
  return out;
}

void check_models(const DiscretizedGP& central, std::span<const DiscretizedGP> locals,
                  const FantasyDraws& draws, std::size_t n_agents) {
  const std::size_t d = central.size();
  if (d == 0) throw DimensionError("acquisition: empty grid");
  if (static_cast<std::size_t>(central.cov.rows()) != d || static_cast<std::size_t>(central.cov.cols()) != d)
    throw DimensionError("acquisition: central covariance does not match its mean");
  for (const auto& m : locals) {
    if (m.size() != d || static_cast<std::size_t>(m.cov.rows()) != d)
      throw DimensionError("acquisition: local model lives on a different grid");
  }
  if (static_cast<std::size_t>(draws.agents()) != n_agents)
    throw DimensionError("acquisition: fantasy draws have " + std::to_string(draws.agents()) +
                         " columns for " + std::to_string(n_agents) + " agents");
  if (draws.samples() < 1) throw std::invalid_argument("acquisition: no fantasy draws");
}

// Shared machinery for exhaustive and coordinate-ascent maximization of
// central(x) + beta * sum_n table(n, x_n).
class Maximizer {
 public:
  Maximizer(const DiscretizedGP& central, std::span<const DiscretizedGP> locals, std::size_t n_agents,
            double beta, const FantasyDraws& draws, double noise_var)
      : central_(central),
        n_(static_cast<Eigen::Index>(n_agents)),
        d_(static_cast<Eigen::Index>(central.size())),
        beta_(beta),
        xi_(draws.xi),
        noise_var_(noise_var),
        table_(Matrix::Zero(n_, d_)) {
    if (beta_ != 0.0) {
      const auto d = static_cast<int>(d_);
      detail::ExceptionSlot slot;
      for (Eigen::Index a = 0; a < n_; ++a) {
        const DiscretizedGP& model = locals[static_cast<std::size_t>(a)];
#pragma omp parallel for schedule(dynamic, 8)
        for (int i = 0; i < d; ++i) {
          slot.run([&] {
            table_(a, i) = mean_fantasy_max(model.mean, local_sigma_row(model, static_cast<std::size_t>(i), noise_var_), xi_, a);
          });
        }
      }
      slot.rethrow();
    }
  }

  Workspace workspace() const { return Workspace(n_, d_, xi_.rows()); }

  double local_sum(std::span<const std::size_t> x) const {
    double s = 0.0;
    for (Eigen::Index a = 0; a < n_; ++a) s += table_(a, static_cast<Eigen::Index>(x[static_cast<std::size_t>(a)]));
    return s;
  }

  double evaluate(std::span<const std::size_t> x, Workspace& ws) const {
    return central_value(central_, x, xi_, noise_var_, ws) + beta_ * local_sum(x);
  }

  // Values of every candidate for coordinate `coord` with the rest of x
  // fixed. Rows before `coord` are shared by all candidates and computed once.
  std::vector<double> scan(std::vector<std::size_t> x, Eigen::Index coord) const {
    std::vector<double> values(static_cast<std::size_t>(d_));
    Workspace prefix = workspace();
    bool prefix_ok = true;
    for (Eigen::Index j = 0; j < coord && prefix_ok; ++j) prefix_ok = central_row(central_.cov, x, j, noise_var_, prefix);
    Matrix base(d_, xi_.rows());
    if (prefix_ok) {
      broadcast_mean(central_.mean, base);
      for (Eigen::Index j = 0; j < coord; ++j) accumulate(xi_, j, prefix.w, base);
    }
    const auto d = static_cast<int>(d_);
    detail::ExceptionSlot slot;
#pragma omp parallel
    {
      Workspace ws = prefix;
      std::vector<std::size_t> cand = x;
#pragma omp for schedule(dynamic, 4)
      for (int i = 0; i < d; ++i) slot.run([&] {
        cand[static_cast<std::size_t>(coord)] = static_cast<std::size_t>(i);
        bool ok = prefix_ok;
        for (Eigen::Index j = coord; j < n_ && ok; ++j) ok = central_row(central_.cov, cand, j, noise_var_, ws);
        double value;
        if (ok) {
          value = mean_of_maxima_from(base, xi_, coord, ws.w, ws.acc.data()) + beta_ * local_sum(cand);
        } else {
          value = evaluate(cand, ws);
          // central_rows overwrote the shared prefix rows in this workspace.
          ws.chol.topRows(coord) = prefix.chol.topRows(coord);
          ws.w.leftCols(coord) = prefix.w.leftCols(coord);
        }
        values[static_cast<std::size_t>(i)] = value;
      });
    }
    slot.rethrow();
    return values;
  }

  // Lexicographic enumeration of all D^N decisions; values indexed by the
  // base-D number with the first agent most significant.
  std::vector<double> enumerate() const {
    const std::uint64_t total = saturating_power(static_cast<std::uint64_t>(d_), static_cast<std::size_t>(n_));
    std::vector<double> values(total);
    const std::uint64_t stride = total / static_cast<std::uint64_t>(d_);
    Matrix root(d_, xi_.rows());
    broadcast_mean(central_.mean, root);
    const auto d = static_cast<int>(d_);
    detail::ExceptionSlot slot;
#pragma omp parallel
    {
      Workspace ws = workspace();
      std::vector<Matrix> bases(static_cast<std::size_t>(n_ + 1), Matrix(d_, xi_.rows()));
      bases[0] = root;
      std::vector<std::size_t> x(static_cast<std::size_t>(n_), 0);
#pragma omp for schedule(dynamic, 1)
      for (int i = 0; i < d; ++i) slot.run([&] {
        x[0] = static_cast<std::size_t>(i);
        descend(0, true, x, ws, bases, static_cast<std::uint64_t>(i) * stride, stride, values);
      });
    }
    slot.rethrow();
    return values;
  }

 private:
  void descend(Eigen::Index j, bool ok, std::vector<std::size_t>& x, Workspace& ws,
               std::vector<Matrix>& bases, std::uint64_t offset, std::uint64_t stride,
               std::vector<double>& values) const {
    const auto uj = static_cast<std::size_t>(j);
    ok = ok && central_row(central_.cov, x, j, noise_var_, ws);
    if (j + 1 == n_) {
      values[offset] =
          ok ? mean_of_maxima_from(bases[uj], xi_, j, ws.w, ws.acc.data()) + beta_ * local_sum(x) : fallback(x);
      return;
    }
    if (ok) {
      bases[uj + 1] = bases[uj];
      accumulate(xi_, j, ws.w, bases[uj + 1]);
    }
    const std::uint64_t child = stride / static_cast<std::uint64_t>(d_);
    for (Eigen::Index i = 0; i < d_; ++i) {
      x[uj + 1] = static_cast<std::size_t>(i);
      descend(j + 1, ok, x, ws, bases, offset + static_cast<std::uint64_t>(i) * child, child, values);
    }
  }

  // The shared workspace still holds prefix rows needed by sibling
  // branches, so the jittered evaluation gets its own.
  double fallback(std::span<const std::size_t> x) const {
    Workspace scratch = workspace();
    return evaluate(x, scratch);
  }

  const DiscretizedGP& central_;
  Eigen::Index n_;
  Eigen::Index d_;
  double beta_;
  const Matrix& xi_;
  double noise_var_;
  Matrix table_;
};

std::size_t first_argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

JointDecision decode(std::uint64_t linear, std::size_t n, std::size_t d) {
  JointDecision x;
  x.indices.assign(n, 0);
  for (std::size_t k = n; k-- > 0;) {
    x.indices[k] = static_cast<std::size_t>(linear % d);
    linear /= d;
  }
  return x;
}

AcqResult maximize(const DiscretizedGP& central, std::span<const DiscretizedGP> locals,
                   std::size_t n_agents, double beta, const AcqConfig& cfg, const FantasyDraws& draws,
                   double noise_var, std::uint64_t seed) {
  cfg.validate();
  if (n_agents == 0) throw std::invalid_argument("acquisition: no agents");
  check_models(central, locals, draws, n_agents);
  if (beta != 0.0 && locals.size() != n_agents)
    throw DimensionError("acquisition: expected one local model per agent");

  const Maximizer opt(central, locals, n_agents, beta, draws, noise_var);
  const std::size_t d = central.size();
  AcqResult out;

  if (saturating_power(d, n_agents) <= cfg.exhaustive_threshold) {
    const std::vector<double> values = opt.enumerate();
    const std::size_t best = first_argmax(values);
    out.best = decode(best, n_agents, d);
    out.value = values[best];
    out.exhaustive = true;
    out.evaluations = values.size();
    return out;
  }

  // A (decision, next coordinate) state fully determines the rest of an
  // ascent, so a restart that reaches a state seen before can stop.
  std::set<std::pair<std::vector<std::size_t>, std::size_t>> visited;
  bool have_best = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(seed, Stream::restarts, static_cast<std::uint64_t>(r)));
    std::uniform_int_distribution<std::size_t> pick(0, d - 1);
    std::vector<std::size_t> x(n_agents);
    for (auto& xi : x) xi = pick(rng);

    Workspace ws = opt.workspace();
    double value = opt.evaluate(x, ws);
    ++out.evaluations;
    std::vector<double> trace{value};
    std::size_t coord = 0;
    std::size_t idle = 0;
    bool repeated = false;
    while (idle < n_agents) {
      if (!visited.emplace(x, coord).second) {
        repeated = true;
        break;
      }
      const std::vector<double> values = opt.scan(x, static_cast<Eigen::Index>(coord));
      out.evaluations += values.size();
      const std::size_t best = first_argmax(values);
      if (values[best] > value) {
        x[coord] = best;
        value = values[best];
        idle = 0;
      } else {
        ++idle;
      }
      trace.push_back(value);
      coord = (coord + 1) % n_agents;
    }
    out.trace.push_back(std::move(trace));
    if (repeated) continue;
    JointDecision cand{x};
    if (!have_best || value > out.value || (value == out.value && cand < out.best)) {
      out.best = std::move(cand);
      out.value = value;
      have_best = true;
    }
  }
  return out;
}

}  // namespace

double BetaSchedule::value(int t) const {
  if (t < 1) throw std::invalid_argument("beta schedule is defined for t >= 1 (got " + std::to_string(t) + ")");
  switch (kind_) {
    case Kind::log_increasing:
      return std::log(2.0 * t + 1.0);
    case Kind::exp_decreasing:
      return std::exp(-t / 2.0);
    case Kind::constant:
      return 1.0;
  }
  throw std::logic_error("unknown beta schedule");
}

std::string_view to_string(BetaSchedule::Kind kind) {
  switch (kind) {
    case BetaSchedule::Kind::log_increasing:
      return "log_increasing";
    case BetaSchedule::Kind::exp_decreasing:
      return "exp_decreasing";
    case BetaSchedule::Kind::constant:
      return "constant";
  }
  return "unknown";
}

BetaSchedule::Kind parse_beta_kind(std::string_view name) {
  if (name == "log_increasing") return BetaSchedule::Kind::log_increasing;
  if (name == "exp_decreasing") return BetaSchedule::Kind::exp_decreasing;
  if (name == "constant") return BetaSchedule::Kind::constant;
  throw std::invalid_argument("unknown beta schedule \"" + std::string(name) + "\"");
}

FantasyDraws FantasyDraws::generate(int samples, int agents, std::uint64_t seed, bool antithetic) {
  if (samples < 1 || agents < 1) throw std::invalid_argument("fantasy draws need samples >= 1 and agents >= 1");
  if (antithetic && samples % 2 != 0)
    throw std::invalid_argument("antithetic fantasy draws need an even sample count (got " +
                                std::to_string(samples) + ")");
  FantasyDraws out;
  out.antithetic = antithetic;
  out.xi.resize(samples, agents);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int fresh = antithetic ? samples / 2 : samples;
  for (int m = 0; m < fresh; ++m)
    for (int n = 0; n < agents; ++n) out.xi(m, n) = normal(rng);
  if (antithetic) out.xi.bottomRows(fresh) = -out.xi.topRows(fresh);
  return out;
}

FantasyDraws FantasyDraws::from_matrix(Matrix xi) {
  FantasyDraws out;
  const Eigen::Index half = xi.rows() / 2;
  out.antithetic = xi.rows() % 2 == 0 && half > 0 && xi.bottomRows(half) == -xi.topRows(half);
  out.xi = std::move(xi);
  return out;
}

void AcqConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("acquisition samples must be >= 1");
  if (antithetic && (samples < 2 || samples % 2 != 0))
    throw std::invalid_argument("antithetic acquisition samples must be even and >= 2");
  if (restarts < 1) throw std::invalid_argument("acquisition restarts must be >= 1");
}

Vector sigma_central(const DiscretizedGP& central, const JointDecision& x, std::size_t z_index,
                     double noise_var) {
  if (z_index >= central.size()) throw std::out_of_range("sigma_central: grid index out of range");
  for (std::size_t i : x.indices)
    if (i >= central.size()) throw std::out_of_range("sigma_central: decision index out of range");
  const auto n = static_cast<Eigen::Index>(x.size());
  Workspace ws(n, static_cast<Eigen::Index>(central.size()), 1);
  central_rows(central, x.indices, noise_var, ws);
  return ws.w.row(static_cast<Eigen::Index>(z_index)).transpose();
}

double sigma_local(const DiscretizedGP& model, std::size_t x_index, std::size_t z_index, double noise_var) {
  if (z_index >= model.size()) throw std::out_of_range("sigma_local: grid index out of range");
  return local_sigma_row(model, x_index, noise_var)(static_cast<Eigen::Index>(z_index));
}

double qkg_estimate(const DiscretizedGP& central, const JointDecision& x, const FantasyDraws& draws,
                    double noise_var) {
  check_models(central, {}, draws, x.size());
  for (std::size_t i : x.indices)
    if (i >= central.size()) throw std::out_of_range("qkg_estimate: decision index out of range");
  Workspace ws(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(central.size()), draws.xi.rows());
  return central_value(central, x.indices, draws.xi, noise_var, ws);
}

double local_term(const DiscretizedGP& model, std::size_t x_index, const FantasyDraws& draws, int column,
                  double noise_var) {
  if (column < 0 || column >= draws.agents()) throw std::out_of_range("local_term: draw column out of range");
  return mean_fantasy_max(model.mean, local_sigma_row(model, x_index, noise_var), draws.xi, column);
}

double cokg_estimate(const DiscretizedGP& central, std::span<const DiscretizedGP> locals,
                     const JointDecision& x, double beta, const FantasyDraws& draws, double noise_var) {
  if (locals.size() != x.size()) throw DimensionError("cokg_estimate: expected one local model per agent");
  check_models(central, locals, draws, x.size());
  const double q = qkg_estimate(central, x, draws, noise_var);
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n)
    s += local_term(locals[n], x.indices[n], draws, static_cast<int>(n), noise_var);
  return q + beta * s;
}

double kg_local_estimate(const DiscretizedGP& model, std::size_t x_index, std::span<const double> draws_1d,
                         double noise_var) {
  if (draws_1d.empty()) throw std::invalid_argument("kg_local_estimate: no draws");
  Matrix xi(static_cast<Eigen::Index>(draws_1d.size()), 1);
  for (std::size_t m = 0; m < draws_1d.size(); ++m) xi(static_cast<Eigen::Index>(m), 0) = draws_1d[m];
  return mean_fantasy_max(model.mean, local_sigma_row(model, x_index, noise_var), xi, 0) - model.mean.maxCoeff();
}

AcqResult optimize_cokg(const DiscretizedGP& central, std::span<const DiscretizedGP> locals, double beta,
                        const AcqConfig& cfg, const FantasyDraws& draws, double noise_var, std::uint64_t seed) {
  return maximize(central, locals, locals.size(), beta, cfg, draws, noise_var, seed);
}

AcqResult select_barycenter_qkg(const DiscretizedGP& central, std::span<const DiscretizedGP> locals,
                                const AcqConfig& cfg, const FantasyDraws& draws, double noise_var,
                                std::uint64_t seed) {
  return optimize_cokg(central, locals, 0.0, cfg, draws, noise_var, seed);
}

AcqResult select_no_collaboration(std::span<const DiscretizedGP> locals, const FantasyDraws& draws,
                                  double noise_var) {
  if (locals.empty()) throw std::invalid_argument("select_no_collaboration: no agents");
  if (draws.agents() < 1) throw DimensionError("select_no_collaboration: no draw columns");
  AcqResult out;
  out.exhaustive = true;
  out.best.indices.resize(locals.size());
  for (std::size_t n = 0; n < locals.size(); ++n) {
    const DiscretizedGP& model = locals[n];
    const auto d = static_cast<int>(model.size());
    std::vector<double> values(model.size());
    detail::ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < d; ++i) slot.run([&] {
      values[static_cast<std::size_t>(i)] =
          mean_fantasy_max(model.mean, local_sigma_row(model, static_cast<std::size_t>(i), noise_var), draws.xi, 0);
    });
    slot.rethrow();
    const std::size_t best = first_argmax(values);
    out.best.indices[n] = best;
    out.value += values[best];
    out.evaluations += values.size();
  }
  return out;
}

AcqResult select_data_communication(const DiscretizedGP& pooled, std::size_t n_agents, const AcqConfig& cfg,
                                    const FantasyDraws& draws, double noise_var, std::uint64_t seed) {
  return maximize(pooled, {}, n_agents, 0.0, cfg, draws, noise_var, seed);
}

}  // namespace cobo
