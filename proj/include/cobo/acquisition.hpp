#pragma once

// Collaborative knowledge-gradient acquisition on a discrete grid.
//
// For a joint decision x = (x_1..x_N) and fantasy draws xi_m in R^N the
// Monte Carlo estimate is
//
//   (1/M) sum_m [ max_z (mu_c(z) + sigma_c(x,z) . xi_m)
//                 + beta sum_n max_z (mu_n(z) + sigma_n(x_n,z) xi_{m,n}) ]
//
// where sigma_c(x,z) = D(x)^{-1} K_c(x,z), D(x) the lower Cholesky factor of
// K_c(x,x) + noise I, and sigma_n(x,z) = K_n(x,z) / sqrt(K_n(x,x) + noise).
// All inner maxima are exhaustive scans over the grid.

#include "cobo/barycenter.hpp"
#include "cobo/gp_core.hpp"
#include "cobo/linalg.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cobo {

class BetaSchedule {
 public:
  enum class Kind { log_increasing, exp_decreasing, constant };

  BetaSchedule() = default;
  explicit BetaSchedule(Kind kind) : kind_(kind) {}

  Kind kind() const { return kind_; }
  /// ln(2t+1), exp(-t/2) or 1. Throws for t < 1.
  double value(int t) const;

  bool operator==(const BetaSchedule&) const = default;

 private:
  Kind kind_ = Kind::log_increasing;
};

std::string_view to_string(BetaSchedule::Kind kind);
/// Throws std::invalid_argument naming the unknown id.
BetaSchedule::Kind parse_beta_kind(std::string_view name);

/// M x N standard normals; row m is the fantasy vector xi_m. With antithetic
/// sampling the second half of the rows mirrors the first.
struct FantasyDraws {
  Matrix xi;
  bool antithetic = true;

  int samples() const { return static_cast<int>(xi.rows()); }
  int agents() const { return static_cast<int>(xi.cols()); }

  static FantasyDraws generate(int samples, int agents, std::uint64_t seed, bool antithetic = true);
  /// Wraps an explicit matrix (tests and hand-built instances).
  static FantasyDraws from_matrix(Matrix xi);
};

/// One grid index per agent.
struct JointDecision {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  bool operator==(const JointDecision&) const = default;
  auto operator<=>(const JointDecision&) const = default;
};

struct AcqConfig {
  int samples = 64;  // M; must be even when antithetic
  int restarts = 8;
  std::uint64_t exhaustive_threshold = 4096;  // D^N at or below this is enumerated
  bool antithetic = true;

  void validate() const;
  bool operator==(const AcqConfig&) const = default;
};

Vector sigma_central(const DiscretizedGP& central, const JointDecision& x, std::size_t z_index,
                     double noise_var);

double sigma_local(const DiscretizedGP& model, std::size_t x_index, std::size_t z_index,
                   double noise_var);

/// Central-only (q-KG) part of the estimate.
double qkg_estimate(const DiscretizedGP& central, const JointDecision& x, const FantasyDraws& draws,
                    double noise_var);

/// (1/M) sum_m max_z (mu(z) + sigma(x,z) xi_{m,column}), without the
/// max-mean baseline.
double local_term(const DiscretizedGP& model, std::size_t x_index, const FantasyDraws& draws,
                  int column, double noise_var);

/// qkg_estimate + beta * sum_n local_term(n); beta = 0 reproduces
/// qkg_estimate bit for bit.
double cokg_estimate(const DiscretizedGP& central, std::span<const DiscretizedGP> locals,
                     const JointDecision& x, double beta, const FantasyDraws& draws,
                     double noise_var);

/// Single-agent knowledge gradient: expected best fantasy mean minus the
/// current best mean.
double kg_local_estimate(const DiscretizedGP& model, std::size_t x_index,
                         std::span<const double> draws_1d, double noise_var);

struct AcqResult {
  JointDecision best;
  double value = 0.0;
  bool exhaustive = false;
  std::uint64_t evaluations = 0;
  /// Objective value after every coordinate step of every restart
  /// (coordinate ascent only). A new restart begins where the value resets.
  std::vector<std::vector<double>> trace;
};

/// Maximizes cokg_estimate over joint decisions. `seed` drives the random
/// restarts of coordinate ascent.
AcqResult optimize_cokg(const DiscretizedGP& central, std::span<const DiscretizedGP> locals,
                        double beta, const AcqConfig& cfg, const FantasyDraws& draws,
                        double noise_var, std::uint64_t seed);

/// q-KG on the central model alone: optimize_cokg with beta = 0.
AcqResult select_barycenter_qkg(const DiscretizedGP& central, std::span<const DiscretizedGP> locals,
                                const AcqConfig& cfg, const FantasyDraws& draws, double noise_var,
                                std::uint64_t seed);

/// Every agent independently maximizes its own knowledge gradient. All
/// agents read column 0 of the draws, so identical agents choose identically.
AcqResult select_no_collaboration(std::span<const DiscretizedGP> locals, const FantasyDraws& draws,
                                  double noise_var);

/// q-KG for `n_agents` points on a model fit to the pooled data of all agents.
AcqResult select_data_communication(const DiscretizedGP& pooled, std::size_t n_agents,
                                    const AcqConfig& cfg, const FantasyDraws& draws,
                                    double noise_var, std::uint64_t seed);

}  // namespace cobo
