#pragma once

// The collaborative optimization loop: private warm-up, then per iteration
// discretize -> fuse -> select -> observe, and final reporting.

#include "cobo/acquisition.hpp"
#include "cobo/barycenter.hpp"
#include "cobo/gp_core.hpp"
#include "cobo/objectives.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cobo {

enum class Framework { cokg, barycenter_qkg, no_collaboration, data_communication };

std::string_view to_string(Framework f);
/// Throws std::invalid_argument naming the unknown id.
Framework parse_framework(std::string_view name);

struct RunConfig {
  int n_agents = 4;
  std::size_t grid_per_axis = 20;
  int iterations = 30;
  int warmup_per_agent = 5;
  BetaSchedule beta;
  AcqConfig acq;
  BarycenterConfig barycenter;
  ObjectiveSpec objective;
  KernelSpec kernel;
  std::uint64_t seed = 0;
  Framework framework = Framework::cokg;

  /// Rejects counts below their minimum; warm-up needs two points per agent
  /// for the noise estimate.
  void validate() const;
  Grid grid() const { return Grid::uniform(objective.dim(), grid_per_axis); }
  bool operator==(const RunConfig&) const = default;
};

struct IterationRecord {
  int t = 0;
  JointDecision chosen;
  std::vector<double> observed;  // y per agent
  double beta_t = 0.0;
  double acquisition_value = 0.0;
  // Absent when the framework builds no central model.
  std::optional<double> barycenter_residual;
  std::optional<int> barycenter_iterations;
  bool barycenter_converged = true;
  double optimal_value_difference = 0.0;  // from the posteriors after this iteration
  double wall_ms = 0.0;
};

struct AgentReport {
  std::size_t index = 0;  // grid argmax of the agent's posterior mean
  Point x;
  double mu = 0.0;
};

struct Finalization {
  std::vector<AgentReport> agents;
  std::size_t best_agent = 0;
  std::size_t best_index = 0;
  Point best_point;
  double optimal_value_difference = 0.0;
};

struct RunResult {
  std::vector<IterationRecord> records;
  Finalization report;
  double noise_var = 0.0;
  std::vector<double> noise_estimates;        // per-agent MLE after warm-up
  std::vector<double> warmup_max_variance;    // per agent, over the grid
  std::vector<double> final_max_variance;
  std::vector<std::size_t> dataset_sizes;
  std::vector<std::string> warnings;
  double total_wall_ms = 0.0;
};

struct WarmupState {
  std::vector<LocalAgent> agents;
  std::vector<double> noise_estimates;
  double noise_var = 0.0;
  std::vector<Rng> noise_streams;  // per-agent observation noise, continued by the loop
};

/// Each agent draws warmup_per_agent distinct grid points from its own
/// stream and observes them privately.
WarmupState warmup(const RunConfig& cfg, const Objective& objective, const Grid& grid);

/// x_n* = grid argmax of each posterior mean (smallest index on ties); the
/// reported point comes from the agent with the largest mu_n*.
Finalization finalize(std::span<const LocalAgent> agents, const Grid& grid, const Vector& objective_values);
Finalization finalize(std::span<const LocalAgent> agents, const Grid& grid, const Objective& objective);

struct Selection {
  JointDecision decision;
  double acquisition_value = 0.0;
  std::optional<double> barycenter_residual;
  std::optional<int> barycenter_iterations;
  bool barycenter_converged = true;
};

/// Server side of the loop. It only ever sees discretized posteriors and the
/// scalar noise variance; no member accepts observations.
class Server {
 public:
  Server(BarycenterConfig barycenter, AcqConfig acq, double noise_var);
  static Server from_noise_estimates(BarycenterConfig barycenter, AcqConfig acq,
                                     std::span<const double> estimates);

  double noise_var() const { return noise_var_; }

  CentralGP fuse(std::span<const DiscretizedGP> models) const;

  /// Frameworks cokg, barycenter_qkg and no_collaboration.
  Selection select(Framework framework, std::span<const DiscretizedGP> models, double beta,
                   const FantasyDraws& draws, std::uint64_t restart_seed) const;

 private:
  BarycenterConfig barycenter_;
  AcqConfig acq_;
  double noise_var_;
};

/// Data-communication baseline: fits one GP to the union of every agent's
/// raw data. This deliberately bypasses the privacy boundary.
Selection select_with_pooled_data(std::span<const LocalAgent> agents, const Grid& grid, double noise_var,
                                  const AcqConfig& acq, const FantasyDraws& draws, std::uint64_t restart_seed);

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Runs warm-up, cfg.iterations iterations and finalization. Deterministic
/// given cfg (wall times aside).
RunResult run(const RunConfig& cfg, const IterationCallback& on_iteration = {});

struct RepetitionSummary {
  std::vector<RunResult> runs;
  std::vector<double> mean;    // per iteration, optimal value difference
  std::vector<double> stddev;  // population standard deviation
};

/// Seed of repetition `rep` derived from the base seed; shared by all
/// frameworks so repetitions pair up across them.
std::uint64_t repetition_seed(std::uint64_t base, int rep);

RepetitionSummary run_repetitions(const RunConfig& cfg, int reps);

}  // namespace cobo
