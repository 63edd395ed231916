#include "cobo/orchestrator.hpp"

#include "cobo/rng.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cobo {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<DiscretizedGP> discretize_all(std::span<const LocalAgent> agents, const Grid& grid) {
  std::vector<DiscretizedGP> models;
  models.reserve(agents.size());
  for (const auto& a : agents) models.push_back(discretize(a, grid));
  return models;
}

std::vector<double> max_variances(std::span<const LocalAgent> agents, const Grid& grid) {
  std::vector<double> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(posterior_variance_on_grid(a, grid).maxCoeff());
  return out;
}

// Distinct indices in [0, d) by a partial Fisher-Yates shuffle.
std::vector<std::size_t> sample_without_replacement(std::size_t d, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(d);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, d - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

std::string_view to_string(Framework f) {
  switch (f) {
    case Framework::cokg:
      return "cokg";
    case Framework::barycenter_qkg:
      return "barycenter_qkg";
    case Framework::no_collaboration:
      return "no_collaboration";
    case Framework::data_communication:
      return "data_communication";
  }
  return "unknown";
}

Framework parse_framework(std::string_view name) {
  if (name == "cokg") return Framework::cokg;
  if (name == "barycenter_qkg") return Framework::barycenter_qkg;
  if (name == "no_collaboration") return Framework::no_collaboration;
  if (name == "data_communication") return Framework::data_communication;
  throw std::invalid_argument("unknown framework \"" + std::string(name) + "\"");
}

void RunConfig::validate() const {
  if (n_agents < 1) throw std::invalid_argument("n_agents must be >= 1");
  if (grid_per_axis < 1) throw std::invalid_argument("grid_per_axis must be >= 1");
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (warmup_per_agent < 2)
    throw std::invalid_argument("warmup_per_agent must be >= 2 to estimate the noise variance (got " +
                                std::to_string(warmup_per_agent) + ")");
  acq.validate();
  barycenter.validate();
  objective.validate();
  kernel.validate();
  std::size_t d = 1;
  for (std::size_t k = 0; k < objective.dim(); ++k) d *= grid_per_axis;
  if (static_cast<std::size_t>(warmup_per_agent) > d)
    throw std::invalid_argument("warmup_per_agent exceeds the number of grid points");
}

WarmupState warmup(const RunConfig& cfg, const Objective& objective, const Grid& grid) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_agents);
  std::vector<std::vector<Observation>> data(n);
  WarmupState out;
  out.noise_estimates.reserve(n);
  out.noise_streams.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    Rng points(derive_seed(cfg.seed, Stream::warmup_points, a));
    Rng& noise = out.noise_streams.emplace_back(derive_seed(cfg.seed, Stream::observation_noise, a));
    for (std::size_t idx :
         sample_without_replacement(grid.size(), static_cast<std::size_t>(cfg.warmup_per_agent), points)) {
      Point x = grid.point(idx);
      const double y = noisy_observe(objective, x, noise);
      data[a].push_back({std::move(x), y});
    }
    out.noise_estimates.push_back(mle_noise_variance(data[a], cfg.kernel));
  }
  out.noise_var = server_noise_variance(out.noise_estimates);
  out.agents.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    out.agents.emplace_back(static_cast<int>(a), cfg.kernel, out.noise_var);
    out.agents.back().observe_all(data[a]);
  }
  return out;
}

Finalization finalize(std::span<const LocalAgent> agents, const Grid& grid, const Vector& objective_values) {
  if (agents.empty()) throw std::invalid_argument("finalize: no agents");
  if (static_cast<std::size_t>(objective_values.size()) != grid.size())
    throw DimensionError("finalize: objective values do not match the grid");
  Finalization out;
  for (const auto& a : agents) {
    if (a.size() == 0) throw std::invalid_argument("finalize: agent without data");
    const Vector mu = posterior_mean_on_grid(a, grid);
    Eigen::Index idx = 0;
    for (Eigen::Index i = 1; i < mu.size(); ++i)
      if (mu(i) > mu(idx)) idx = i;
    out.agents.push_back({static_cast<std::size_t>(idx), grid.point(static_cast<std::size_t>(idx)), mu(idx)});
  }
  for (std::size_t n = 1; n < out.agents.size(); ++n)
    if (out.agents[n].mu > out.agents[out.best_agent].mu) out.best_agent = n;
  out.best_index = out.agents[out.best_agent].index;
  out.best_point = out.agents[out.best_agent].x;
  out.optimal_value_difference =
      objective_values.maxCoeff() - objective_values(static_cast<Eigen::Index>(out.best_index));
  return out;
}

Finalization finalize(std::span<const LocalAgent> agents, const Grid& grid, const Objective& objective) {
  return finalize(agents, grid, objective_on_grid(objective, grid));
}

Server::Server(BarycenterConfig barycenter, AcqConfig acq, double noise_var)
    : barycenter_(barycenter), acq_(acq), noise_var_(noise_var) {
  barycenter_.validate();
  acq_.validate();
  if (!(noise_var_ >= 0.0)) throw std::invalid_argument("server noise variance must be non-negative");
}

Server Server::from_noise_estimates(BarycenterConfig barycenter, AcqConfig acq, std::span<const double> estimates) {
  return Server(barycenter, acq, server_noise_variance(estimates));
}

CentralGP Server::fuse(std::span<const DiscretizedGP> models) const { return barycenter(models, barycenter_); }

Selection Server::select(Framework framework, std::span<const DiscretizedGP> models, double beta,
                         const FantasyDraws& draws, std::uint64_t restart_seed) const {
  Selection out;
  switch (framework) {
    case Framework::cokg:
    case Framework::barycenter_qkg: {
      const CentralGP central = fuse(models);
      out.barycenter_residual = central.residual;
      out.barycenter_iterations = central.iterations_used;
      out.barycenter_converged = central.converged;
      const AcqResult r = framework == Framework::cokg
                              ? optimize_cokg(central.model, models, beta, acq_, draws, noise_var_, restart_seed)
                              : select_barycenter_qkg(central.model, models, acq_, draws, noise_var_, restart_seed);
      out.decision = r.best;
      out.acquisition_value = r.value;
      return out;
    }
    case Framework::no_collaboration: {
      const AcqResult r = select_no_collaboration(models, draws, noise_var_);
      out.decision = r.best;
      out.acquisition_value = r.value;
      return out;
    }
    case Framework::data_communication:
      break;
  }
  throw std::invalid_argument("the server cannot run the data_communication baseline; it needs raw data");
}

Selection select_with_pooled_data(std::span<const LocalAgent> agents, const Grid& grid, double noise_var,
                                  const AcqConfig& acq, const FantasyDraws& draws, std::uint64_t restart_seed) {
  if (agents.empty()) throw std::invalid_argument("select_with_pooled_data: no agents");
  LocalAgent pooled(-1, agents.front().kernel(), noise_var);
  std::vector<Observation> all;
  for (const auto& a : agents) all.insert(all.end(), a.data().begin(), a.data().end());
  if (!all.empty()) pooled.observe_all(all);
  const AcqResult r =
      select_data_communication(discretize(pooled, grid), agents.size(), acq, draws, noise_var, restart_seed);
  Selection out;
  out.decision = r.best;
  out.acquisition_value = r.value;
  return out;
}

RunResult run(const RunConfig& cfg, const IterationCallback& on_iteration) {
  const auto run_start = Clock::now();
  cfg.validate();
  const Objective objective(cfg.objective);
  const Grid grid = cfg.grid();
  const Vector f_grid = objective_on_grid(objective, grid);

  WarmupState state = warmup(cfg, objective, grid);
  std::vector<LocalAgent>& agents = state.agents;
  const auto n = static_cast<std::size_t>(cfg.n_agents);
  std::vector<Rng>& noise_streams = state.noise_streams;

  RunResult result;
  result.noise_var = state.noise_var;
  result.noise_estimates = state.noise_estimates;
  result.warmup_max_variance = max_variances(agents, grid);

  const Server server(cfg.barycenter, cfg.acq, state.noise_var);
  for (int t = 1; t <= cfg.iterations; ++t) {
    const auto start = Clock::now();
    IterationRecord rec;
    rec.t = t;
    rec.beta_t = cfg.beta.value(t);

    const auto ut = static_cast<std::uint64_t>(t);
    const FantasyDraws draws = FantasyDraws::generate(cfg.acq.samples, cfg.n_agents,
                                                      derive_seed(cfg.seed, Stream::fantasy_draws, ut),
                                                      cfg.acq.antithetic);
    const std::uint64_t restart_seed = derive_seed(cfg.seed, Stream::restarts, ut);

    Selection sel;
    if (cfg.framework == Framework::data_communication) {
      sel = select_with_pooled_data(agents, grid, state.noise_var, cfg.acq, draws, restart_seed);
    } else {
      const std::vector<DiscretizedGP> models = discretize_all(agents, grid);
      sel = server.select(cfg.framework, models, rec.beta_t, draws, restart_seed);
    }
    rec.chosen = sel.decision;
    rec.acquisition_value = sel.acquisition_value;
    rec.barycenter_residual = sel.barycenter_residual;
    rec.barycenter_iterations = sel.barycenter_iterations;
    rec.barycenter_converged = sel.barycenter_converged;
    if (!sel.barycenter_converged) {
      std::ostringstream msg;
      msg << "iteration " << t << ": barycenter stopped at residual " << *sel.barycenter_residual
          << " after " << *sel.barycenter_iterations << " iterations";
      result.warnings.push_back(msg.str());
    }

    for (std::size_t a = 0; a < n; ++a) {
      Point x = grid.point(rec.chosen.indices[a]);
      const double y = noisy_observe(objective, x, noise_streams[a]);
      rec.observed.push_back(y);
      agents[a].observe({std::move(x), y});
    }

    rec.optimal_value_difference = finalize(agents, grid, f_grid).optimal_value_difference;
    rec.wall_ms = elapsed_ms(start);
    if (on_iteration) on_iteration(rec);
    result.records.push_back(std::move(rec));
  }

  result.report = finalize(agents, grid, f_grid);
  result.final_max_variance = max_variances(agents, grid);
  for (const auto& a : agents) result.dataset_sizes.push_back(a.size());
  result.total_wall_ms = elapsed_ms(run_start);
  return result;
}

std::uint64_t repetition_seed(std::uint64_t base, int rep) {
  return derive_seed(base, Stream::repetition, static_cast<std::uint64_t>(rep));
}

RepetitionSummary run_repetitions(const RunConfig& cfg, int reps) {
  if (reps < 1) throw std::invalid_argument("run_repetitions needs reps >= 1");
  RepetitionSummary out;
  for (int r = 0; r < reps; ++r) {
    RunConfig c = cfg;
    c.seed = repetition_seed(cfg.seed, r);
    out.runs.push_back(run(c));
  }
  const auto iters = static_cast<std::size_t>(cfg.iterations);
  out.mean.assign(iters, 0.0);
  out.stddev.assign(iters, 0.0);
  const double count = reps;
  for (std::size_t i = 0; i < iters; ++i) {
    double sum = 0.0;
    for (const auto& run : out.runs) sum += run.records[i].optimal_value_difference;
    const double mean = sum / count;
    double sq = 0.0;
    for (const auto& run : out.runs) {
      const double dev = run.records[i].optimal_value_difference - mean;
      sq += dev * dev;
    }
    out.mean[i] = mean;
    out.stddev[i] = std::sqrt(sq / count);
  }
  return out;
}

}  // namespace cobo
