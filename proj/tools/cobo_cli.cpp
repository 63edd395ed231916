// cobo: run collaborative Bayesian optimization experiments.

#include "cobo/experiment.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

constexpr int kOk = 0;
constexpr int kCellFailure = 1;
constexpr int kUsage = 2;

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("COBO_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long s = std::stoull(v, &used, 10);
    if (used != std::string(v).size()) throw std::invalid_argument("trailing characters");
    return s;
  } catch (const std::exception&) {
    throw cobo::ConfigError(std::string("COBO_SEED is not a non-negative integer: ") + v);
  }
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, int parallelism,
            const std::string& out_dir) {
  cobo::ExperimentFile file = cobo::load_config(config_path);
  if (seed) {
    file.set_seed(*seed);
  } else if (auto s = env_seed()) {
    file.set_seed(*s);
  }
  const std::filesystem::path dir = out_dir.empty() ? file.output_dir : std::filesystem::path(out_dir);

  std::size_t cells = 0;
  for (const auto& e : file.experiments) cells += static_cast<std::size_t>(e.reps);
  std::cerr << "running " << file.experiments.size() << " experiment(s), " << cells << " cell(s), seed "
            << file.seed << "\n";

  const cobo::ExperimentOutcome outcome = cobo::run_experiments(file, parallelism);
  cobo::write_outputs(outcome, dir);
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& e : outcome.errors) std::cerr << "error: " << e.experiment << " rep " << e.rep << ": " << e.message << "\n";

  for (const auto& row : outcome.summary) {
    bool last = true;
    for (const auto& other : outcome.summary)
      if (other.experiment == row.experiment && other.iteration > row.iteration) last = false;
    if (last)
      std::cout << row.experiment << ": final optimal value difference " << row.mean << " +/- " << row.stddev
                << " (" << row.count << " reps)\n";
  }
  std::cout << "wrote " << outcome.metrics.size() << " metric rows to " << dir.string() << "\n";
  return outcome.exit_code() == 0 ? kOk : kCellFailure;
}

int cmd_summarize(const std::string& metrics_path) {
  std::cout << cobo::summary_csv(cobo::summarize(std::filesystem::path(metrics_path)));
  return kOk;
}

int cmd_oracle(const std::string& objective, std::size_t grid, const std::string& command) {
  cobo::ObjectiveSpec spec;
  spec.id = cobo::parse_objective_id(objective);
  if (spec.id == cobo::ObjectiveId::external) spec.external.command = command;
  const cobo::Objective obj(spec);
  const cobo::Grid g = cobo::Grid::uniform(obj.dim(), grid);
  const cobo::GridOptimum best = cobo::grid_optimum(obj, g);
  const cobo::Point x = obj.to_native(g.point(best.index));
  std::cout << "index," ;
  for (std::size_t k = 0; k < x.dim(); ++k) std::cout << "x" << k + 1 << ",";
  std::cout << "value\n" << best.index << ",";
  for (std::size_t k = 0; k < x.dim(); ++k) std::cout << cobo::format_double(x[k]) << ",";
  std::cout << cobo::format_double(best.value) << "\n";
  return kOk;
}

int cmd_bench_grid(const std::vector<std::size_t>& sizes, int iterations, std::uint64_t seed) {
  const auto rows = cobo::bench_grid(sizes, iterations, seed);
  std::cout << "per_axis,points,median_ms,ratio_to_previous\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::cout << rows[i].per_axis << "," << rows[i].points << "," << cobo::format_double(rows[i].median_ms) << ",";
    if (i > 0) std::cout << cobo::format_double(rows[i].median_ms / rows[i - 1].median_ms);
    std::cout << "\n";
  }
  return kOk;
}

int cmd_expand(const std::string& config_path) {
  std::cout << cobo::serialize_config(cobo::load_config(config_path));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative Bayesian optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int parallelism = 1;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run every experiment in a config file");
  run->add_option("config", config_path, "Experiment file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Base seed; overrides COBO_SEED and the file");
  run->add_option("--parallelism", parallelism, "Concurrent (experiment, rep) cells")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory; overrides the file");

  std::string metrics_path;
  auto* summarize = app.add_subcommand("summarize", "Per-iteration mean and std of a metrics.csv");
  summarize->add_option("metrics", metrics_path, "metrics.csv")->required()->check(CLI::ExistingFile);

  std::string objective;
  std::size_t grid = 20;
  std::string command;
  auto* oracle = app.add_subcommand("oracle", "Noiseless grid optimum of an objective");
  oracle->add_option("objective", objective, "f1, f2_rosenbrock or external")->required();
  oracle->add_option("--grid", grid, "Points per axis")->check(CLI::PositiveNumber);
  oracle->add_option("--command", command, "Command of an external objective");

  std::vector<std::size_t> sizes{10, 20, 30};
  int iterations = 5;
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench-grid", "Per-iteration time of Co-KG on f1 at several grid sizes");
  bench->add_option("--sizes", sizes, "Points per axis")->delimiter(',');
  bench->add_option("--iterations", iterations, "Iterations per size")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "Seed");

  auto* expand = app.add_subcommand("expand", "Print a config file in expanded form");
  expand->add_option("config", config_path, "Experiment file (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(config_path, seed, parallelism, out_dir);
    if (*summarize) return cmd_summarize(metrics_path);
    if (*oracle) return cmd_oracle(objective, grid, command);
    if (*bench) return cmd_bench_grid(sizes, iterations, bench_seed);
    if (*expand) return cmd_expand(config_path);
  } catch (const cobo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCellFailure;
  }
  return kUsage;
}
