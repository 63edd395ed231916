#pragma once

// Experiment files, the multi-run executor and CSV outputs.
//
// An experiment file is JSON. Run settings at the top level form the shared
// defaults; "experiments" lists named runs and "groups" expand one varied
// setting into several runs named "<group>/<value>". A file with neither
// list runs its defaults once as the experiment "default".

#include "cobo/orchestrator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cobo {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentSpec {
  std::string name;
  RunConfig config;
  int reps = 10;

  bool operator==(const ExperimentSpec&) const = default;
};

struct ExperimentFile {
  std::vector<ExperimentSpec> experiments;
  std::filesystem::path output_dir = "results";
  std::uint64_t seed = 0;

  /// Sets the base seed of every experiment.
  void set_seed(std::uint64_t s);
  bool operator==(const ExperimentFile&) const = default;
};

/// Throws ConfigError on malformed JSON, unknown keys (naming the key),
/// unknown ids and invalid values.
ExperimentFile parse_config(std::string_view text);
ExperimentFile load_config(const std::filesystem::path& path);

/// Expanded form: every experiment listed with every setting spelled out.
std::string serialize_config(const ExperimentFile& file);

struct MetricsRow {
  std::string experiment;
  int rep = 0;
  int iteration = 0;
  double optimal_value_difference = 0.0;
  double beta_t = 0.0;
  double acquisition_value = 0.0;
  std::optional<double> barycenter_residual;
  std::optional<int> barycenter_iterations;

  bool operator==(const MetricsRow&) const = default;
};

struct TimingRow {
  std::string experiment;
  int rep = 0;
  int iteration = 0;
  double wall_ms = 0.0;
};

struct SummaryRow {
  std::string experiment;
  int iteration = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  int count = 0;
};

struct CellError {
  std::string experiment;
  int rep = 0;
  std::string message;
};

inline constexpr std::string_view kMetricsHeader =
    "experiment,rep,iteration,optimal_value_difference,beta_t,acquisition_value,"
    "barycenter_residual,barycenter_iterations";
inline constexpr std::string_view kTimingHeader = "experiment,rep,iteration,wall_ms";
inline constexpr std::string_view kSummaryHeader = "experiment,iteration,mean,std,count";
inline constexpr std::string_view kPlotHeader = "experiment,iteration,mean,lower,upper";
inline constexpr std::string_view kErrorsHeader = "experiment,rep,message";

/// printf "%.17g": enough digits to round-trip every double.
std::string format_double(double v);

std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string timing_csv(const std::vector<TimingRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);
/// mean with a one-standard-deviation band, one series per experiment.
std::string plot_csv(const std::vector<SummaryRow>& rows);
std::string errors_csv(const std::vector<CellError>& rows);

/// Throws std::runtime_error on a header or field mismatch.
std::vector<MetricsRow> parse_metrics_csv(std::string_view text);
std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

/// Groups by (experiment, iteration); experiments keep first-seen order.
std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows);
std::vector<SummaryRow> summarize(const std::filesystem::path& metrics_path);

std::vector<MetricsRow> metrics_rows(const std::string& experiment, int rep, const RunResult& result);

struct ExperimentOutcome {
  std::vector<MetricsRow> metrics;
  std::vector<TimingRow> timing;
  std::vector<SummaryRow> summary;
  std::vector<CellError> errors;
  std::vector<std::string> warnings;

  int exit_code() const { return errors.empty() ? 0 : 1; }
};

/// Runs every (experiment, rep) cell with up to `parallelism` concurrent
/// cells. Results are gathered in cell order, so file contents do not depend
/// on parallelism (timing.csv aside).
ExperimentOutcome run_experiments(const ExperimentFile& file, int parallelism);

/// Writes metrics.csv, timing.csv, summary.csv, plot_data.csv and errors.csv.
void write_outputs(const ExperimentOutcome& outcome, const std::filesystem::path& dir);

struct GridTiming {
  std::size_t per_axis = 0;
  std::size_t points = 0;
  double median_ms = 0.0;
  std::vector<double> iteration_ms;
};

/// Median per-iteration wall time of a Co-KG run at each grid resolution.
std::vector<GridTiming> bench_grid(const std::vector<std::size_t>& per_axis, int iterations, std::uint64_t seed);

}  // namespace cobo
