#include "cobo/experiment.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cobo {

namespace {

using nlohmann::json;

const std::set<std::string> kRunKeys = {"objective",        "n_agents", "grid_per_axis", "iterations",
                                        "warmup_per_agent", "beta",     "framework",     "kernel",
                                        "acquisition",      "barycenter", "reps"};
const std::set<std::string> kObjectiveKeys = {"id", "box", "noise_var", "command", "direction", "timeout_s"};
const std::set<std::string> kKernelKeys = {"lengthscale_sq", "amplitude"};
const std::set<std::string> kAcqKeys = {"samples", "restarts", "exhaustive_threshold", "antithetic"};
const std::set<std::string> kBarycenterKeys = {"tol", "max_iter", "jitter", "subspace_tol"};

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key \"" + key + "\" in " + where);
  }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for \"" + key + "\" in " + where + ": " + e.what());
  }
}

int get_count(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("\"" + key + "\" in " + where + " must be an integer");
  return v.get<int>();
}

std::string get_id(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError("\"" + key + "\" in " + where + " must be a string");
  return v.get<std::string>();
}

// Objectives may be written as a bare id; settings are merged as objects.
json normalize_run(json run) {
  if (run.contains("objective") && run["objective"].is_string()) run["objective"] = json{{"id", run["objective"]}};
  return run;
}

json merge(json base, const json& over) {
  for (const auto& [key, value] : over.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object()) {
      base[key] = merge(base[key], value);
    } else {
      base[key] = value;
    }
  }
  return base;
}

template <class F>
void rethrow_as_config(const std::string& where, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void apply_objective(const json& j, ObjectiveSpec& spec, const std::string& where) {
  check_keys(j, kObjectiveKeys, where);
  rethrow_as_config(where, [&] {
    if (j.contains("id")) spec.id = parse_objective_id(get_id(j, "id", where));
    if (j.contains("box")) {
      const json& box = j["box"];
      if (!box.is_array() || box.empty()) throw ConfigError("\"box\" in " + where + " must be a non-empty array");
      spec.box.clear();
      for (const auto& iv : box) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
          throw ConfigError("every \"box\" entry in " + where + " must be [lower, upper]");
        spec.box.push_back({iv[0].get<double>(), iv[1].get<double>()});
      }
    }
    if (j.contains("noise_var")) spec.noise_var = get<double>(j, "noise_var", where);
    if (j.contains("command")) spec.external.command = get<std::string>(j, "command", where);
    if (j.contains("direction")) spec.external.direction = parse_direction(get_id(j, "direction", where));
    if (j.contains("timeout_s")) {
      const double s = get<double>(j, "timeout_s", where);
      if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("\"timeout_s\" in " + where + " must be positive");
      spec.external.timeout = std::chrono::milliseconds(std::llround(s * 1000.0));
    }
  });
}

void apply_run(const json& j, RunConfig& cfg, int& reps, const std::string& where) {
  check_keys(j, kRunKeys, where);
  rethrow_as_config(where, [&] {
    if (j.contains("objective")) apply_objective(j["objective"], cfg.objective, where + ".objective");
    if (j.contains("n_agents")) cfg.n_agents = get_count(j, "n_agents", where);
    if (j.contains("grid_per_axis")) {
      const int r = get_count(j, "grid_per_axis", where);
      if (r < 1) throw ConfigError("\"grid_per_axis\" in " + where + " must be >= 1");
      cfg.grid_per_axis = static_cast<std::size_t>(r);
    }
    if (j.contains("iterations")) cfg.iterations = get_count(j, "iterations", where);
    if (j.contains("warmup_per_agent")) cfg.warmup_per_agent = get_count(j, "warmup_per_agent", where);
    if (j.contains("beta")) cfg.beta = BetaSchedule(parse_beta_kind(get_id(j, "beta", where)));
    if (j.contains("framework")) cfg.framework = parse_framework(get_id(j, "framework", where));
    if (j.contains("reps")) reps = get_count(j, "reps", where);
    if (j.contains("kernel")) {
      const json& k = j["kernel"];
      check_keys(k, kKernelKeys, where + ".kernel");
      if (k.contains("lengthscale_sq")) cfg.kernel.lengthscale_sq = get<double>(k, "lengthscale_sq", where);
      if (k.contains("amplitude")) cfg.kernel.amplitude = get<double>(k, "amplitude", where);
    }
    if (j.contains("acquisition")) {
      const json& a = j["acquisition"];
      check_keys(a, kAcqKeys, where + ".acquisition");
      if (a.contains("samples")) cfg.acq.samples = get_count(a, "samples", where);
      if (a.contains("restarts")) cfg.acq.restarts = get_count(a, "restarts", where);
      if (a.contains("exhaustive_threshold"))
        cfg.acq.exhaustive_threshold = get<std::uint64_t>(a, "exhaustive_threshold", where);
      if (a.contains("antithetic")) cfg.acq.antithetic = get<bool>(a, "antithetic", where);
    }
    if (j.contains("barycenter")) {
      const json& b = j["barycenter"];
      check_keys(b, kBarycenterKeys, where + ".barycenter");
      if (b.contains("tol")) cfg.barycenter.tol = get<double>(b, "tol", where);
      if (b.contains("max_iter")) cfg.barycenter.max_iter = get_count(b, "max_iter", where);
      if (b.contains("jitter")) cfg.barycenter.jitter = get<double>(b, "jitter", where);
      if (b.contains("subspace_tol")) cfg.barycenter.subspace_tol = get<double>(b, "subspace_tol", where);
    }
  });
}

ExperimentSpec build_experiment(const std::string& name, const json& settings, std::uint64_t seed) {
  if (name.empty()) throw ConfigError("experiment names must be non-empty");
  if (name.find_first_of(",\"\n\r") != std::string::npos)
    throw ConfigError("experiment name \"" + name + "\" contains a comma, quote or newline");
  ExperimentSpec spec;
  spec.name = name;
  const std::string where = "experiment \"" + name + "\"";
  apply_run(settings, spec.config, spec.reps, where);
  spec.config.seed = seed;
  if (spec.reps < 1) throw ConfigError(where + ": reps must be >= 1");
  rethrow_as_config(where, [&] { spec.config.validate(); });
  return spec;
}

// "a.b" = v  ->  {"a": {"b": v}}
json nested_setting(const std::string& path, const json& value) {
  const auto dot = path.find('.');
  if (dot == std::string::npos) return json{{path, value}};
  return json{{path.substr(0, dot), nested_setting(path.substr(dot + 1), value)}};
}

std::string label(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

json objective_json(const ObjectiveSpec& o) {
  json box = json::array();
  for (const auto& iv : o.box) box.push_back({iv.lower, iv.upper});
  return json{{"id", to_string(o.id)},
              {"box", box},
              {"noise_var", o.noise_var},
              {"command", o.external.command},
              {"direction", to_string(o.external.direction)},
              {"timeout_s", static_cast<double>(o.external.timeout.count()) / 1000.0}};
}

}  // namespace

void ExperimentFile::set_seed(std::uint64_t s) {
  seed = s;
  for (auto& e : experiments) e.config.seed = s;
}

ExperimentFile parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "the config file");

  std::set<std::string> top_keys = kRunKeys;
  top_keys.insert({"output_dir", "seed", "experiments", "groups"});
  check_keys(root, top_keys, "the config file");

  ExperimentFile file;
  if (root.contains("output_dir")) file.output_dir = get<std::string>(root, "output_dir", "the config file");
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() || (root["seed"].is_number_integer() && !root["seed"].is_number_unsigned()))
      throw ConfigError("\"seed\" must be a non-negative integer");
    file.seed = root["seed"].get<std::uint64_t>();
  }

  json defaults = json::object();
  for (const auto& key : kRunKeys)
    if (root.contains(key)) defaults[key] = root[key];
  defaults = normalize_run(defaults);
  // Validate the defaults on their own so a bad key is reported once.
  {
    RunConfig probe;
    int reps = 10;
    apply_run(defaults, probe, reps, "the config file");
  }

  std::set<std::string> names;
  auto add = [&](const std::string& name, const json& settings) {
    if (!names.insert(name).second) throw ConfigError("duplicate experiment name \"" + name + "\"");
    file.experiments.push_back(build_experiment(name, merge(defaults, normalize_run(settings)), file.seed));
  };

  const bool listed = root.contains("experiments") || root.contains("groups");
  if (root.contains("experiments")) {
    const json& list = root["experiments"];
    if (!list.is_array()) throw ConfigError("\"experiments\" must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "experiments[" + std::to_string(i) + "]";
      json entry = list[i];
      require_object(entry, where);
      if (!entry.contains("name") || !entry["name"].is_string())
        throw ConfigError(where + " needs a string \"name\"");
      const std::string name = entry["name"].get<std::string>();
      entry.erase("name");
      check_keys(entry, kRunKeys, where);
      add(name, entry);
    }
  }
  if (root.contains("groups")) {
    const json& groups = root["groups"];
    if (!groups.is_array()) throw ConfigError("\"groups\" must be an array");
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const std::string where = "groups[" + std::to_string(i) + "]";
      const json& g = groups[i];
      check_keys(g, {"name", "base", "vary"}, where);
      if (!g.contains("name") || !g["name"].is_string()) throw ConfigError(where + " needs a string \"name\"");
      if (!g.contains("vary") || !g["vary"].is_object() || g["vary"].size() != 1)
        throw ConfigError(where + " needs \"vary\" with exactly one setting");
      const std::string group = g["name"].get<std::string>();
      const json base = g.contains("base") ? normalize_run(g["base"]) : json::object();
      check_keys(base, kRunKeys, where + ".base");
      const auto& [path, values] = *g["vary"].items().begin();
      if (!kRunKeys.contains(path.substr(0, path.find('.'))))
        throw ConfigError("unknown key \"" + path + "\" in " + where + ".vary");
      if (!values.is_array() || values.empty())
        throw ConfigError(where + ".vary." + path + " must be a non-empty array");
      for (const auto& v : values) {
        const json setting = normalize_run(nested_setting(path, v));
        add(group + "/" + label(v), merge(base, setting));
      }
    }
  }
  if (!listed) add("default", json::object());
  return file;
}

ExperimentFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentFile& file) {
  json root;
  root["output_dir"] = file.output_dir.string();
  root["seed"] = file.seed;
  json list = json::array();
  for (const auto& e : file.experiments) {
    const RunConfig& c = e.config;
    list.push_back(json{
        {"name", e.name},
        {"reps", e.reps},
        {"objective", objective_json(c.objective)},
        {"n_agents", c.n_agents},
        {"grid_per_axis", c.grid_per_axis},
        {"iterations", c.iterations},
        {"warmup_per_agent", c.warmup_per_agent},
        {"beta", to_string(c.beta.kind())},
        {"framework", to_string(c.framework)},
        {"kernel", {{"lengthscale_sq", c.kernel.lengthscale_sq}, {"amplitude", c.kernel.amplitude}}},
        {"acquisition",
         {{"samples", c.acq.samples},
          {"restarts", c.acq.restarts},
          {"exhaustive_threshold", c.acq.exhaustive_threshold},
          {"antithetic", c.acq.antithetic}}},
        {"barycenter",
         {{"tol", c.barycenter.tol},
          {"max_iter", c.barycenter.max_iter},
          {"jitter", c.barycenter.jitter},
          {"subspace_tol", c.barycenter.subspace_tol}}},
    });
  }
  root["experiments"] = list;
  return root.dump(2) + "\n";
}

std::vector<MetricsRow> metrics_rows(const std::string& experiment, int rep, const RunResult& result) {
  std::vector<MetricsRow> rows;
  rows.reserve(result.records.size());
  for (const auto& r : result.records) {
    rows.push_back({experiment, rep, r.t, r.optimal_value_difference, r.beta_t, r.acquisition_value,
                    r.barycenter_residual, r.barycenter_iterations});
  }
  return rows;
}

ExperimentOutcome run_experiments(const ExperimentFile& file, int parallelism) {
  struct Cell {
    const ExperimentSpec* spec;
    int rep;
  };
  std::vector<Cell> cells;
  for (const auto& e : file.experiments)
    for (int r = 0; r < e.reps; ++r) cells.push_back({&e, r});

  struct CellResult {
    std::optional<RunResult> run;
    std::string error;
  };
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::clamp(parallelism, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));

  auto work = [&] {
#ifdef _OPENMP
    // Cells already saturate the cores; nested kernel threads only contend.
    if (workers > 1) omp_set_num_threads(1);
#endif
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        RunConfig cfg = cells[i].spec->config;
        cfg.seed = repetition_seed(cfg.seed, cells[i].rep);
        results[i].run = run(cfg);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  ExperimentOutcome out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string& name = cells[i].spec->name;
    const int rep = cells[i].rep;
    if (!results[i].run) {
      out.errors.push_back({name, rep, results[i].error});
      continue;
    }
    const RunResult& r = *results[i].run;
    auto rows = metrics_rows(name, rep, r);
    out.metrics.insert(out.metrics.end(), rows.begin(), rows.end());
    for (const auto& rec : r.records) out.timing.push_back({name, rep, rec.t, rec.wall_ms});
    for (const auto& w : r.warnings) out.warnings.push_back(name + " rep " + std::to_string(rep) + ": " + w);
  }
  out.summary = summarize(out.metrics);
  return out;
}

void write_outputs(const ExperimentOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
  };
  write("metrics.csv", metrics_csv(outcome.metrics));
  write("timing.csv", timing_csv(outcome.timing));
  write("summary.csv", summary_csv(outcome.summary));
  write("plot_data.csv", plot_csv(outcome.summary));
  write("errors.csv", errors_csv(outcome.errors));
}

std::vector<GridTiming> bench_grid(const std::vector<std::size_t>& per_axis, int iterations, std::uint64_t seed) {
  if (iterations < 1) throw std::invalid_argument("bench_grid needs at least one iteration");
  std::vector<GridTiming> out;
  for (std::size_t r : per_axis) {
    RunConfig cfg;
    cfg.grid_per_axis = r;
    cfg.iterations = iterations;
    cfg.seed = seed;
    const RunResult result = run(cfg);
    GridTiming g;
    g.per_axis = r;
    g.points = r * r;
    for (const auto& rec : result.records) g.iteration_ms.push_back(rec.wall_ms);
    std::vector<double> sorted = g.iteration_ms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    g.median_ms = k % 2 == 1 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace cobo
