#include "cobo/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cobo {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t line_no, const char* column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw std::runtime_error("metrics line " + std::to_string(line_no) + ": bad " + column + " \"" +
                             std::string(field) + "\"");
  return value;
}

std::string join_line(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += f;
    first = false;
  }
  out += '\n';
  return out;
}

// Error messages may contain separators; quote them per RFC 4180.
std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' || c == '\r' ? ' ' : c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += join_line({r.experiment, std::to_string(r.rep), std::to_string(r.iteration),
                      format_double(r.optimal_value_difference), format_double(r.beta_t),
                      format_double(r.acquisition_value),
                      r.barycenter_residual ? format_double(*r.barycenter_residual) : std::string(),
                      r.barycenter_iterations ? std::to_string(*r.barycenter_iterations) : std::string()});
  }
  return out;
}

std::string timing_csv(const std::vector<TimingRow>& rows) {
  std::string out(kTimingHeader);
  out += '\n';
  for (const auto& r : rows)
    out += join_line({r.experiment, std::to_string(r.rep), std::to_string(r.iteration), format_double(r.wall_ms)});
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out(kSummaryHeader);
  out += '\n';
  for (const auto& r : rows)
    out += join_line({r.experiment, std::to_string(r.iteration), format_double(r.mean), format_double(r.stddev),
                      std::to_string(r.count)});
  return out;
}

std::string plot_csv(const std::vector<SummaryRow>& rows) {
  std::string out(kPlotHeader);
  out += '\n';
  for (const auto& r : rows)
    out += join_line({r.experiment, std::to_string(r.iteration), format_double(r.mean),
                      format_double(r.mean - r.stddev), format_double(r.mean + r.stddev)});
  return out;
}

std::string errors_csv(const std::vector<CellError>& rows) {
  std::string out(kErrorsHeader);
  out += '\n';
  for (const auto& r : rows) out += join_line({r.experiment, std::to_string(r.rep), quote(r.message)});
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kMetricsHeader)
    throw std::runtime_error("metrics file does not start with the expected header: " + std::string(kMetricsHeader));
  std::vector<MetricsRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 8)
      throw std::runtime_error("metrics line " + std::to_string(i + 1) + ": expected 8 fields, got " +
                               std::to_string(f.size()));
    MetricsRow r;
    r.experiment = std::string(f[0]);
    r.rep = parse_number<int>(f[1], i + 1, "rep");
    r.iteration = parse_number<int>(f[2], i + 1, "iteration");
    r.optimal_value_difference = parse_number<double>(f[3], i + 1, "optimal_value_difference");
    r.beta_t = parse_number<double>(f[4], i + 1, "beta_t");
    r.acquisition_value = parse_number<double>(f[5], i + 1, "acquisition_value");
    if (!f[6].empty()) r.barycenter_residual = parse_number<double>(f[6], i + 1, "barycenter_residual");
    if (!f[7].empty()) r.barycenter_iterations = parse_number<int>(f[7], i + 1, "barycenter_iterations");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_metrics_csv(buf.str());
}

std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::map<int, std::vector<double>>> groups;
  for (const auto& r : rows) {
    auto [it, inserted] = groups.try_emplace(r.experiment);
    if (inserted) order.push_back(r.experiment);
    it->second[r.iteration].push_back(r.optimal_value_difference);
  }
  std::vector<SummaryRow> out;
  for (const auto& name : order) {
    for (const auto& [iteration, values] : groups[name]) {
      const double n = static_cast<double>(values.size());
      double sum = 0.0;
      for (double v : values) sum += v;
      const double mean = sum / n;
      double sq = 0.0;
      for (double v : values) sq += (v - mean) * (v - mean);
      out.push_back({name, iteration, mean, std::sqrt(sq / n), static_cast<int>(values.size())});
    }
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::filesystem::path& metrics_path) {
  return summarize(read_metrics(metrics_path));
}

}  // namespace cobo
