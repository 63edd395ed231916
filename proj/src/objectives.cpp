#include "cobo/objectives.hpp"

#include <cmath>
#include <numbers>

namespace cobo {

namespace {

void require_2d(const Point& x, const char* name) {
  if (x.dim() != 2)
    throw DimensionError(std::string(name) + " is defined on 2 dimensions (got " + std::to_string(x.dim()) + ")");
}

}  // namespace

std::string_view to_string(ObjectiveId id) {
  switch (id) {
    case ObjectiveId::f1:
      return "f1";
    case ObjectiveId::f2_rosenbrock:
      return "f2_rosenbrock";
    case ObjectiveId::external:
      return "external";
  }
  return "unknown";
}

std::string_view to_string(Direction d) { return d == Direction::maximize ? "maximize" : "minimize"; }

ObjectiveId parse_objective_id(std::string_view name) {
  if (name == "f1") return ObjectiveId::f1;
  if (name == "f2_rosenbrock" || name == "f2") return ObjectiveId::f2_rosenbrock;
  if (name == "external") return ObjectiveId::external;
  throw std::invalid_argument("unknown objective \"" + std::string(name) + "\"");
}

Direction parse_direction(std::string_view name) {
  if (name == "maximize") return Direction::maximize;
  if (name == "minimize") return Direction::minimize;
  throw std::invalid_argument("unknown direction \"" + std::string(name) + "\"");
}

void ObjectiveSpec::validate() const {
  if (box.empty()) throw std::invalid_argument("objective box needs at least one axis");
  for (const auto& iv : box) {
    if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper) || !(iv.lower < iv.upper))
      throw std::invalid_argument("objective box intervals must be finite with lower < upper");
  }
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
    throw std::invalid_argument("objective noise_var must be non-negative");
  if (id != ObjectiveId::external && box.size() != 2)
    throw std::invalid_argument(std::string(to_string(id)) + " needs a 2-dimensional box");
  if (id == ObjectiveId::external) {
    if (external.command.empty()) throw std::invalid_argument("external objective needs a command");
    if (external.timeout.count() <= 0) throw std::invalid_argument("external timeout must be positive");
  }
}

double eval_f1(const Point& x) {
  require_2d(x, "f1");
  const double two_pi = 2.0 * std::numbers::pi;
  return x[0] * x[0] + x[1] * x[1] + std::sin(two_pi * x[0]) + std::cos(two_pi * x[1]);
}

double eval_f2(const Point& x) {
  require_2d(x, "f2");
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

Objective::Objective(ObjectiveSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Point Objective::to_native(const Point& unit) const {
  if (unit.dim() != dim()) throw DimensionError("objective: point dimension differs from the box");
  Vector out(unit.coords.size());
  for (std::size_t k = 0; k < dim(); ++k) {
    const auto& iv = spec_.box[k];
    out(static_cast<Eigen::Index>(k)) = iv.lower + (iv.upper - iv.lower) * unit[k];
  }
  return Point(std::move(out));
}

Point Objective::to_unit(const Point& native) const {
  if (native.dim() != dim()) throw DimensionError("objective: point dimension differs from the box");
  Vector out(native.coords.size());
  for (std::size_t k = 0; k < dim(); ++k) {
    const auto& iv = spec_.box[k];
    out(static_cast<Eigen::Index>(k)) = (native[k] - iv.lower) / (iv.upper - iv.lower);
  }
  return Point(std::move(out));
}

double Objective::operator()(const Point& unit) const {
  const Point x = to_native(unit);
  switch (spec_.id) {
    case ObjectiveId::f1:
      return eval_f1(x);
    case ObjectiveId::f2_rosenbrock:
      return eval_f2(x);
    case ObjectiveId::external:
      return external_eval(spec_.external.command, x, spec_.external.timeout, spec_.external.direction);
  }
  throw std::logic_error("unknown objective");
}

double noisy_observe(const Objective& objective, const Point& unit, Rng& stream) {
  const double f = objective(unit);
  if (objective.noise_var() == 0.0) return f;
  std::normal_distribution<double> eps(0.0, std::sqrt(objective.noise_var()));
  return f + eps(stream);
}

Vector objective_on_grid(const Objective& objective, const Grid& grid) {
  Vector out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) out(static_cast<Eigen::Index>(i)) = objective(grid.point(i));
  return out;
}

GridOptimum grid_optimum(const Objective& objective, const Grid& grid) {
  const Vector values = objective_on_grid(objective, grid);
  GridOptimum best{0, values(0)};
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > best.value) best = {static_cast<std::size_t>(i), values(i)};
  }
  return best;
}

}  // namespace cobo
