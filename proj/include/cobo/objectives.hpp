#pragma once

// Benchmark objectives, the Gaussian observation channel, grid optima and a
// line-delimited JSON protocol for black-box objectives run as child
// processes. Everything here is oriented for maximization.

#include "cobo/gp_core.hpp"
#include "cobo/rng.hpp"

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cobo {

enum class ObjectiveId { f1, f2_rosenbrock, external };
enum class Direction { maximize, minimize };

std::string_view to_string(ObjectiveId id);
std::string_view to_string(Direction d);
/// Throws std::invalid_argument naming the unknown id.
ObjectiveId parse_objective_id(std::string_view name);
Direction parse_direction(std::string_view name);

struct ExternalSpec {
  std::string command;  // run through /bin/sh -c
  Direction direction = Direction::maximize;
  std::chrono::milliseconds timeout{300'000};

  bool operator==(const ExternalSpec&) const = default;
};

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
  bool operator==(const Interval&) const = default;
};

struct ObjectiveSpec {
  ObjectiveId id = ObjectiveId::f1;
  std::vector<Interval> box{{0.0, 1.0}, {0.0, 1.0}};  // native domain, one interval per axis
  double noise_var = 0.02;
  ExternalSpec external;

  std::size_t dim() const { return box.size(); }
  void validate() const;
  bool operator==(const ObjectiveSpec&) const = default;
};

/// x1^2 + x2^2 + sin(2 pi x1) + cos(2 pi x2)
double eval_f1(const Point& x);
/// (1 - x1)^2 + 100 (x2 - x1^2)^2
double eval_f2(const Point& x);

class ExternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ExternalTimeout : public ExternalError {
 public:
  using ExternalError::ExternalError;
};
class ExternalMalformedReply : public ExternalError {
 public:
  using ExternalError::ExternalError;
};
/// status() is the exit code, or 128 + signal for a killed child.
class ExternalChildExit : public ExternalError {
 public:
  ExternalChildExit(const std::string& what, int status) : ExternalError(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// Sends {"x": [...]} on one line to a fresh child and reads {"y": v} back.
/// Returns v, or -v when `direction` is minimize.
double external_eval(const std::string& command, const Point& x,
                     std::chrono::milliseconds timeout = std::chrono::milliseconds{300'000},
                     Direction direction = Direction::maximize);

/// An objective evaluated on the normalized box [0,1]^d; points are mapped
/// affinely onto the native box before evaluation.
class Objective {
 public:
  explicit Objective(ObjectiveSpec spec);

  const ObjectiveSpec& spec() const { return spec_; }
  std::size_t dim() const { return spec_.dim(); }
  double noise_var() const { return spec_.noise_var; }

  Point to_native(const Point& unit) const;
  Point to_unit(const Point& native) const;

  /// Noiseless value at a normalized point.
  double operator()(const Point& unit) const;

 private:
  ObjectiveSpec spec_;
};

/// f(x) + eps with eps ~ N(0, noise_var) drawn from `stream`; exact when
/// noise_var is zero.
double noisy_observe(const Objective& objective, const Point& unit, Rng& stream);

struct GridOptimum {
  std::size_t index = 0;
  double value = 0.0;
};

/// Exhaustive noiseless scan; ties go to the smallest index.
GridOptimum grid_optimum(const Objective& objective, const Grid& grid);

/// Noiseless values at every grid point.
Vector objective_on_grid(const Objective& objective, const Grid& grid);

}  // namespace cobo
