#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnflow/control.hpp"
#include "dnflow/fields.hpp"
#include "dnflow/geometry.hpp"
#include "dnflow/optimizer.hpp"
#include "dnflow/state.hpp"

namespace dnflow {

/// Invalid or unreadable run configuration. The message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Built-in velocity fields for initial data and tracking targets.
enum class FieldKind {
  Zero,
  /// c w
  ScaledW,
  /// a sin(2 pi t) w
  SineW,
  /// zeta(t) w
  ZetaW,
  /// Steady Poiseuille profile for a pressure drop; straight channels only.
  Poiseuille,
};

struct FieldSpec {
  FieldKind kind = FieldKind::Zero;
  /// Scale c, amplitude a or pressure drop, depending on the kind.
  double parameter = 0.0;
};

std::string describe(const FieldSpec& spec);

/// Evaluates a field spec; throws ConfigError for a Poiseuille field on a
/// channel with r != R.
SpaceTimeField make_field(const FieldSpec& spec, const ChannelGeometry& geometry);

struct ControlSpec {
  /// Constant value per open segment; used when `file` is empty.
  std::vector<double> constant{0.0, 0.0};
  /// CSV file with header time,q1,q2 and N+1 rows; relative to the config.
  std::filesystem::path file;
};

struct OutputSpec {
  std::string mesh = "mesh.txt";
  std::string flowrate = "flowrate.csv";
  std::string target_flowrate = "target_flowrate.csv";
  std::string control = "control.csv";
  std::string iterations = "iterations.csv";
  std::string vtk_prefix = "state";
  /// Dump every k-th time level to VTK; 0 disables.
  int vtk_every = 0;
};

struct GradientCheckSpec {
  /// Base point: "control" (the configured q) or "random".
  std::string base = "control";
  double random_scale = 10.0;
  unsigned seed = 1;
  int directions = 1;
  double tolerance = 1e-6;
};

struct RunConfig {
  double r = 1.0;
  double big_r = 2.0;
  double length = 2.0;
  int nx = 16;
  int ny = 8;
  double final_time = 1.0;
  int steps = 100;
  StateOptions physics;
  FieldSpec initial;
  ControlSpec control;
  FieldSpec target;
  std::vector<double> desired_control{0.0, 0.0};
  double alpha = 1.0;
  BoxBounds bounds = BoxBounds::unbounded(2);
  OptimizerOptions optimizer;
  OutputSpec output;
  GradientCheckSpec gradient_check;
  /// Directory that relative paths in the config refer to.
  std::filesystem::path base_dir = ".";

  ChannelGeometry geometry() const;
  TimeGrid time_grid() const;
  /// Full validation; throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a YAML document. Unknown keys are errors.
RunConfig parse_config(const std::string& text,
                       const std::filesystem::path& base_dir = std::filesystem::path("."));
RunConfig load_config(const std::filesystem::path& path);

}  // namespace dnflow
