#include "dnflow/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "dnflow/format.hpp"

namespace dnflow {

namespace {

std::string at_line(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? " (line " + std::to_string(mark.line + 1) + ")" : "";
}

void require_map(const YAML::Node& node, const std::string& where,
                 const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping" + at_line(node));
  for (const auto& entry : node) {
    const auto key = entry.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'" +
                        at_line(entry.first));
    }
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& name) {
  if (!node.IsScalar()) throw ConfigError(name + " must be a scalar" + at_line(node));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(name + " has an invalid value '" + node.Scalar() + "'" + at_line(node));
  }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, const std::string& where, T& out) {
  if (const auto node = parent[key]) out = scalar<T>(node, where + "." + key);
}

std::vector<double> pair_list(const YAML::Node& node, const std::string& name) {
  if (!node.IsSequence() || node.size() != 2) {
    throw ConfigError(name + " must be a list with one value per open segment (2)" +
                      at_line(node));
  }
  return {scalar<double>(node[0], name + "[0]"), scalar<double>(node[1], name + "[1]")};
}

FieldSpec read_field(const YAML::Node& node, const std::string& where) {
  require_map(node, where, {"type", "scale", "amplitude", "pressure_drop"});
  if (!node["type"]) throw ConfigError(where + ".type is required");
  const auto type = scalar<std::string>(node["type"], where + ".type");
  FieldSpec spec;
  const auto parameter = [&](const char* key, bool required) {
    if (!node[key]) {
      if (required) throw ConfigError(where + "." + key + " is required for type " + type);
      return;
    }
    spec.parameter = scalar<double>(node[key], where + "." + key);
  };
  const auto only = [&](const std::set<std::string>& keys) {
    for (const auto& entry : node) {
      const auto key = entry.first.as<std::string>();
      if (key != "type" && !keys.contains(key)) {
        throw ConfigError(where + "." + key + " does not apply to type " + type);
      }
    }
  };
  if (type == "zero") {
    spec.kind = FieldKind::Zero;
    only({});
  } else if (type == "scaled_w") {
    spec.kind = FieldKind::ScaledW;
    only({"scale"});
    parameter("scale", true);
  } else if (type == "sine_w") {
    spec.kind = FieldKind::SineW;
    only({"amplitude"});
    parameter("amplitude", true);
  } else if (type == "zeta_w") {
    spec.kind = FieldKind::ZetaW;
    only({});
  } else if (type == "poiseuille") {
    spec.kind = FieldKind::Poiseuille;
    only({"pressure_drop"});
    parameter("pressure_drop", true);
  } else {
    throw ConfigError(where + ".type '" + type +
                      "' is not one of zero, scaled_w, sine_w, zeta_w, poiseuille" +
                      at_line(node["type"]));
  }
  return spec;
}

void finite(double v, const std::string& name) {
  if (!std::isfinite(v)) throw ConfigError(name + " must be finite");
}

void positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(name + " must be positive and finite (got " + format_double(v) + ")");
  }
}

}  // namespace

std::string describe(const FieldSpec& spec) {
  switch (spec.kind) {
    case FieldKind::Zero:
      return "zero";
    case FieldKind::ScaledW:
      return format_double(spec.parameter) + " w";
    case FieldKind::SineW:
      return format_double(spec.parameter) + " sin(2 pi t) w";
    case FieldKind::ZetaW:
      return "zeta(t) w";
    case FieldKind::Poiseuille:
      return "Poiseuille(dq=" + format_double(spec.parameter) + ")";
  }
  return "?";
}

SpaceTimeField make_field(const FieldSpec& spec, const ChannelGeometry& geometry) {
  const double c = spec.parameter;
  switch (spec.kind) {
    case FieldKind::Zero:
      return [](double, const Point2&) { return Vec2{0.0, 0.0}; };
    case FieldKind::ScaledW: {
      auto w = make_w_field(geometry);
      return [w, c](double, const Point2& p) {
        const Vec2 v = w(p);
        return Vec2{c * v[0], c * v[1]};
      };
    }
    case FieldKind::SineW: {
      auto w = make_w_field(geometry);
      return [w, c](double t, const Point2& p) {
        const double s = c * std::sin(2.0 * std::numbers::pi * t);
        const Vec2 v = w(p);
        return Vec2{s * v[0], s * v[1]};
      };
    }
    case FieldKind::ZetaW: {
      auto w = make_w_field(geometry);
      return [w](double t, const Point2& p) {
        const double s = zeta_profile(t);
        const Vec2 v = w(p);
        return Vec2{s * v[0], s * v[1]};
      };
    }
    case FieldKind::Poiseuille: {
      try {
        auto u = make_poiseuille_field(geometry, c);
        return [u](double, const Point2& p) { return u(p); };
      } catch (const GeometryError& e) {
        throw ConfigError(std::string("poiseuille field: ") + e.what());
      }
    }
  }
  throw ConfigError("unknown field kind");
}

ChannelGeometry RunConfig::geometry() const {
  try {
    return ChannelGeometry(r, big_r, length);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
}

TimeGrid RunConfig::time_grid() const { return TimeGrid(final_time, steps); }

void RunConfig::validate() const {
  positive(r, "geometry.r");
  positive(big_r, "geometry.R");
  positive(length, "geometry.L");
  geometry();
  if (nx < 1) throw ConfigError("mesh.nx must be >= 1");
  if (ny < 2 || ny % 2 != 0) throw ConfigError("mesh.ny must be even and >= 2");
  positive(final_time, "time.T");
  if (steps < 1) throw ConfigError("time.N must be >= 1");
  positive(physics.blowup_threshold, "physics.blowup_threshold");
  positive(physics.newton_tol, "physics.newton_tol");
  if (physics.newton_max < 1) throw ConfigError("physics.newton_max must be >= 1");
  for (const auto* field : {&initial, &target}) {
    finite(field->parameter, field == &initial ? "initial" : "objective.target");
    if (field->kind == FieldKind::Poiseuille && r != big_r) {
      throw ConfigError(std::string(field == &initial ? "initial" : "objective.target") +
                        ": the poiseuille field needs geometry.r == geometry.R");
    }
  }
  if (control.file.empty()) {
    if (control.constant.size() != 2) throw ConfigError("control.values needs 2 entries");
    for (double v : control.constant) finite(v, "control.values");
  }
  if (desired_control.size() != 2) throw ConfigError("objective.desired_control needs 2 entries");
  for (double v : desired_control) finite(v, "objective.desired_control");
  positive(alpha, "objective.alpha");
  try {
    bounds.validate(2);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bounds: ") + e.what());
  }
  positive(optimizer.tol, "optimizer.tol");
  if (optimizer.max_iterations < 0) throw ConfigError("optimizer.max_iterations must be >= 0");
  if (optimizer.memory < 1) throw ConfigError("optimizer.memory must be >= 1");
  if (!(optimizer.armijo_c1 > 0.0 && optimizer.armijo_c1 < 1.0)) {
    throw ConfigError("optimizer.armijo_c1 must lie in (0, 1)");
  }
  if (!(optimizer.shrink > 0.0 && optimizer.shrink < 1.0)) {
    throw ConfigError("optimizer.shrink must lie in (0, 1)");
  }
  if (output.vtk_every < 0) throw ConfigError("output.vtk_every must be >= 0");
  if (gradient_check.base != "control" && gradient_check.base != "random") {
    throw ConfigError("gradient_check.base must be 'control' or 'random'");
  }
  if (gradient_check.directions < 1) throw ConfigError("gradient_check.directions must be >= 1");
  positive(gradient_check.tolerance, "gradient_check.tolerance");
  finite(gradient_check.random_scale, "gradient_check.random_scale");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  require_map(root, "", {"geometry", "mesh", "time", "physics", "initial", "control", "objective",
                         "bounds", "optimizer", "output", "gradient_check"});

  if (const auto g = root["geometry"]) {
    require_map(g, "geometry", {"r", "R", "L"});
    read(g, "r", "geometry", cfg.r);
    read(g, "R", "geometry", cfg.big_r);
    read(g, "L", "geometry", cfg.length);
  }
  if (const auto m = root["mesh"]) {
    require_map(m, "mesh", {"nx", "ny"});
    read(m, "nx", "mesh", cfg.nx);
    read(m, "ny", "mesh", cfg.ny);
  }
  if (const auto t = root["time"]) {
    require_map(t, "time", {"T", "N"});
    read(t, "T", "time", cfg.final_time);
    read(t, "N", "time", cfg.steps);
  }
  if (const auto p = root["physics"]) {
    require_map(p, "physics", {"mode", "blowup_threshold", "newton_tol", "newton_max"});
    if (const auto mode = p["mode"]) {
      const auto name = scalar<std::string>(mode, "physics.mode");
      if (name == "ns") {
        cfg.physics.model = FlowModel::NavierStokes;
      } else if (name == "stokes") {
        cfg.physics.model = FlowModel::Stokes;
      } else {
        throw ConfigError("physics.mode must be 'ns' or 'stokes'" + at_line(mode));
      }
    }
    read(p, "blowup_threshold", "physics", cfg.physics.blowup_threshold);
    read(p, "newton_tol", "physics", cfg.physics.newton_tol);
    read(p, "newton_max", "physics", cfg.physics.newton_max);
  }
  if (const auto i = root["initial"]) cfg.initial = read_field(i, "initial");
  if (const auto c = root["control"]) {
    require_map(c, "control", {"values", "file"});
    if (c["values"] && c["file"]) throw ConfigError("control: give either values or file");
    if (const auto v = c["values"]) cfg.control.constant = pair_list(v, "control.values");
    if (const auto f = c["file"]) {
      cfg.control.file = scalar<std::string>(f, "control.file");
      if (cfg.control.file.empty()) throw ConfigError("control.file must not be empty");
    }
  }
  if (const auto o = root["objective"]) {
    require_map(o, "objective", {"target", "desired_control", "alpha"});
    if (const auto t = o["target"]) cfg.target = read_field(t, "objective.target");
    if (const auto d = o["desired_control"]) {
      cfg.desired_control = pair_list(d, "objective.desired_control");
    }
    read(o, "alpha", "objective", cfg.alpha);
  }
  if (const auto b = root["bounds"]) {
    require_map(b, "bounds", {"lower", "upper"});
    if (const auto lo = b["lower"]) cfg.bounds.lower = pair_list(lo, "bounds.lower");
    if (const auto hi = b["upper"]) cfg.bounds.upper = pair_list(hi, "bounds.upper");
  }
  if (const auto o = root["optimizer"]) {
    require_map(o, "optimizer",
                {"tol", "max_iterations", "direction", "memory", "armijo_c1", "shrink"});
    read(o, "tol", "optimizer", cfg.optimizer.tol);
    read(o, "max_iterations", "optimizer", cfg.optimizer.max_iterations);
    read(o, "memory", "optimizer", cfg.optimizer.memory);
    read(o, "armijo_c1", "optimizer", cfg.optimizer.armijo_c1);
    read(o, "shrink", "optimizer", cfg.optimizer.shrink);
    if (const auto d = o["direction"]) {
      const auto name = scalar<std::string>(d, "optimizer.direction");
      if (name == "gradient") {
        cfg.optimizer.direction = SearchDirection::Gradient;
      } else if (name == "lbfgs") {
        cfg.optimizer.direction = SearchDirection::Lbfgs;
      } else if (name == "newton") {
        cfg.optimizer.direction = SearchDirection::NewtonCg;
      } else {
        throw ConfigError("optimizer.direction must be 'gradient', 'lbfgs' or 'newton'" +
                          at_line(d));
      }
    }
  }
  if (const auto o = root["output"]) {
    require_map(o, "output", {"mesh", "flowrate", "target_flowrate", "control", "iterations",
                              "vtk_prefix", "vtk_every"});
    read(o, "mesh", "output", cfg.output.mesh);
    read(o, "flowrate", "output", cfg.output.flowrate);
    read(o, "target_flowrate", "output", cfg.output.target_flowrate);
    read(o, "control", "output", cfg.output.control);
    read(o, "iterations", "output", cfg.output.iterations);
    read(o, "vtk_prefix", "output", cfg.output.vtk_prefix);
    read(o, "vtk_every", "output", cfg.output.vtk_every);
  }
  if (const auto g = root["gradient_check"]) {
    require_map(g, "gradient_check", {"base", "random_scale", "seed", "directions", "tolerance"});
    read(g, "base", "gradient_check", cfg.gradient_check.base);
    read(g, "random_scale", "gradient_check", cfg.gradient_check.random_scale);
    read(g, "seed", "gradient_check", cfg.gradient_check.seed);
    read(g, "directions", "gradient_check", cfg.gradient_check.directions);
    read(g, "tolerance", "gradient_check", cfg.gradient_check.tolerance);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace dnflow
