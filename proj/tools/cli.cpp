#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "dnflow/config.hpp"
#include "dnflow/format.hpp"
#include "dnflow/interpolation.hpp"
#include "dnflow/mesh.hpp"
#include "dnflow/objective.hpp"
#include "dnflow/optimizer.hpp"
#include "dnflow/output.hpp"
#include "dnflow/verify.hpp"

namespace dnflow::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out_dir = ".";
  std::optional<int> vtk_every;
  std::string sweep;
  bool corrupt_adjoint_sign = false;
};

RunConfig load(const Options& options) {
  RunConfig config = options.config.empty() ? RunConfig{} : load_config(options.config);
  if (options.vtk_every) config.output.vtk_every = *options.vtk_every;
  config.validate();
  return config;
}

fs::path prepare_out_dir(const std::string& dir) {
  const fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw ConfigError("--out: cannot create directory " + dir + ": " + ec.message());
  return path;
}

std::unique_ptr<FlowProblem> make_problem(const RunConfig& config) {
  return std::make_unique<FlowProblem>(generate_channel_mesh(config.geometry(), config.nx, config.ny),
                                       config.time_grid(), config.physics);
}

Eigen::VectorXd initial_velocity(const RunConfig& config, const FlowProblem& problem) {
  const SpaceTimeField field = make_field(config.initial, config.geometry());
  return interpolate_velocity(problem.layout(), [&](const Point2& p) { return field(0.0, p); });
}

ControlVector configured_control(const RunConfig& config, const FlowProblem& problem) {
  const int segments = problem.num_open_segments();
  if (config.control.file.empty()) {
    return ControlVector::constant(config.control.constant, config.steps);
  }
  fs::path file = config.control.file;
  if (file.is_relative()) file = config.base_dir / file;
  return read_control_csv(file, problem.grid(), segments);
}

ReducedObjective make_objective(const RunConfig& config, const FlowProblem& problem,
                                bool flip_adjoint_sign = false) {
  ObjectiveData data{make_field(config.target, config.geometry()),
                     ControlVector::constant(config.desired_control, config.steps), config.alpha};
  ObjectiveOptions options;
  options.flip_adjoint_sign = flip_adjoint_sign;
  return ReducedObjective(problem, initial_velocity(config, problem), std::move(data), options);
}

std::string describe_blowup(const BlowupReport& b) {
  std::ostringstream s;
  s << "blowup at t=" << format_double(b.time) << " (step " << b.step << ", "
    << to_string(b.trigger) << ")";
  if (!b.detail.empty()) s << ": " << b.detail;
  return s.str();
}

int cmd_mesh(const Options& options, std::ostream& out) {
  const RunConfig config = load(options);
  const fs::path dir = prepare_out_dir(options.out_dir);
  const Mesh mesh = generate_channel_mesh(config.geometry(), config.nx, config.ny);
  const fs::path file = dir / config.output.mesh;
  write_mesh(mesh, file);
  out << "wrote " << file.string() << ": " << mesh.num_vertices() << " vertices, "
      << mesh.num_triangles() << " triangles, area " << format_double(mesh.area()) << '\n';
  return kOk;
}

void write_vtk_series(const RunConfig& config, const FlowProblem& problem, const Trajectory& traj,
                      const fs::path& dir) {
  const int every = config.output.vtk_every;
  if (every <= 0) return;
  const int width = static_cast<int>(std::to_string(config.steps).size());
  for (int n = 0; n <= traj.last_step(); n += every) {
    std::ostringstream name;
    name << config.output.vtk_prefix << '_' << std::setw(width) << std::setfill('0') << n
         << ".vtk";
    write_vtk(dir / name.str(), problem.layout(), traj.velocity[n], traj.pressure[n],
              problem.grid().time(n));
  }
}

int cmd_solve(const Options& options, std::ostream& out) {
  const RunConfig config = load(options);
  const fs::path dir = prepare_out_dir(options.out_dir);
  const auto problem = make_problem(config);
  const ControlVector q = configured_control(config, *problem);
  const StateSolution state = problem->solve(q, initial_velocity(config, *problem),
                                             config.physics.model);
  const fs::path file = dir / config.output.flowrate;
  write_flowrate_csv(file, flowrate_series(*problem, state));
  write_vtk_series(config, *problem, state.trajectory, dir);
  out << "wrote " << file.string() << '\n';
  if (state.blowup) {
    out << describe_blowup(*state.blowup) << '\n';
    return kStateBlowup;
  }
  out << "completed: Q(T)=" << format_double(problem->flowrate(state.trajectory.velocity.back()))
      << '\n';
  return kOk;
}

std::vector<double> parse_sweep(const std::string& text) {
  const std::string key = "alpha=";
  if (text.rfind(key, 0) != 0) throw ConfigError("--sweep must have the form alpha=<v1>,<v2>,...");
  std::vector<double> values;
  std::stringstream list(text.substr(key.size()));
  std::string item;
  while (std::getline(list, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--sweep: invalid alpha '" + item + "' (must be a positive number)");
    }
  }
  if (values.empty()) throw ConfigError("--sweep: no alpha values given");
  return values;
}

struct OptimizeOutcome {
  int code = kOk;
  std::string log;
};

OptimizeOutcome optimize_one(const RunConfig& config, const fs::path& dir) {
  OptimizeOutcome outcome;
  std::ostringstream log;
  const auto problem = make_problem(config);
  const ReducedObjective objective = make_objective(config, *problem);
  const ControlVector q0 = configured_control(config, *problem);
  write_flowrate_csv(dir / config.output.target_flowrate,
                     flowrate_series(*problem, make_field(config.target, config.geometry())));
  OptimizationResult result;
  try {
    result = optimize(objective, project(q0, config.bounds), config.bounds, config.optimizer,
                      [&](const IterationRecord& r) {
                        log << "iter " << r.iteration << " j=" << format_double(r.objective)
                            << " stationarity=" << format_double(r.stationarity) << '\n';
                      });
  } catch (const InfeasibleStartError& e) {
    log << "the initial control q0 is infeasible: " << describe_blowup(e.report()) << '\n'
        << "choose a smaller q0 or a smaller initial velocity so that the state exists on [0,T]\n";
    outcome.code = kInfeasibleStart;
    outcome.log = log.str();
    return outcome;
  }
  const Evaluation optimum = objective.evaluate_with_state(result.control);
  write_control_csv(dir / config.output.control, problem->grid(), result.control);
  write_flowrate_csv(dir / config.output.flowrate, flowrate_series(*problem, optimum.state));
  write_iterations_csv(dir / config.output.iterations, result.log);
  write_vtk_series(config, *problem, optimum.state.trajectory, dir);
  log << (result.converged ? "converged" : "not converged") << " (" << result.stop_reason
      << "): j=" << format_double(result.report.value)
      << " tracking=" << format_double(result.report.tracking)
      << " regularization=" << format_double(result.report.regularization) << '\n';
  outcome.log = log.str();
  return outcome;
}

int cmd_optimize(const Options& options, std::ostream& out) {
  const RunConfig config = load(options);
  const fs::path dir = prepare_out_dir(options.out_dir);
  if (options.sweep.empty()) {
    const OptimizeOutcome outcome = optimize_one(config, dir);
    out << outcome.log;
    return outcome.code;
  }
  const std::vector<double> alphas = parse_sweep(options.sweep);
  std::vector<std::future<OptimizeOutcome>> runs;
  std::vector<fs::path> dirs;
  for (double alpha : alphas) {
    RunConfig variant = config;
    variant.alpha = alpha;
    dirs.push_back(prepare_out_dir((dir / ("alpha_" + format_double(alpha))).string()));
    runs.push_back(std::async(std::launch::async,
                              [variant, d = dirs.back()] { return optimize_one(variant, d); }));
  }
  int code = kOk;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const OptimizeOutcome outcome = runs[k].get();
    out << "== alpha=" << format_double(alphas[k]) << " -> " << dirs[k].string() << '\n'
        << outcome.log;
    code = std::max(code, outcome.code);
  }
  return code;
}

int cmd_gradient_check(const Options& options, std::ostream& out) {
  const RunConfig config = load(options);
  const auto problem = make_problem(config);
  const ReducedObjective objective = make_objective(config, *problem, options.corrupt_adjoint_sign);
  const GradientCheckSpec& spec = config.gradient_check;
  std::mt19937 rng(spec.seed);
  const ControlVector q =
      spec.base == "random"
          ? smooth_random_control(problem->num_open_segments(), config.steps, rng, spec.random_scale)
          : configured_control(config, *problem);
  const ObjectiveReport base = objective.evaluate(q);
  if (base.blew_up()) {
    out << "base point is infeasible: " << describe_blowup(*base.blowup) << '\n';
    return kInfeasibleStart;
  }
  bool passed = true;
  for (int d = 0; d < spec.directions; ++d) {
    const ControlVector dq =
        smooth_random_control(problem->num_open_segments(), config.steps, rng, 1.0);
    const FiniteDifferenceCheck check = check_gradient_fd(objective, q, dq);
    out << "direction " << d + 1 << ": <grad j, dq> = " << format_double(check.analytic) << '\n';
    out << std::setw(10) << "eps" << std::setw(26) << "central difference" << std::setw(14)
        << "rel. error" << '\n';
    for (const auto& row : check.rows) {
      out << std::setw(10) << format_double(row.epsilon) << std::setw(26)
          << format_double(row.difference) << std::setw(14) << std::scientific
          << std::setprecision(3) << row.relative_error << std::defaultfloat << '\n';
    }
    const bool ok = check.min_relative_error <= spec.tolerance;
    out << "minimum relative error " << format_double(check.min_relative_error)
        << (ok ? " <= " : " > ") << format_double(spec.tolerance) << (ok ? ": pass" : ": FAIL")
        << '\n';
    passed = passed && ok;
  }
  return passed ? kOk : kGradientCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transient channel flow with Do-Nothing boundary controls"};
  app.require_subcommand(1);
  Options options;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config, "YAML run configuration (defaults if omitted)");
    sub->add_option("--out", options.out_dir, "output directory");
  };
  CLI::App* mesh = app.add_subcommand("mesh", "write the channel mesh");
  common(mesh);
  CLI::App* solve = app.add_subcommand("solve", "forward solve; writes the flowrate history");
  common(solve);
  solve->add_option("--vtk-every", options.vtk_every, "dump every k-th time level as VTK")
      ->check(CLI::NonNegativeNumber);
  CLI::App* opt = app.add_subcommand("optimize", "optimal boundary control");
  common(opt);
  opt->add_option("--vtk-every", options.vtk_every, "dump the optimal state every k steps")
      ->check(CLI::NonNegativeNumber);
  opt->add_option("--sweep", options.sweep, "alpha=<v1>,<v2>,...: one run per value");
  CLI::App* grad = app.add_subcommand("gradient-check", "finite-difference gradient test");
  common(grad);
  grad->add_flag("--corrupt-adjoint-sign", options.corrupt_adjoint_sign)->group("");

  // CLI11 consumes a reversed argument vector.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (mesh->parsed()) return cmd_mesh(options, out);
    if (solve->parsed()) return cmd_solve(options, out);
    if (opt->parsed()) return cmd_optimize(options, out);
    return cmd_gradient_check(options, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const DataFileError& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const MeshError& e) {
    err << "mesh error: " << e.what() << '\n';
  } catch (const GeometryError& e) {
    err << "geometry error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
  }
  return kInputError;
}

}  // namespace dnflow::cli
