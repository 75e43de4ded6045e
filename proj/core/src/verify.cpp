#include "dnflow/verify.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "dnflow/adjoint.hpp"
#include "dnflow/format.hpp"
#include "dnflow/interpolation.hpp"
#include "dnflow/optimizer.hpp"
#include "dnflow/output.hpp"
#include "dnflow/sensitivity.hpp"

namespace dnflow {

PoiseuilleSolution poiseuille_oracle(const ChannelGeometry& geometry, double q1, double q2) {
  if (!geometry.is_straight()) throw GeometryError("Poiseuille flow needs r == R");
  const double r = geometry.inlet_half_width();
  const double length = geometry.length();
  const double drop = q1 - q2;
  PoiseuilleSolution out;
  out.velocity = make_poiseuille_field(geometry, drop);
  out.pressure = [q1, q2, length](const Point2& p) { return q1 + (q2 - q1) * p.x / length; };
  out.flowrate = 2.0 * drop * r * r * r / (3.0 * length);
  return out;
}

ControlVector smooth_random_control(int segments, int steps, std::mt19937& rng, double scale) {
  std::normal_distribution<double> normal;
  ControlVector q(segments, steps);
  for (int i = 1; i <= segments; ++i) {
    const double offset = scale * normal(rng);
    std::array<double, 3> amplitude{};
    for (int k = 0; k < 3; ++k) amplitude[k] = scale * normal(rng) / (k + 1);
    for (int n = 1; n <= steps; ++n) {
      const double t = static_cast<double>(n) / steps;
      double v = offset;
      for (int k = 0; k < 3; ++k) v += amplitude[k] * std::sin((k + 1) * std::numbers::pi * t);
      q(i, n) = v;
    }
  }
  return q;
}

std::vector<double> default_fd_steps() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}; }

namespace {

double relative(double approx, double exact) {
  const double scale = std::abs(exact);
  return scale > 0.0 ? std::abs(approx - exact) / scale : std::abs(approx);
}

FiniteDifferenceCheck sweep(double analytic, const std::vector<double>& steps,
                            const std::function<double(double)>& difference) {
  FiniteDifferenceCheck out;
  out.analytic = analytic;
  out.min_relative_error = std::numeric_limits<double>::infinity();
  for (double eps : steps) {
    const double d = difference(eps);
    const double err = relative(d, analytic);
    out.rows.push_back({eps, d, err});
    if (!(err >= out.min_relative_error)) out.min_relative_error = err;
  }
  return out;
}

}  // namespace

FiniteDifferenceCheck check_gradient_fd(const ReducedObjective& objective, const ControlVector& q,
                                        const ControlVector& dq,
                                        const std::vector<double>& steps) {
  const GradientResult base = objective.gradient(q);
  return sweep(base.gradient.dot(dq), steps, [&](double eps) {
    const double plus = objective.evaluate(q + eps * dq).value;
    const double minus = objective.evaluate(q + (-eps) * dq).value;
    return (plus - minus) / (2.0 * eps);
  });
}

FiniteDifferenceCheck check_curvature_fd(const ReducedObjective& objective,
                                         const ControlVector& q, const ControlVector& dq,
                                         const std::vector<double>& steps) {
  return sweep(objective.curvature(q, dq), steps, [&](double eps) {
    const double plus = objective.gradient(q + eps * dq).gradient.dot(dq);
    const double minus = objective.gradient(q + (-eps) * dq).gradient.dot(dq);
    return (plus - minus) / (2.0 * eps);
  });
}

double duality_defect(const FlowProblem& problem, const Trajectory& state, std::mt19937& rng) {
  const int steps = state.last_step();
  const double dt = state.dt;
  const int nu = problem.layout().num_velocity_dofs();
  std::normal_distribution<double> normal;

  ControlVector dq(problem.num_open_segments(), steps);
  for (double& v : dq.values()) v = normal(rng);
  std::vector<Eigen::VectorXd> loads(steps + 1, Eigen::VectorXd::Zero(nu));
  for (int n = 1; n <= steps; ++n) {
    for (int k = 0; k < nu; ++k) loads[n][k] = normal(rng);
  }

  const LinearizedTrajectory lin(problem, state);
  const Trajectory du = solve_tangent(lin, dq);
  const AdjointTrajectory z = solve_adjoint(lin, loads);

  double lhs = 0.0;
  double rhs = 0.0;
  for (int n = 1; n <= steps; ++n) {
    lhs += dt * loads[n].dot(du.velocity[n]);
    for (int i = 1; i <= dq.segments(); ++i) {
      rhs -= dt * dq(i, n) * problem.boundary_loads()[i - 1].dot(z.velocity[n - 1]);
    }
  }
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

namespace {

// Element-local quadratic Lagrange field on a physical triangle, written
// from barycentric coordinates independently of the assembly tables.
struct LocalP2 {
  std::array<Point2, 3> x;
  std::array<std::array<double, 2>, 3> grad_lambda{};

  explicit LocalP2(const std::array<Point2, 3>& corners) : x(corners) {
    const double det = (x[1].x - x[0].x) * (x[2].y - x[0].y) - (x[2].x - x[0].x) * (x[1].y - x[0].y);
    for (int k = 0; k < 3; ++k) {
      const Point2& a = x[(k + 1) % 3];
      const Point2& b = x[(k + 2) % 3];
      grad_lambda[k] = {(a.y - b.y) / det, (b.x - a.x) / det};
    }
  }

  double area() const {
    return 0.5 * std::abs((x[1].x - x[0].x) * (x[2].y - x[0].y) -
                          (x[2].x - x[0].x) * (x[1].y - x[0].y));
  }

  // Values and gradients of the six shape functions at barycentric l.
  void shape(const std::array<double, 3>& l, std::array<double, 6>& phi,
             std::array<std::array<double, 2>, 6>& dphi) const {
    for (int k = 0; k < 3; ++k) {
      phi[k] = l[k] * (2.0 * l[k] - 1.0);
      for (int d = 0; d < 2; ++d) dphi[k][d] = (4.0 * l[k] - 1.0) * grad_lambda[k][d];
    }
    for (int e = 0; e < 3; ++e) {
      const int a = e;
      const int b = (e + 1) % 3;
      phi[3 + e] = 4.0 * l[a] * l[b];
      for (int d = 0; d < 2; ++d) {
        dphi[3 + e][d] = 4.0 * (l[a] * grad_lambda[b][d] + l[b] * grad_lambda[a][d]);
      }
    }
  }
};

}  // namespace

double trilinear_defect(const FlowProblem& problem, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v) {
  const DofLayout& layout = problem.layout();
  const Mesh& mesh = problem.mesh();
  const double lhs = v.dot(problem.assembler().convection(u) * v);

  using boost::math::quadrature::gauss;
  constexpr int kPoints = 7;
  // Gauss-Legendre nodes on [0, 1] with weights summing to 1.
  std::vector<double> node;
  std::vector<double> weight;
  {
    const auto& abscissa = gauss<double, kPoints>::abscissa();
    const auto& w = gauss<double, kPoints>::weights();
    for (std::size_t k = 0; k < abscissa.size(); ++k) {
      for (double sign : {-1.0, 1.0}) {
        if (abscissa[k] == 0.0 && sign > 0.0) continue;
        node.push_back(0.5 * (1.0 + sign * abscissa[k]));
        weight.push_back(0.5 * w[k]);
      }
    }
  }

  const auto elements = layout.element_nodes();
  const auto field = [&](const std::array<int, 6>& nodes, const std::array<double, 6>& phi,
                         const Eigen::VectorXd& f, int c) {
    double s = 0.0;
    for (int k = 0; k < 6; ++k) s += phi[k] * f[layout.velocity_dof(c, nodes[k])];
    return s;
  };

  double volume = 0.0;
  double volume_abs = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const LocalP2 local({mesh.vertices()[tri[0]], mesh.vertices()[tri[1]], mesh.vertices()[tri[2]]});
    const auto& nodes = elements[t];
    // Collapsed tensor rule on the reference triangle.
    for (std::size_t i = 0; i < node.size(); ++i) {
      for (std::size_t j = 0; j < node.size(); ++j) {
        const double s = node[i];
        const double r = node[j] * (1.0 - s);
        const double w = weight[i] * weight[j] * (1.0 - s) * 2.0 * local.area();
        const std::array<double, 3> l{1.0 - s - r, s, r};
        std::array<double, 6> phi{};
        std::array<std::array<double, 2>, 6> dphi{};
        local.shape(l, phi, dphi);
        double div = 0.0;
        for (int k = 0; k < 6; ++k) {
          div += dphi[k][0] * u[layout.velocity_dof(0, nodes[k])] +
                 dphi[k][1] * u[layout.velocity_dof(1, nodes[k])];
        }
        const double v0 = field(nodes, phi, v, 0);
        const double v1 = field(nodes, phi, v, 1);
        const double term = -0.5 * div * (v0 * v0 + v1 * v1) * w;
        volume += term;
        volume_abs += std::abs(term);
      }
    }
  }

  // Boundary edges are the edges owned by a single triangle.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> owners;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e];
      const int b = tri[(e + 1) % 3];
      owners[{std::min(a, b), std::max(a, b)}].push_back({t, e});
    }
  }
  double boundary = 0.0;
  double boundary_abs = 0.0;
  for (const auto& [edge, list] : owners) {
    if (list.size() != 1) continue;
    const auto [t, e] = list.front();
    const auto& tri = mesh.triangles()[t];
    const LocalP2 local({mesh.vertices()[tri[0]], mesh.vertices()[tri[1]], mesh.vertices()[tri[2]]});
    const Point2 a = local.x[e];
    const Point2 b = local.x[(e + 1) % 3];
    const Point2 c = local.x[(e + 2) % 3];
    const double length = std::hypot(b.x - a.x, b.y - a.y);
    Point2 normal{(b.y - a.y) / length, -(b.x - a.x) / length};
    const Point2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    if (normal.x * (c.x - mid.x) + normal.y * (c.y - mid.y) > 0.0) normal = {-normal.x, -normal.y};
    for (std::size_t q = 0; q < node.size(); ++q) {
      std::array<double, 3> l{0.0, 0.0, 0.0};
      l[e] = 1.0 - node[q];
      l[(e + 1) % 3] = node[q];
      std::array<double, 6> phi{};
      std::array<std::array<double, 2>, 6> dphi{};
      local.shape(l, phi, dphi);
      const auto& nodes = elements[t];
      const double un = field(nodes, phi, u, 0) * normal.x + field(nodes, phi, u, 1) * normal.y;
      const double v0 = field(nodes, phi, v, 0);
      const double v1 = field(nodes, phi, v, 1);
      const double term = 0.5 * un * (v0 * v0 + v1 * v1) * weight[q] * length;
      boundary += term;
      boundary_abs += std::abs(term);
    }
  }
  const double rhs = boundary + volume;
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), boundary_abs + volume_abs, 1e-300});
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const ChannelGeometry& default_geometry() {
  static const ChannelGeometry geometry(1.0, 2.0, 2.0);
  return geometry;
}

struct Resolution {
  int nx;
  int ny;
  int steps;
};

// The default experiment mesh and horizon; the quick profile coarsens both.
Resolution experiment_resolution(VerifyProfile profile) {
  return profile == VerifyProfile::Full ? Resolution{16, 8, 100} : Resolution{8, 4, 20};
}

// At dt = 0.05 the implicit Euler map folds before the optimal controls are
// reached, so the quick profile keeps N = 100 and coarsens only the mesh.
Resolution control_resolution(VerifyProfile profile) {
  return profile == VerifyProfile::Full ? Resolution{16, 8, 100} : Resolution{8, 4, 100};
}

// The quick profile is a smoke run; its optimizations stop early.
int control_iteration_limit(VerifyProfile profile) {
  return profile == VerifyProfile::Full ? 1000 : 40;
}

std::unique_ptr<FlowProblem> make_problem(const ChannelGeometry& geometry, int nx, int ny,
                                          int steps, const VerifyHooks& hooks,
                                          FlowModel model = FlowModel::NavierStokes) {
  StateOptions options;
  options.model = model;
  AssemblyOptions assembly;
  assembly.flip_convection_sign = hooks.flip_convection_sign;
  return std::make_unique<FlowProblem>(generate_channel_mesh(geometry, nx, ny),
                                       TimeGrid(1.0, steps), options, assembly);
}

Eigen::VectorXd scaled_w(const FlowProblem& problem, const ChannelGeometry& geometry, double c) {
  const VectorField w = make_w_field(geometry);
  return interpolate_velocity(problem.layout(), [&](const Point2& p) {
    const Vec2 v = w(p);
    return Vec2{c * v[0], c * v[1]};
  });
}

SpaceTimeField w_target(const ChannelGeometry& geometry, std::function<double(double)> profile) {
  const VectorField w = make_w_field(geometry);
  return [w, profile = std::move(profile)](double t, const Point2& p) {
    const double s = profile(t);
    const Vec2 v = w(p);
    return Vec2{s * v[0], s * v[1]};
  };
}

std::string fmt(double v) { return format_double(v); }

CheckResult named(std::string id, std::string description) {
  CheckResult r;
  r.id = std::move(id);
  r.description = std::move(description);
  return r;
}

CheckResult finish(CheckResult result, Clock::time_point start) {
  result.seconds = seconds_since(start);
  return result;
}

// Small nonlinear configuration shared by the derivative checks.
struct SmallCase {
  std::unique_ptr<FlowProblem> problem;
  std::unique_ptr<ReducedObjective> objective;
  ControlVector q;
};

SmallCase small_case(int steps, const VerifyHooks& hooks, unsigned seed) {
  SmallCase c;
  const ChannelGeometry& geometry = default_geometry();
  c.problem = make_problem(geometry, 8, 4, steps, hooks);
  ObjectiveData data{w_target(geometry, [](double t) { return 10.0 * std::sin(2.0 * std::numbers::pi * t) + 5.0; }),
                     ControlVector::constant({5.0, 0.0}, steps), 0.1};
  ObjectiveOptions options;
  options.flip_adjoint_sign = hooks.flip_adjoint_sign;
  c.objective = std::make_unique<ReducedObjective>(*c.problem, scaled_w(*c.problem, geometry, 3.0),
                                                   std::move(data), options);
  std::mt19937 rng(seed);
  c.q = smooth_random_control(2, steps, rng, 3.0);
  return c;
}

CheckResult check_poiseuille(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("poiseuille", "straight channel Poiseuille flowrate within 1% of 2 dq r^3 / 3L");
  const Resolution res = profile == VerifyProfile::Full ? Resolution{40, 20, 100}
                                                        : Resolution{10, 4, 20};
  const ChannelGeometry geometry(1.0, 1.0, 2.0);
  const auto problem = make_problem(geometry, res.nx, res.ny, res.steps, hooks);
  const PoiseuilleSolution exact = poiseuille_oracle(geometry, 3.0, 0.0);
  const Eigen::VectorXd u0 = interpolate_velocity(problem->layout(), exact.velocity);
  const StateSolution state = problem->solve_state(ControlVector::constant({3.0, 0.0}, res.steps), u0);
  const double q_final = state.completed()
                             ? problem->flowrate(state.trajectory.velocity.back())
                             : std::numeric_limits<double>::quiet_NaN();
  r.measured = relative(q_final, exact.flowrate);
  r.threshold = 0.01;
  r.seconds = seconds_since(start);
  const double limit = 60.0;
  r.passed = state.completed() && r.measured <= r.threshold && r.seconds < limit;
  r.detail = "nx=" + std::to_string(res.nx) + " ny=" + std::to_string(res.ny) +
             " N=" + std::to_string(res.steps) + " Q(T)=" + fmt(q_final) +
             " exact=" + fmt(exact.flowrate) + " limit=" + fmt(limit) + "s";
  return r;
}

CheckResult check_gradient(VerifyProfile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("gradient", "central FD of j against the adjoint gradient, 5 directions");
  const SmallCase c = small_case(10, hooks, 11);
  std::mt19937 rng(12);
  double worst = 0.0;
  std::ostringstream detail;
  for (int k = 0; k < 5; ++k) {
    const ControlVector dq = smooth_random_control(2, 10, rng, 1.0);
    const auto check = check_gradient_fd(*c.objective, c.q, dq);
    worst = std::max(worst, check.min_relative_error);
    detail << (k ? " " : "") << fmt(check.min_relative_error);
  }
  r.measured = worst;
  r.threshold = 1e-6;
  r.seconds = seconds_since(start);
  r.passed = r.measured <= r.threshold && r.seconds < 30.0;
  r.detail = "nx=8 ny=4 N=10 NS; min-over-eps errors: " + detail.str() + " limit=30s";
  return r;
}

CheckResult check_duality(VerifyProfile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("duality", "discrete adjoint-tangent duality for N in {1, 2, 10}");
  std::mt19937 rng(21);
  double worst = 0.0;
  std::ostringstream detail;
  for (int steps : {1, 2, 10}) {
    const auto problem = make_problem(default_geometry(), 8, 4, steps, hooks);
    const ControlVector q = smooth_random_control(2, steps, rng, 3.0);
    const StateSolution state =
        problem->solve_state(q, scaled_w(*problem, default_geometry(), 3.0));
    if (!state.completed()) {
      r.detail = "state blew up for N=" + std::to_string(steps);
      return finish(r, start);
    }
    const double defect = duality_defect(*problem, state.trajectory, rng);
    worst = std::max(worst, defect);
    detail << " N=" << steps << ":" << fmt(defect);
  }
  r.measured = worst;
  r.threshold = 1e-10;
  r.seconds = seconds_since(start);
  r.passed = r.measured <= r.threshold && r.seconds < 10.0;
  r.detail = "relative defects" + detail.str() + " limit=10s";
  return r;
}

CheckResult check_curvature(VerifyProfile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("curvature", "j''(q)(dq, dq) against central FD of the gradient");
  const SmallCase c = small_case(10, hooks, 31);
  std::mt19937 rng(32);
  double worst = 0.0;
  std::ostringstream detail;
  for (int k = 0; k < 3; ++k) {
    const ControlVector dq = smooth_random_control(2, 10, rng, 1.0);
    const auto check = check_curvature_fd(*c.objective, c.q, dq);
    worst = std::max(worst, check.min_relative_error);
    detail << (k ? " " : "") << fmt(check.min_relative_error);
  }
  r.measured = worst;
  r.threshold = 1e-4;
  r.seconds = seconds_since(start);
  r.passed = r.measured <= r.threshold && r.seconds < 60.0;
  r.detail = "nx=8 ny=4 N=10 NS; min-over-eps errors: " + detail.str() + " limit=60s";
  return r;
}

CheckResult check_trilinear(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("trilinear", "v^T C(u) v against boundary + volume quadrature, 10 random pairs");
  const Resolution res = experiment_resolution(profile);
  const auto problem = make_problem(default_geometry(), res.nx, res.ny, 1, hooks);
  std::mt19937 rng(41);
  std::normal_distribution<double> normal;
  const int nu = problem->layout().num_velocity_dofs();
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd u(nu);
    Eigen::VectorXd v(nu);
    for (int i = 0; i < nu; ++i) {
      u[i] = normal(rng);
      v[i] = normal(rng);
    }
    worst = std::max(worst, trilinear_defect(*problem, u, v));
  }
  r.measured = worst;
  r.threshold = 1e-12;
  r.passed = r.measured <= r.threshold;
  r.detail = "nx=" + std::to_string(res.nx) + " ny=" + std::to_string(res.ny);
  return finish(r, start);
}

CheckResult check_blowup(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("blowup", "u0=15w,q=0 and u0=0,q=(50,0) blow up in (0,1); Stokes completes");
  const Resolution res = experiment_resolution(profile);
  const ChannelGeometry& geometry = default_geometry();
  const auto ns = make_problem(geometry, res.nx, res.ny, res.steps, hooks);
  const auto stokes = make_problem(geometry, res.nx, res.ny, res.steps, hooks, FlowModel::Stokes);
  struct Case {
    const char* name;
    double c;
    double q1;
  };
  bool ok = true;
  double latest = 0.0;
  std::ostringstream detail;
  for (const Case& k : {Case{"a", 15.0, 0.0}, Case{"b", 0.0, 50.0}}) {
    const auto q = ControlVector::constant({k.q1, 0.0}, res.steps);
    const StateSolution s = ns->solve_state(q, scaled_w(*ns, geometry, k.c));
    const StateSolution st = stokes->solve_state(q, scaled_w(*stokes, geometry, k.c));
    const bool blew = s.blowup && s.blowup->time > 0.0 && s.blowup->time < 1.0;
    ok = ok && blew && st.completed();
    const double t_star = s.blowup ? s.blowup->time : std::numeric_limits<double>::infinity();
    latest = std::max(latest, t_star);
    detail << "(" << k.name << ") t*=" << fmt(t_star)
           << (s.blowup ? " [" + to_string(s.blowup->trigger) + "]" : std::string())
           << " stokes=" << (st.completed() ? "completed" : "blowup") << "; ";
  }
  r.measured = latest;
  r.threshold = 1.0;
  r.seconds = seconds_since(start);
  r.passed = ok && r.seconds < 300.0;
  r.detail = detail.str() + "limit=300s";
  return r;
}

struct ControlExperiment {
  double u0_scale;
  SpaceTimeField target;
  std::vector<double> desired;
  std::vector<double> initial;
  double alpha;
};

struct ControlOutcome {
  std::unique_ptr<FlowProblem> problem;
  std::unique_ptr<ReducedObjective> objective;
  OptimizationResult result;
  ObjectiveReport initial_report;
  StateSolution optimal_state;
  std::string error;
};

ControlOutcome run_control(VerifyProfile profile, const VerifyHooks& hooks,
                           ControlExperiment e) {
  ControlOutcome out;
  const Resolution res = control_resolution(profile);
  const ChannelGeometry& geometry = default_geometry();
  out.problem = make_problem(geometry, res.nx, res.ny, res.steps, hooks);
  ObjectiveData data{std::move(e.target), ControlVector::constant(e.desired, res.steps), e.alpha};
  ObjectiveOptions options;
  options.flip_adjoint_sign = hooks.flip_adjoint_sign;
  out.objective = std::make_unique<ReducedObjective>(
      *out.problem, scaled_w(*out.problem, geometry, e.u0_scale), std::move(data), options);
  const ControlVector q0 = ControlVector::constant(e.initial, res.steps);
  out.initial_report = out.objective->evaluate(q0);
  OptimizerOptions opt;
  opt.tol = 1e-4;
  opt.max_iterations = control_iteration_limit(profile);
  try {
    out.result = optimize(*out.objective, q0, BoxBounds::unbounded(2), opt);
    out.optimal_state = out.objective->evaluate_with_state(out.result.control).state;
  } catch (const std::exception& ex) {
    out.error = ex.what();
  }
  return out;
}

std::string describe_run(const ControlOutcome& o) {
  std::ostringstream s;
  s << "iterations=" << (o.result.log.empty() ? 0 : o.result.log.back().iteration)
    << " stationarity=" << fmt(o.result.log.empty() ? NAN : o.result.log.back().stationarity)
    << " stop='" << o.result.stop_reason << "' j(q0)=" << fmt(o.initial_report.value)
    << " j(q*)=" << fmt(o.result.report.value);
  return s.str();
}

CheckResult check_optimal_control(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("optimal_control",
                "u_d=10w, alpha=1e-2 from q0=(0,50): converged, no blowup, j decreased, "
                "Q(0.5) within 20% of Q(u_d)(0.5)");
  const ChannelGeometry& geometry = default_geometry();
  const ControlOutcome o = run_control(
      profile, hooks, {15.0, w_target(geometry, [](double) { return 10.0; }), {50.0, 0.0},
                       {0.0, 50.0}, 1e-2});
  r.threshold = 0.2;
  if (!o.error.empty()) {
    r.detail = o.error;
    return finish(r, start);
  }
  const int mid = o.problem->grid().steps() / 2;
  const double q_opt = o.optimal_state.completed()
                           ? o.problem->flowrate(o.optimal_state.trajectory.velocity[mid])
                           : NAN;
  const double q_target = o.problem->flowrate(o.objective->targets()[mid]);
  r.measured = std::abs(q_opt - q_target) / std::abs(q_target);
  r.seconds = seconds_since(start);
  r.passed = o.result.converged && o.optimal_state.completed() &&
             o.result.report.value < o.initial_report.value && r.measured <= r.threshold &&
             r.seconds < 1800.0;
  r.detail = describe_run(o) + " Q(0.5)=" + fmt(q_opt) + " Q(u_d)(0.5)=" + fmt(q_target) +
             " limit=1800s";
  return r;
}

CheckResult check_blowup_prevention(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("blowup_prevention",
                "u_d=zeta(t)w, alpha=10: optimization completes, optimal state finite on [0,1]");
  const ChannelGeometry& geometry = default_geometry();
  const ControlOutcome o = run_control(profile, hooks,
                                       {0.0, w_target(geometry, zeta_profile), {50.0, 0.0},
                                        {0.0, 0.0}, 10.0});
  if (!o.error.empty()) {
    r.detail = o.error;
    return finish(r, start);
  }
  double peak = 0.0;
  bool finite = o.optimal_state.completed();
  for (const auto& u : o.optimal_state.trajectory.velocity) {
    finite = finite && u.allFinite();
    peak = std::max(peak, std::abs(o.problem->flowrate(u)));
  }
  r.measured = peak;
  r.threshold = std::numeric_limits<double>::infinity();
  r.seconds = seconds_since(start);
  r.passed = finite && o.result.stop_reason != "line search failed" &&
             o.result.report.value <= o.initial_report.value && r.seconds < 1800.0;
  r.detail = describe_run(o) + " max|Q|=" + fmt(peak) + " limit=1800s";
  return r;
}

CheckResult check_bidirectional(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("bidirectional", "u_d=50 sin(2 pi t) w, alpha=1e-1: optimal flowrate changes sign");
  const ChannelGeometry& geometry = default_geometry();
  const ControlOutcome o = run_control(
      profile, hooks,
      {15.0, w_target(geometry, [](double t) { return 50.0 * std::sin(2.0 * std::numbers::pi * t); }),
       {50.0, 0.0}, {0.0, 50.0}, 1e-1});
  if (!o.error.empty()) {
    r.detail = o.error;
    return finish(r, start);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& u : o.optimal_state.trajectory.velocity) {
    const double q = o.problem->flowrate(u);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  r.measured = std::min(hi, -lo);
  r.threshold = 0.0;
  r.seconds = seconds_since(start);
  r.passed = o.optimal_state.completed() && hi > 0.0 && lo < 0.0 && r.seconds < 1800.0;
  r.detail = describe_run(o) + " min Q=" + fmt(lo) + " max Q=" + fmt(hi) + " limit=1800s";
  return r;
}

ControlVector property_control(int steps) {
  ControlVector q(2, steps);
  for (int n = 1; n <= steps; ++n) {
    const double t = static_cast<double>(n) / steps;
    q(1, n) = 8.0 * std::sin(std::numbers::pi * t);
    q(2, n) = 2.0 * t;
  }
  return q;
}

CheckResult check_divergence(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("divergence", "|B u^n|_inf <= 1e-9 at every accepted step");
  const Resolution res = experiment_resolution(profile);
  const auto problem = make_problem(default_geometry(), res.nx, res.ny, res.steps, hooks);
  const StateSolution s =
      problem->solve_state(property_control(res.steps), scaled_w(*problem, default_geometry(), 3.0));
  double worst = 0.0;
  // u^0 is an interpolant and need not be discretely solenoidal.
  for (int n = 1; n <= s.trajectory.last_step(); ++n) {
    const Eigen::VectorXd residual = problem->divergence() * s.trajectory.velocity[n];
    worst = std::max(worst, residual.lpNorm<Eigen::Infinity>());
  }
  r.measured = worst;
  r.threshold = 1e-9;
  r.passed = s.completed() && worst <= r.threshold;
  r.detail = "steps=" + std::to_string(s.trajectory.last_step());
  return finish(r, start);
}

Mesh mirrored(const Mesh& mesh) {
  std::vector<Point2> vertices;
  for (const auto& p : mesh.vertices()) vertices.push_back({p.x, -p.y});
  std::vector<std::array<int, 3>> triangles;
  for (const auto& t : mesh.triangles()) triangles.push_back({t[0], t[2], t[1]});
  return Mesh(std::move(vertices), std::move(triangles), mesh.boundary_edges(),
              mesh.num_open_segments());
}

CheckResult check_mirror(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("mirror_symmetry", "flowrate invariant under reflecting the problem about x2=0");
  const Resolution res = experiment_resolution(profile);
  const ChannelGeometry& geometry = default_geometry();
  const Mesh mesh = generate_channel_mesh(geometry, res.nx, res.ny);
  AssemblyOptions assembly;
  assembly.flip_convection_sign = hooks.flip_convection_sign;
  const FlowProblem a(mesh, TimeGrid(1.0, res.steps), {}, assembly);
  const FlowProblem b(mirrored(mesh), TimeGrid(1.0, res.steps), {}, assembly);
  const VectorField w = make_w_field(geometry);
  const auto u0 = [&](const FlowProblem& p) {
    return interpolate_velocity(p.layout(), [&](const Point2& x) {
      const Vec2 v = w(x);
      return Vec2{3.0 * v[0], 3.0 * v[1]};
    });
  };
  const ControlVector q = property_control(res.steps);
  const StateSolution sa = a.solve_state(q, u0(a));
  const StateSolution sb = b.solve_state(q, u0(b));
  double diff = 0.0;
  double scale = 0.0;
  const int steps = std::min(sa.trajectory.last_step(), sb.trajectory.last_step());
  for (int n = 0; n <= steps; ++n) {
    const double qa = a.flowrate(sa.trajectory.velocity[n]);
    const double qb = b.flowrate(sb.trajectory.velocity[n]);
    diff = std::max(diff, std::abs(qa - qb));
    scale = std::max(scale, std::abs(qa));
  }
  r.measured = scale > 0.0 ? diff / scale : diff;
  r.threshold = 1e-10;
  r.passed = sa.completed() && sb.completed() && r.measured <= r.threshold;
  r.detail = "max |Q| = " + fmt(scale);
  return finish(r, start);
}

CheckResult check_determinism(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("determinism", "identical inputs give byte-identical flowrate CSV");
  const Resolution res = experiment_resolution(profile);
  std::string first;
  bool same = true;
  for (int run = 0; run < 2; ++run) {
    const auto problem = make_problem(default_geometry(), res.nx, res.ny, res.steps, hooks);
    const StateSolution s = problem->solve_state(property_control(res.steps),
                                                 scaled_w(*problem, default_geometry(), 3.0));
    std::ostringstream csv;
    write_flowrate_csv(csv, flowrate_series(*problem, s));
    if (run == 0) {
      first = csv.str();
    } else {
      same = csv.str() == first;
    }
  }
  r.measured = same ? 0.0 : 1.0;
  r.threshold = 0.0;
  r.passed = same;
  return finish(r, start);
}

CheckResult check_time_convergence(VerifyProfile profile, const VerifyHooks& hooks) {
  const auto start = Clock::now();
  CheckResult r = named("time_convergence", "halving dt: final flowrate error ratio in [1.7, 2.3]");
  const Resolution res = experiment_resolution(profile);
  const int base = profile == VerifyProfile::Full ? 20 : 10;
  std::vector<double> finals;
  for (int steps : {base, 2 * base, 4 * base}) {
    const auto problem = make_problem(default_geometry(), res.nx, res.ny, steps, hooks);
    const StateSolution s = problem->solve_state(property_control(steps),
                                                 scaled_w(*problem, default_geometry(), 3.0));
    finals.push_back(s.completed() ? problem->flowrate(s.trajectory.velocity.back()) : NAN);
  }
  const double ratio = (finals[0] - finals[1]) / (finals[1] - finals[2]);
  r.measured = ratio;
  r.threshold = 2.3;
  r.passed = ratio >= 1.7 && ratio <= 2.3;
  r.detail = "N=" + std::to_string(base) + ",2N,4N final Q: " + fmt(finals[0]) + " " +
             fmt(finals[1]) + " " + fmt(finals[2]);
  return finish(r, start);
}

CheckResult check_negative_controls(VerifyProfile profile, const VerifyHooks&) {
  const auto start = Clock::now();
  CheckResult r = named("negative_controls",
                "corrupted convection and adjoint signs are detected by the suite");
  VerifyHooks convection;
  convection.flip_convection_sign = true;
  VerifyHooks adjoint;
  adjoint.flip_adjoint_sign = true;
  const CheckResult tri = check_trilinear(profile, convection);
  const CheckResult grad = check_gradient(profile, adjoint);
  r.passed = !tri.passed && !grad.passed;
  r.measured = std::min(tri.measured, grad.measured);
  r.threshold = 1e-6;
  r.detail = "corrupted trilinear defect=" + fmt(tri.measured) +
             " corrupted gradient error=" + fmt(grad.measured);
  return finish(r, start);
}

}  // namespace

const std::vector<RegisteredCheck>& registered_checks() {
  static const std::vector<RegisteredCheck> checks{
      {"poiseuille", check_poiseuille},
      {"gradient", check_gradient},
      {"duality", check_duality},
      {"curvature", check_curvature},
      {"trilinear", check_trilinear},
      {"blowup", check_blowup},
      {"optimal_control", check_optimal_control},
      {"blowup_prevention", check_blowup_prevention},
      {"bidirectional", check_bidirectional},
      {"divergence", check_divergence},
      {"mirror_symmetry", check_mirror},
      {"determinism", check_determinism},
      {"time_convergence", check_time_convergence},
      {"negative_controls", check_negative_controls},
  };
  return checks;
}

VerificationReport run_all(VerifyProfile profile, const VerifyHooks& hooks,
                           const std::vector<std::string>& only,
                           const std::function<void(const CheckResult&)>& observer) {
  VerificationReport report;
  for (const auto& check : registered_checks()) {
    if (!only.empty() && std::find(only.begin(), only.end(), check.id) == only.end()) continue;
    CheckResult result;
    try {
      result = check.run(profile, hooks);
    } catch (const std::exception& e) {
      result.id = check.id;
      result.passed = false;
      result.detail = std::string("exception: ") + e.what();
    }
    if (observer) observer(result);
    report.checks.push_back(std::move(result));
  }
  return report;
}

namespace {

std::string csv_field(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_report_csv(std::ostream& out, const VerificationReport& report) {
  out << "id,passed,measured,threshold,seconds,detail\n";
  for (const auto& c : report.checks) {
    out << c.id << ',' << (c.passed ? 1 : 0) << ',' << format_double(c.measured) << ','
        << format_double(c.threshold) << ',' << format_double(c.seconds) << ','
        << csv_field(c.detail) << '\n';
  }
}

void write_report_text(std::ostream& out, const VerificationReport& report) {
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.id << "  measured=" << format_double(c.measured)
        << " threshold=" << format_double(c.threshold) << " (" << format_double(c.seconds)
        << "s)  " << c.detail << '\n';
  }
  out << (report.all_passed() ? "all checks passed" : "some checks failed") << '\n';
}

}  // namespace dnflow
