#include "dnflow/state.hpp"

#include <cmath>
#include <stdexcept>

namespace dnflow {

std::string to_string(BlowupTrigger trigger) {
  switch (trigger) {
    case BlowupTrigger::NormThreshold: return "norm-threshold";
    case BlowupTrigger::NewtonDivergence: return "newton-divergence";
    case BlowupTrigger::NonFinite: return "non-finite";
  }
  return "unknown";
}

FlowProblem::FlowProblem(Mesh mesh, TimeGrid grid, StateOptions options,
                         AssemblyOptions assembly_options)
    : mesh_(std::move(mesh)),
      grid_(grid),
      options_(options),
      layout_(mesh_),
      assembler_(mesh_, layout_, assembly_options),
      mass_(assembler_.mass()),
      stiffness_(assembler_.stiffness()),
      divergence_(assembler_.divergence()),
      loads_(assembler_.boundary_loads()) {
  if (!(options_.newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  if (options_.newton_max < 1) throw std::invalid_argument("newton_max must be >= 1");
  if (!(options_.blowup_threshold > 0.0)) {
    throw std::invalid_argument("blowup_threshold must be positive");
  }
  step_system_ = std::make_unique<StepSystem>(assembler_, 1.0 / grid_.dt());
}

double FlowProblem::flowrate(const Eigen::VectorXd& velocity) const {
  return -loads_.at(0).dot(velocity);
}

double FlowProblem::l2_norm(const Eigen::VectorXd& velocity) const {
  return std::sqrt(std::max(0.0, velocity.dot(mass_ * velocity)));
}

Eigen::VectorXd FlowProblem::control_load(const ControlVector& q, int step) const {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(layout_.num_velocity_dofs());
  for (int i = 1; i <= q.segments(); ++i) load -= q(i, step) * loads_[i - 1];
  return load;
}

Eigen::VectorXd FlowProblem::step_residual(const Eigen::VectorXd& x_new,
                                           const Eigen::VectorXd& u_old, const ControlVector& q,
                                           int step, FlowModel model) const {
  const int nu = layout_.num_velocity_dofs();
  const auto u = x_new.head(nu);
  const auto p = x_new.tail(layout_.num_pressure_dofs());
  Eigen::VectorXd r(layout_.num_dofs());
  Eigen::VectorXd ru = (mass_ * (u - u_old)) / grid_.dt() + stiffness_ * u -
                       divergence_.transpose() * p - control_load(q, step);
  if (model == FlowModel::NavierStokes) ru += assembler_.convection_vector(u, u);
  for (int d : layout_.constrained_dofs()) ru[d] = u[d];
  r.head(nu) = ru;
  r.tail(layout_.num_pressure_dofs()) = -(divergence_ * u);
  return r;
}

FactorizedSystem FlowProblem::step_jacobian(const Eigen::VectorXd& velocity,
                                            FlowModel model) const {
  return step_system_->factorize(model == FlowModel::NavierStokes ? &velocity : nullptr);
}

StateSolution FlowProblem::solve_state(const ControlVector& q, const Eigen::VectorXd& u0) const {
  return solve(q, u0, options_.model);
}

StateSolution FlowProblem::solve_state_stokes(const ControlVector& q,
                                              const Eigen::VectorXd& u0) const {
  return solve(q, u0, FlowModel::Stokes);
}

StateSolution FlowProblem::solve(const ControlVector& q, const Eigen::VectorXd& u0,
                                 FlowModel model) const {
  const int nu = layout_.num_velocity_dofs();
  const int np = layout_.num_pressure_dofs();
  if (u0.size() != nu) throw std::invalid_argument("initial velocity has wrong length");
  if (q.segments() != num_open_segments() || q.steps() != grid_.steps()) {
    throw std::invalid_argument("control does not match the open segments and time grid");
  }
  if (!q.all_finite()) throw std::invalid_argument("control values must be finite");

  StateSolution out;
  out.trajectory.model = model;
  out.trajectory.dt = grid_.dt();
  out.trajectory.velocity.push_back(u0);
  out.trajectory.pressure.push_back(Eigen::VectorXd::Zero(np));

  std::optional<FactorizedSystem> stokes_jacobian;
  if (model == FlowModel::Stokes) stokes_jacobian = step_jacobian(u0, FlowModel::Stokes);

  Eigen::VectorXd x(layout_.num_dofs());
  double last_norm = l2_norm(u0);
  const auto fail = [&](int step, BlowupTrigger trigger, std::string detail) {
    out.blowup = BlowupReport{grid_.time(step), step, trigger, last_norm, std::move(detail)};
    return out;
  };

  for (int n = 1; n <= grid_.steps(); ++n) {
    const Eigen::VectorXd& u_old = out.trajectory.velocity.back();
    x.head(nu) = u_old;
    x.tail(np) = out.trajectory.pressure.back();
    for (int d : layout_.constrained_dofs()) x[d] = 0.0;

    if (model == FlowModel::Stokes) {
      Eigen::VectorXd rhs(layout_.num_dofs());
      rhs.head(nu) = mass_ * u_old / grid_.dt() + control_load(q, n);
      rhs.tail(np).setZero();
      step_system_->eliminate(rhs);
      x = stokes_jacobian->solve(rhs);
    } else {
      bool converged = false;
      try {
        for (int it = 0; it <= options_.newton_max; ++it) {
          const Eigen::VectorXd r = step_residual(x, u_old, q, n, model);
          if (!r.allFinite()) break;
          if (r.lpNorm<Eigen::Infinity>() <= options_.newton_tol) {
            converged = true;
            break;
          }
          if (it == options_.newton_max) break;
          const Eigen::VectorXd u = x.head(nu);
          x -= step_jacobian(u, model).solve(r);
          if (!x.allFinite()) break;
        }
      } catch (const SolveError& e) {
        return fail(n, BlowupTrigger::NewtonDivergence, e.what());
      } catch (const std::invalid_argument& e) {
        return fail(n, BlowupTrigger::NonFinite, e.what());
      }
      if (!x.allFinite()) return fail(n, BlowupTrigger::NonFinite, "non-finite Newton iterate");
      if (!converged) {
        return fail(n, BlowupTrigger::NewtonDivergence,
                    "Newton did not converge in " + std::to_string(options_.newton_max) +
                        " iterations");
      }
    }

    if (!x.allFinite()) return fail(n, BlowupTrigger::NonFinite, "non-finite solution");
    const double norm = l2_norm(x.head(nu));
    if (norm > options_.blowup_threshold) {
      return fail(n, BlowupTrigger::NormThreshold, "velocity L2 norm exceeded threshold");
    }
    last_norm = norm;
    out.trajectory.velocity.push_back(x.head(nu));
    out.trajectory.pressure.push_back(x.tail(np));
  }
  return out;
}

}  // namespace dnflow
