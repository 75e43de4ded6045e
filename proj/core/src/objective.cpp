#include "dnflow/objective.hpp"

#include <cmath>
#include <limits>

namespace dnflow {

StateBlowupError::StateBlowupError(BlowupReport report)
    : std::runtime_error("state blows up at t=" + std::to_string(report.time) + " (" +
                         to_string(report.trigger) + ")"),
      report_(std::move(report)) {}

ReducedObjective::ReducedObjective(const FlowProblem& problem, Eigen::VectorXd initial_velocity,
                                   ObjectiveData data, ObjectiveOptions options)
    : problem_(&problem),
      initial_velocity_(std::move(initial_velocity)),
      data_(std::move(data)),
      options_(options) {
  if (!(data_.alpha > 0.0) || !std::isfinite(data_.alpha)) {
    throw std::invalid_argument("regularization weight alpha must be positive");
  }
  require_shape(data_.desired_control);
  if (!data_.desired_control.all_finite()) throw std::invalid_argument("q_d must be finite");
  if (initial_velocity_.size() != problem.layout().num_velocity_dofs()) {
    throw std::invalid_argument("initial velocity has wrong length");
  }
  const TimeGrid& grid = problem.grid();
  targets_.reserve(grid.steps() + 1);
  for (int n = 0; n <= grid.steps(); ++n) {
    const double t = grid.time(n);
    targets_.push_back(interpolate_velocity(
        problem.layout(), [&](const Point2& p) { return data_.target(t, p); }));
  }
}

void ReducedObjective::require_shape(const ControlVector& q) const {
  if (q.segments() != problem_->num_open_segments() || q.steps() != problem_->grid().steps()) {
    throw std::invalid_argument("control does not match the problem dimensions");
  }
}

double ReducedObjective::tracking(const Trajectory& state) const {
  double sum = 0.0;
  for (int n = 1; n <= state.last_step(); ++n) {
    sum += problem_->assembler().tracking_value(state.velocity[n], targets_[n]);
  }
  return problem_->grid().dt() * sum;
}

double ReducedObjective::regularization(const ControlVector& q) const {
  require_shape(q);
  const ControlVector diff = q - data_.desired_control;
  return 0.5 * data_.alpha * problem_->grid().dt() * diff.dot(diff);
}

Evaluation ReducedObjective::evaluate_with_state(const ControlVector& q) const {
  require_shape(q);
  Evaluation out;
  out.state = problem_->solve_state(q, initial_velocity_);
  auto& report = out.report;
  report.control = q;
  report.regularization = regularization(q);
  if (!out.state.completed()) {
    report.blowup = out.state.blowup;
    report.tracking = std::numeric_limits<double>::infinity();
    report.value = std::numeric_limits<double>::infinity();
    return out;
  }
  report.tracking = tracking(out.state.trajectory);
  report.value = report.tracking + report.regularization;
  return out;
}

ObjectiveReport ReducedObjective::evaluate(const ControlVector& q) const {
  return evaluate_with_state(q).report;
}

ControlVector ReducedObjective::adjoint_pairing(const ControlVector& c,
                                               const AdjointTrajectory& z) const {
  require_shape(c);
  const double dt = problem_->grid().dt();
  const double sign = options_.flip_adjoint_sign ? 1.0 : -1.0;
  const auto& loads = problem_->boundary_loads();
  ControlVector g(c.segments(), c.steps());
  for (int i = 1; i <= c.segments(); ++i) {
    for (int n = 1; n <= c.steps(); ++n) {
      const double boundary = loads[i - 1].dot(z.velocity[n - 1]);
      g(i, n) = dt * (data_.alpha * c(i, n) + sign * boundary);
    }
  }
  return g;
}

ControlVector ReducedObjective::gradient(const ControlVector& q, const AdjointTrajectory& z) const {
  require_shape(q);
  return adjoint_pairing(q - data_.desired_control, z);
}

ControlVector ReducedObjective::gradient(const ControlVector& q, const Trajectory& state) const {
  const LinearizedTrajectory lin(*problem_, state);
  return gradient(q, solve_tracking_adjoint(lin, targets_));
}

GradientResult ReducedObjective::gradient(const ControlVector& q) const {
  Evaluation eval = evaluate_with_state(q);
  if (eval.report.blew_up()) throw StateBlowupError(*eval.report.blowup);
  GradientResult out;
  out.gradient = gradient(q, eval.state.trajectory);
  out.report = std::move(eval.report);
  return out;
}

double ReducedObjective::curvature(const ControlVector& q, const ControlVector& dq) const {
  require_shape(q);
  require_shape(dq);
  const StateSolution state = problem_->solve_state(q, initial_velocity_);
  if (!state.completed()) throw StateBlowupError(*state.blowup);
  const Trajectory& u = state.trajectory;
  const LinearizedTrajectory lin(*problem_, u);
  const Trajectory du = solve_tangent(lin, dq);
  const Trajectory d2u = solve_second_tangent(lin, du, du);

  const FlowAssembler& assembler = problem_->assembler();
  double state_part = 0.0;
  for (int n = 1; n <= u.last_step(); ++n) {
    state_part += assembler.tracking_curvature(u.velocity[n], targets_[n], du.velocity[n]);
    const Eigen::VectorXd r =
        assembler.tracking_terms(u.velocity[n], targets_[n], false).residual;
    state_part += r.dot(d2u.velocity[n]);
  }
  const double dt = problem_->grid().dt();
  return dt * (data_.alpha * dq.dot(dq) + state_part);
}

HessianOperator::HessianOperator(const ReducedObjective& objective, const ControlVector& q,
                                 Trajectory state)
    : objective_(&objective),
      state_(std::move(state)),
      lin_(objective.problem(), state_),
      adjoint_(solve_tracking_adjoint(lin_, objective.targets())),
      gradient_(objective.gradient(q, adjoint_)) {
  const FlowAssembler& assembler = objective.problem().assembler();
  tracking_hessians_.reserve(state_.last_step() + 1);
  tracking_hessians_.emplace_back();
  for (int n = 1; n <= state_.last_step(); ++n) {
    tracking_hessians_.push_back(
        assembler.tracking_terms(state_.velocity[n], objective.targets()[n], true).hessian);
  }
}

ControlVector HessianOperator::apply(const ControlVector& dq) const {
  const FlowProblem& problem = objective_->problem();
  const FlowAssembler& assembler = problem.assembler();
  const Trajectory du = solve_tangent(lin_, dq);
  const bool convective = state_.model == FlowModel::NavierStokes;
  std::vector<Eigen::VectorXd> loads(du.velocity.size());
  loads[0] = Eigen::VectorXd::Zero(problem.layout().num_velocity_dofs());
  for (int n = 1; n <= du.last_step(); ++n) {
    const Eigen::VectorXd& v = du.velocity[n];
    loads[n] = tracking_hessians_[n] * v;
    if (convective) {
      // Derivative of the convection term of J_n^T z[n-1] in the direction du^n.
      const Eigen::VectorXd& z = adjoint_.velocity[n - 1];
      loads[n] -= assembler.convection(v).transpose() * z;
      loads[n] -= assembler.convection_linearization(v).transpose() * z;
    }
  }
  return objective_->adjoint_pairing(dq, solve_adjoint(lin_, loads));
}

}  // namespace dnflow
