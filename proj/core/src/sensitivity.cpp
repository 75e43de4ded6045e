#include "dnflow/sensitivity.hpp"

#include <stdexcept>

namespace dnflow {

LinearizedTrajectory::LinearizedTrajectory(const FlowProblem& problem, const Trajectory& state)
    : problem_(&problem), state_(&state) {
  if (state.last_step() != problem.grid().steps()) {
    throw std::invalid_argument("linearization requires a trajectory on the whole time grid");
  }
  if (state.model == FlowModel::Stokes) {
    jacobians_.push_back(problem.step_jacobian(state.velocity[0], FlowModel::Stokes));
    return;
  }
  jacobians_.reserve(state.last_step());
  for (int n = 1; n <= state.last_step(); ++n) {
    jacobians_.push_back(problem.step_jacobian(state.velocity[n], FlowModel::NavierStokes));
  }
}

const FactorizedSystem& LinearizedTrajectory::jacobian(int step) const {
  if (step < 1 || step > steps()) throw std::out_of_range("step out of range");
  return jacobians_.size() == 1 ? jacobians_.front() : jacobians_[step - 1];
}

namespace {

Trajectory zero_like(const FlowProblem& problem, const Trajectory& state) {
  Trajectory t;
  t.model = state.model;
  t.dt = state.dt;
  t.velocity.push_back(Eigen::VectorXd::Zero(problem.layout().num_velocity_dofs()));
  t.pressure.push_back(Eigen::VectorXd::Zero(problem.layout().num_pressure_dofs()));
  return t;
}

// Marches J_n x^n = [M/dt u^{n-1} + forcing(n); 0].
template <typename Forcing>
Trajectory march_linearized(const LinearizedTrajectory& lin, Forcing&& forcing) {
  const FlowProblem& problem = lin.problem();
  const int nu = problem.layout().num_velocity_dofs();
  const int np = problem.layout().num_pressure_dofs();
  Trajectory out = zero_like(problem, lin.state());
  Eigen::VectorXd rhs(problem.layout().num_dofs());
  for (int n = 1; n <= lin.steps(); ++n) {
    rhs.head(nu) = problem.mass() * out.velocity.back() / problem.grid().dt() + forcing(n);
    rhs.tail(np).setZero();
    problem.step_system().eliminate(rhs);
    const Eigen::VectorXd x = lin.jacobian(n).solve(rhs);
    out.velocity.push_back(x.head(nu));
    out.pressure.push_back(x.tail(np));
  }
  return out;
}

}  // namespace

Trajectory solve_tangent(const LinearizedTrajectory& lin, const ControlVector& dq) {
  const FlowProblem& problem = lin.problem();
  if (dq.segments() != problem.num_open_segments() || dq.steps() != lin.steps()) {
    throw std::invalid_argument("control direction does not match the problem");
  }
  return march_linearized(lin, [&](int n) { return problem.control_load(dq, n); });
}

Trajectory solve_tangent(const FlowProblem& problem, const Trajectory& state,
                         const ControlVector& dq) {
  return solve_tangent(LinearizedTrajectory(problem, state), dq);
}

Trajectory solve_second_tangent(const LinearizedTrajectory& lin, const Trajectory& du,
                                const Trajectory& ru) {
  const FlowProblem& problem = lin.problem();
  if (du.last_step() != lin.steps() || ru.last_step() != lin.steps()) {
    throw std::invalid_argument("tangent trajectories do not match the state");
  }
  const bool convective = lin.state().model == FlowModel::NavierStokes;
  const int nu = problem.layout().num_velocity_dofs();
  return march_linearized(lin, [&](int n) -> Eigen::VectorXd {
    if (!convective) return Eigen::VectorXd::Zero(nu);
    const auto& a = du.velocity[n];
    const auto& b = ru.velocity[n];
    return -(problem.assembler().convection_vector(a, b) +
             problem.assembler().convection_vector(b, a));
  });
}

Trajectory solve_second_tangent(const FlowProblem& problem, const Trajectory& state,
                                const Trajectory& du, const Trajectory& ru) {
  return solve_second_tangent(LinearizedTrajectory(problem, state), du, ru);
}

}  // namespace dnflow
