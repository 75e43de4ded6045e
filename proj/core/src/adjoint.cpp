#include "dnflow/adjoint.hpp"

#include <stdexcept>

namespace dnflow {

AdjointTrajectory solve_adjoint(const LinearizedTrajectory& lin,
                                const std::vector<Eigen::VectorXd>& loads) {
  const FlowProblem& problem = lin.problem();
  const int steps = lin.steps();
  const int nu = problem.layout().num_velocity_dofs();
  const int np = problem.layout().num_pressure_dofs();
  if (static_cast<int>(loads.size()) != steps + 1) {
    throw std::invalid_argument("adjoint needs one load per time level");
  }

  AdjointTrajectory z;
  z.dt = problem.grid().dt();
  z.velocity.assign(steps + 1, Eigen::VectorXd::Zero(nu));
  z.pressure.assign(steps + 1, Eigen::VectorXd::Zero(np));
  Eigen::VectorXd rhs(problem.layout().num_dofs());
  for (int n = steps; n >= 1; --n) {
    if (loads[n].size() != nu) throw std::invalid_argument("adjoint load has wrong length");
    rhs.head(nu) = loads[n] + problem.mass() * z.velocity[n] / z.dt;
    rhs.tail(np).setZero();
    problem.step_system().eliminate(rhs);
    const Eigen::VectorXd x = lin.jacobian(n).solve_transposed(rhs);
    z.velocity[n - 1] = x.head(nu);
    z.pressure[n - 1] = x.tail(np);
  }
  return z;
}

std::vector<Eigen::VectorXd> tracking_loads(const FlowProblem& problem, const Trajectory& state,
                                            const std::vector<Eigen::VectorXd>& targets) {
  if (targets.size() != state.velocity.size()) {
    throw std::invalid_argument("need one target per time level");
  }
  std::vector<Eigen::VectorXd> loads(targets.size());
  loads[0] = Eigen::VectorXd::Zero(problem.layout().num_velocity_dofs());
  for (std::size_t n = 1; n < targets.size(); ++n) {
    loads[n] = problem.assembler().tracking_terms(state.velocity[n], targets[n], false).residual;
  }
  return loads;
}

AdjointTrajectory solve_tracking_adjoint(const LinearizedTrajectory& lin,
                                         const std::vector<Eigen::VectorXd>& targets) {
  return solve_adjoint(lin, tracking_loads(lin.problem(), lin.state(), targets));
}

}  // namespace dnflow
