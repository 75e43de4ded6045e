#pragma once

#include <vector>

#include "dnflow/control.hpp"
#include "dnflow/linear_solver.hpp"
#include "dnflow/state.hpp"

namespace dnflow {

/// Factorized step Jacobians J_n of a converged state trajectory,
/// n = 1..N. They are assembled by the same path as the Newton Jacobian,
/// evaluated at the converged u^n, so tangent and adjoint solves
/// differentiate the discrete scheme exactly.
class LinearizedTrajectory {
 public:
  LinearizedTrajectory(const FlowProblem& problem, const Trajectory& state);

  const FlowProblem& problem() const { return *problem_; }
  const Trajectory& state() const { return *state_; }
  int steps() const { return state_->last_step(); }
  const FactorizedSystem& jacobian(int step) const;

 private:
  const FlowProblem* problem_;
  const Trajectory* state_;
  std::vector<FactorizedSystem> jacobians_;
};

/// First derivative du = S'(q) dq, with du^0 = 0.
Trajectory solve_tangent(const LinearizedTrajectory& lin, const ControlVector& dq);
Trajectory solve_tangent(const FlowProblem& problem, const Trajectory& state,
                         const ControlVector& dq);

/// Second derivative S''(q)(dq, rq) from the tangents du = S'(q) dq and
/// ru = S'(q) rq, with zero initial value.
Trajectory solve_second_tangent(const LinearizedTrajectory& lin, const Trajectory& du,
                                const Trajectory& ru);
Trajectory solve_second_tangent(const FlowProblem& problem, const Trajectory& state,
                                const Trajectory& du, const Trajectory& ru);

}  // namespace dnflow
