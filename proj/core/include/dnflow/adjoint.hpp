#pragma once

#include <vector>

#include <Eigen/Core>

#include "dnflow/sensitivity.hpp"

namespace dnflow {

/// Discrete adjoint velocity/pressure z[n], n = 0..N, with z[N] = 0.
///
/// z[n-1] solves J_n^T z[n-1] = [r^n + M/dt z[n]; 0], the transpose of the
/// tangent step from t_{n-1} to t_n. With this indexing the control q^n on
/// (t_{n-1}, t_n] pairs with z[n-1]:
///
///   sum_n dt <r^n, du^n> = -sum_i sum_n dt dq_i^n b_i^T z[n-1].
struct AdjointTrajectory {
  double dt = 0.0;
  std::vector<Eigen::VectorXd> velocity;
  std::vector<Eigen::VectorXd> pressure;

  int last_step() const { return static_cast<int>(velocity.size()) - 1; }
};

/// Backward sweep with given per-step velocity loads; `loads[n]` for
/// n = 1..N (entry 0 is ignored). Constrained rows of the loads are dropped.
AdjointTrajectory solve_adjoint(const LinearizedTrajectory& lin,
                                const std::vector<Eigen::VectorXd>& loads);

/// Tracking residuals r^n = int |u^n - u_d^n|^2 (u^n - u_d^n) . phi for
/// n = 1..N, where `targets[n]` is the P2 interpolant of u_d(t_n).
std::vector<Eigen::VectorXd> tracking_loads(const FlowProblem& problem, const Trajectory& state,
                                            const std::vector<Eigen::VectorXd>& targets);

/// Adjoint of the L4 tracking term.
AdjointTrajectory solve_tracking_adjoint(const LinearizedTrajectory& lin,
                                         const std::vector<Eigen::VectorXd>& targets);

}  // namespace dnflow
