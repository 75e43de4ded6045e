#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "dnflow/adjoint.hpp"
#include "dnflow/control.hpp"
#include "dnflow/fields.hpp"
#include "dnflow/sensitivity.hpp"
#include "dnflow/state.hpp"

namespace dnflow {

/// Data of j(q) = 1/4 |S(q) - u_d|^4_{L4(I x Omega)} + alpha/2 |q - q_d|^2_{L2(I)}.
struct ObjectiveData {
  SpaceTimeField target;
  ControlVector desired_control;
  double alpha = 1.0;
};

struct ObjectiveReport {
  /// +infinity when the state blew up.
  double value = 0.0;
  double tracking = 0.0;
  double regularization = 0.0;
  ControlVector control;
  std::optional<BlowupReport> blowup;

  bool blew_up() const { return blowup.has_value(); }
};

/// The gradient is undefined where the forward solve blows up.
class StateBlowupError : public std::runtime_error {
 public:
  explicit StateBlowupError(BlowupReport report);
  const BlowupReport& report() const { return report_; }

 private:
  BlowupReport report_;
};

struct ObjectiveOptions {
  /// Test hook: negate the adjoint boundary term of the gradient.
  bool flip_adjoint_sign = false;
};

struct Evaluation {
  ObjectiveReport report;
  StateSolution state;
};

struct GradientResult {
  /// Euclidean gradient: <g, dq> = j'(q) dq for the flat control vector.
  ControlVector gradient;
  ObjectiveReport report;
};

/// Reduced objective of the discrete problem. Time integrals use the
/// right-endpoint rule dt sum_{n=1..N} matching the left-continuous
/// controls; space integrals of the quartic are exact for P2 fields.
class ReducedObjective {
 public:
  ReducedObjective(const FlowProblem& problem, Eigen::VectorXd initial_velocity,
                   ObjectiveData data, ObjectiveOptions options = {});

  const FlowProblem& problem() const { return *problem_; }
  const ObjectiveData& data() const { return data_; }
  const Eigen::VectorXd& initial_velocity() const { return initial_velocity_; }
  /// P2 interpolants of u_d(t_n), n = 0..N.
  const std::vector<Eigen::VectorXd>& targets() const { return targets_; }
  double alpha() const { return data_.alpha; }

  ObjectiveReport evaluate(const ControlVector& q) const;
  Evaluation evaluate_with_state(const ControlVector& q) const;

  GradientResult gradient(const ControlVector& q) const;
  /// Gradient from an already converged state at q.
  ControlVector gradient(const ControlVector& q, const Trajectory& state) const;
  /// Gradient assembled from a given adjoint (exposes the index pairing).
  ControlVector gradient(const ControlVector& q, const AdjointTrajectory& z) const;
  /// dt (alpha c_i^n -/+ b_i^T z[n-1]): the gradient for c = q - q_d, and a
  /// Hessian product for c = dq with a second-order adjoint z.
  ControlVector adjoint_pairing(const ControlVector& c, const AdjointTrajectory& z) const;

  /// Second derivative j''(q)(dq, dq).
  double curvature(const ControlVector& q, const ControlVector& dq) const;

  double tracking(const Trajectory& state) const;
  double regularization(const ControlVector& q) const;

 private:
  void require_shape(const ControlVector& q) const;

  const FlowProblem* problem_;
  Eigen::VectorXd initial_velocity_;
  ObjectiveData data_;
  ObjectiveOptions options_;
  std::vector<Eigen::VectorXd> targets_;
};

/// Exact Hessian of j at a fixed control, applied matrix-free. Construction
/// factorizes the step Jacobians once (the cost of one gradient); every
/// product then needs only triangular solves: a tangent sweep forward and a
/// second-order adjoint sweep backward with loads
///   H_n du^n - (C(du^n) + C'(du^n))^T z[n-1],
/// where H_n is the Hessian of the quartic at u^n.
class HessianOperator {
 public:
  /// `state` must be the converged trajectory at `q`.
  HessianOperator(const ReducedObjective& objective, const ControlVector& q, Trajectory state);
  HessianOperator(const HessianOperator&) = delete;
  HessianOperator& operator=(const HessianOperator&) = delete;

  const ControlVector& gradient() const { return gradient_; }
  ControlVector apply(const ControlVector& dq) const;

 private:
  const ReducedObjective* objective_;
  Trajectory state_;
  LinearizedTrajectory lin_;
  AdjointTrajectory adjoint_;
  std::vector<SparseMatrix> tracking_hessians_;
  ControlVector gradient_;
};

}  // namespace dnflow
