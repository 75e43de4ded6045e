#pragma once

#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "dnflow/fields.hpp"
#include "dnflow/geometry.hpp"
#include "dnflow/objective.hpp"

namespace dnflow {

/// Exact steady Do-Nothing channel flow of a straight channel: velocity
/// (dq / 2L)(r^2 - x2^2, 0), pressure q1 + (q2 - q1) x1 / L and flowrate
/// 2 dq r^3 / (3L) with dq = q1 - q2.
struct PoiseuilleSolution {
  VectorField velocity;
  ScalarField pressure;
  double flowrate = 0.0;
};

/// Throws GeometryError unless r == R.
PoiseuilleSolution poiseuille_oracle(const ChannelGeometry& geometry, double q1, double q2);

/// Smooth random control: a few random sine modes per segment plus an offset.
ControlVector smooth_random_control(int segments, int steps, std::mt19937& rng, double scale);

struct FiniteDifferenceRow {
  double epsilon = 0.0;
  double difference = 0.0;
  double relative_error = 0.0;
};

struct FiniteDifferenceCheck {
  double analytic = 0.0;
  std::vector<FiniteDifferenceRow> rows;
  double min_relative_error = 0.0;
};

/// Default step sweep 1e-2, 1e-3, ..., 1e-7.
std::vector<double> default_fd_steps();

/// <g(q), dq> against central differences of j.
FiniteDifferenceCheck check_gradient_fd(const ReducedObjective& objective, const ControlVector& q,
                                        const ControlVector& dq,
                                        const std::vector<double>& steps = default_fd_steps());

/// j''(q)(dq, dq) against central differences of <g, dq>.
FiniteDifferenceCheck check_curvature_fd(const ReducedObjective& objective,
                                         const ControlVector& q, const ControlVector& dq,
                                         const std::vector<double>& steps = {1e-2, 1e-3, 1e-4,
                                                                             1e-5});

/// Relative defect of sum_n dt <r^n, du^n> = -sum dt dq_i^n b_i^T z[n-1] for
/// random velocity loads r^n and a random direction dq.
double duality_defect(const FlowProblem& problem, const Trajectory& state, std::mt19937& rng);

/// Relative defect of v^T C(u) v = 1/2 int_dOmega (u.n)|v|^2 - 1/2 int (div u)|v|^2,
/// with the right side integrated by an independent quadrature.
double trilinear_defect(const FlowProblem& problem, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v);

enum class VerifyProfile { Quick, Full };

/// Test-only sign corruptions, used as negative controls.
struct VerifyHooks {
  bool flip_convection_sign = false;
  bool flip_adjoint_sign = false;
};

struct CheckResult {
  std::string id;
  std::string description;
  bool passed = false;
  /// Headline quantity and the bound it is compared against.
  double measured = 0.0;
  double threshold = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

using CheckFunction = std::function<CheckResult(VerifyProfile, const VerifyHooks&)>;

struct RegisteredCheck {
  std::string id;
  CheckFunction run;
};

/// Every registered check, in acceptance order.
const std::vector<RegisteredCheck>& registered_checks();

/// Runs the registered checks whose id is in `only` (all when empty).
VerificationReport run_all(VerifyProfile profile, const VerifyHooks& hooks = {},
                           const std::vector<std::string>& only = {},
                           const std::function<void(const CheckResult&)>& observer = {});

void write_report_csv(std::ostream& out, const VerificationReport& report);
void write_report_text(std::ostream& out, const VerificationReport& report);

}  // namespace dnflow
