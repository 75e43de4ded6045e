#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnflow/control.hpp"
#include "dnflow/objective.hpp"

namespace dnflow {

enum class SearchDirection {
  /// Steepest descent with Barzilai-Borwein steps.
  Gradient,
  /// Limited-memory BFGS on the variables not held by an active bound.
  Lbfgs,
  /// Truncated Newton: conjugate gradients on exact Hessian products,
  /// restricted to the variables not held by an active bound.
  NewtonCg,
};

struct OptimizerOptions {
  SearchDirection direction = SearchDirection::NewtonCg;
  /// Number of stored (s, y) pairs for the L-BFGS direction.
  int memory = 40;
  /// Stop when |P(q - g) - q|_2 / dt <= tol.
  double tol = 1e-6;
  int max_iterations = 500;
  double armijo_c1 = 1e-4;
  /// Inner conjugate-gradient iterations per Newton step.
  int cg_max_iterations = 50;
  /// Relative rounding level of j. Within it, a trial is judged by the slope
  /// test j'(q+)(q+ - q) <= (2 delta - 1) j'(q)(q+ - q) instead of by values;
  /// for a quadratic this is sufficient decrease with constant delta.
  double function_noise = 1e-10;
  double slope_delta = 0.1;
  double shrink = 0.5;
  int max_backtracks = 60;
  /// First trial step; <= 0 picks 1 / |grad|_inf.
  double initial_step = 0.0;
  double min_step = 1e-14;
  double max_step = 1e8;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double tracking = 0.0;
  double regularization = 0.0;
  double stationarity = 0.0;
  double step = 0.0;
  int blowups_in_linesearch = 0;
};

struct OptimizationResult {
  ControlVector control;
  ObjectiveReport report;
  ControlVector gradient;
  std::vector<IterationRecord> log;
  bool converged = false;
  std::string stop_reason;
};

/// Raised when the initial control is outside the solvable set.
class InfeasibleStartError : public std::runtime_error {
 public:
  explicit InfeasibleStartError(const BlowupReport& report);
  const BlowupReport& report() const { return report_; }

 private:
  BlowupReport report_;
};

/// Projected-gradient stationarity measure |P(q - g) - q|_2 / dt.
double stationarity(const ControlVector& q, const ControlVector& gradient,
                    const BoxBounds& bounds, double dt);

/// Projected descent in the L2(I) metric with Armijo backtracking along the
/// projected path q(s) = P(q + s d). A trial control whose state blows up
/// counts as j = +infinity and is rejected by the line search.
///
/// With SearchDirection::Gradient, d = -grad and the first trial step is the
/// Barzilai-Borwein value; accepted iterates satisfy
///   j(q+) <= j(q) - c1 |q+ - q|^2_{L2(I)} / step.
/// With SearchDirection::Lbfgs or NewtonCg, d is the quasi-Newton or the
/// truncated Newton direction on the free variables, the first trial step is
/// 1, and accepted iterates satisfy
///   j(q+) <= j(q) + c1 j'(q)(q+ - q).
/// The Newton system is solved to the relative residual
/// min(1/2, sqrt(measure / initial measure)). If conjugate gradients meet
/// non-positive curvature, the direction also follows that curvature
/// direction downhill, with length |g| / |Rayleigh quotient|.
/// When j(q+) agrees with j(q) to within the rounding level, the slope test
/// replaces the value test, since value differences are then pure noise.
OptimizationResult optimize(const ReducedObjective& objective, const ControlVector& q0,
                            const BoxBounds& bounds, const OptimizerOptions& options,
                            const std::function<void(const IterationRecord&)>& observer = {});

}  // namespace dnflow
