#include "dnflow/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <optional>

namespace dnflow {

InfeasibleStartError::InfeasibleStartError(const BlowupReport& report)
    : std::runtime_error("initial control leads to blowup at t=" + std::to_string(report.time) +
                         "; supply a stabilizing initial control (for example an opposing "
                         "pressure drop q0 = (0, 50))"),
      report_(report) {}

double stationarity(const ControlVector& q, const ControlVector& gradient,
                    const BoxBounds& bounds, double dt) {
  return (project(q - gradient, bounds) - q).norm() / dt;
}

namespace {

IterationRecord make_record(int iteration, const ObjectiveReport& report, double measure,
                            double step, int blowups) {
  return {iteration, report.value, report.tracking, report.regularization, measure, step, blowups};
}

// Zeroes the entries held at a bound by a gradient pointing outward.
ControlVector free_part(const ControlVector& v, const ControlVector& q,
                        const ControlVector& gradient, const BoxBounds& bounds) {
  ControlVector out = v;
  for (int i = 1; i <= q.segments(); ++i) {
    const double lo = bounds.lower[i - 1];
    const double hi = bounds.upper[i - 1];
    for (int n = 1; n <= q.steps(); ++n) {
      const bool held = (q(i, n) <= lo && gradient(i, n) > 0.0) ||
                        (q(i, n) >= hi && gradient(i, n) < 0.0);
      if (held) out(i, n) = 0.0;
    }
  }
  return out;
}

struct CurvaturePair {
  ControlVector s;
  ControlVector y;
  double rho;
};

// Two-loop recursion; all inner products are Euclidean multiples of the
// L2(I) ones, and the common factor dt cancels.
ControlVector lbfgs_apply(const std::deque<CurvaturePair>& pairs, ControlVector v) {
  std::vector<double> a(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    a[k] = pairs[k].rho * pairs[k].s.dot(v);
    v -= a[k] * pairs[k].y;
  }
  const CurvaturePair& last = pairs.back();
  v *= last.s.dot(last.y) / last.y.dot(last.y);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double b = pairs[k].rho * pairs[k].y.dot(v);
    v += (a[k] - b) * pairs[k].s;
  }
  return v;
}

// Truncated conjugate gradients for H d = -g on the free variables, stopped
// at the forcing tolerance. A direction p of non-positive curvature ends the
// iteration; the step then also moves along p, signed downhill, by
// |g| / |p^T H p / p^T p|. That is where the quadratic model's negative
// curvature term catches up with its gradient term, and backtracking shortens it.
ControlVector newton_direction(const HessianOperator& hessian, const ControlVector& g,
                               const ControlVector& q, const BoxBounds& bounds,
                               double forcing, int max_iterations) {
  const ControlVector gf = free_part(g, q, g, bounds);
  ControlVector d = 0.0 * gf;
  ControlVector r = -1.0 * gf;
  ControlVector p = r;
  double rr = r.dot(r);
  const double target = forcing * std::sqrt(rr);
  for (int k = 0; k < max_iterations; ++k) {
    const ControlVector hp = free_part(hessian.apply(p), q, g, bounds);
    const double curvature = p.dot(hp);
    if (!(curvature > 0.0)) {
      const double pp = p.dot(p);
      const double rayleigh = std::abs(curvature) / pp;
      const double length = rayleigh > 0.0 ? std::sqrt(gf.dot(gf)) / rayleigh : 1.0;
      const double sign = p.dot(gf) > 0.0 ? -1.0 : 1.0;
      return d + (sign * length / std::sqrt(pp)) * p;
    }
    const double a = rr / curvature;
    d += a * p;
    r -= a * hp;
    const double rr_next = r.dot(r);
    if (std::sqrt(rr_next) <= target) break;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return d;
}

}  // namespace

OptimizationResult optimize(const ReducedObjective& objective, const ControlVector& q0,
                            const BoxBounds& bounds, const OptimizerOptions& options,
                            const std::function<void(const IterationRecord&)>& observer) {
  const double dt = objective.problem().grid().dt();
  bounds.validate(q0.segments());
  if (options.memory < 1) throw std::invalid_argument("optimizer memory must be at least 1");
  const bool newton = options.direction == SearchDirection::NewtonCg;

  // Gradient at a converged state; the Newton variant keeps the Hessian too.
  struct Derivatives {
    ControlVector gradient;
    std::unique_ptr<HessianOperator> hessian;
  };
  const auto differentiate = [&](const ControlVector& at, const Trajectory& state) {
    Derivatives out;
    if (newton) {
      out.hessian = std::make_unique<HessianOperator>(objective, at, state);
      out.gradient = out.hessian->gradient();
    } else {
      out.gradient = objective.gradient(at, state);
    }
    return out;
  };

  OptimizationResult result;
  ControlVector q = project(q0, bounds);
  Evaluation current = objective.evaluate_with_state(q);
  if (current.report.blew_up()) throw InfeasibleStartError(*current.report.blowup);
  Derivatives derivatives = differentiate(q, current.state.trajectory);
  const ControlVector* g = &derivatives.gradient;

  const auto log = [&](const IterationRecord& record) {
    result.log.push_back(record);
    if (observer) observer(record);
  };

  double measure = stationarity(q, *g, bounds, dt);
  const double initial_measure = measure;
  log(make_record(0, current.report, measure, 0.0, 0));

  // Riesz representative of the gradient in L2(I).
  const auto density = [dt](const ControlVector& grad) { return (1.0 / dt) * grad; };

  double bb_step = options.initial_step;
  if (!(bb_step > 0.0)) {
    double gmax = 0.0;
    const ControlVector initial_density = density(*g);
    for (double v : initial_density.values()) gmax = std::max(gmax, std::abs(v));
    bb_step = gmax > 0.0 ? 1.0 / gmax : 1.0;
  }

  std::deque<CurvaturePair> pairs;
  ControlVector previous_q;
  ControlVector previous_density;
  result.stop_reason = "maximum iterations reached";
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    if (measure <= options.tol) {
      result.converged = true;
      result.stop_reason = "stationarity tolerance reached";
      break;
    }
    const ControlVector grad = density(*g);
    if (iter > 1) {
      const ControlVector s = q - previous_q;
      const ControlVector y = grad - previous_density;
      const double sy = s.dot(y);
      if (sy > 0.0) bb_step = s.dot(s) / sy;
      if (!newton && sy > 1e-12 * s.norm() * y.norm()) {
        pairs.push_back({s, y, 1.0 / sy});
        if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
      }
    }
    bb_step = std::clamp(bb_step, options.min_step, options.max_step);

    // Search direction d and first trial step along q(s) = P(q + s d).
    ControlVector direction = -1.0 * grad;
    double step = bb_step;
    bool second_order = false;
    if (options.direction == SearchDirection::Lbfgs && !pairs.empty()) {
      ControlVector d = -1.0 * free_part(lbfgs_apply(pairs, free_part(grad, q, *g, bounds)), q,
                                         *g, bounds);
      if (d.dot(grad) < 0.0) {
        direction = std::move(d);
        step = 1.0;
        second_order = true;
      } else {
        pairs.clear();
      }
    } else if (newton) {
      const double forcing = std::min(0.5, std::sqrt(measure / initial_measure));
      ControlVector d = newton_direction(*derivatives.hessian, *g, q, bounds, forcing,
                                         options.cg_max_iterations);
      if (d.size() > 0 && d.dot(*g) < 0.0) {
        direction = std::move(d);
        step = 1.0;
        second_order = true;
      }
    }

    int blowups = 0;
    Evaluation trial;
    ControlVector q_trial;
    std::optional<Derivatives> trial_derivatives;
    const auto line_search = [&](const ControlVector& d, double step, bool sufficient_by_slope) {
      for (int k = 0; k <= options.max_backtracks && step >= options.min_step; ++k) {
        q_trial = project(q + step * d, bounds);
        trial_derivatives.reset();
        const ControlVector move = q_trial - q;
        if (move.norm() == 0.0) return 0.0;
        trial = objective.evaluate_with_state(q_trial);
        if (trial.report.blew_up()) {
          ++blowups;
        } else {
          const double decrease = sufficient_by_slope
                                      ? -options.armijo_c1 * g->dot(move)
                                      : options.armijo_c1 * move.dot(move) * dt / step;
          if (trial.report.value <= current.report.value - decrease) return step;
          // Near a minimizer the decrease drops below the rounding level of j;
          // fall back to the slope form of the Armijo test.
          const double slack = options.function_noise * std::abs(current.report.value);
          if (trial.report.value <= current.report.value + slack) {
            trial_derivatives = differentiate(q_trial, trial.state.trajectory);
            const double slope0 = g->dot(move);
            if (slope0 < 0.0 && trial_derivatives->gradient.dot(move) <=
                                    (2.0 * options.slope_delta - 1.0) * slope0) {
              return step;
            }
          }
        }
        step *= options.shrink;
      }
      return 0.0;
    };
    double accepted_step = line_search(direction, step, second_order);
    if (!(accepted_step > 0.0) && second_order) {
      // The curvature model misled the search: restart from a gradient step.
      pairs.clear();
      double gmax = 0.0;
      for (double v : grad.values()) gmax = std::max(gmax, std::abs(v));
      const double restart = std::clamp(std::min(bb_step, gmax > 0.0 ? 1.0 / gmax : 1.0),
                                        options.min_step, options.max_step);
      accepted_step = line_search(-1.0 * grad, restart, false);
    }
    if (!(accepted_step > 0.0)) {
      result.stop_reason = "line search failed";
      break;
    }

    previous_q = q;
    previous_density = grad;
    q = std::move(q_trial);
    current = std::move(trial);
    derivatives = trial_derivatives ? std::move(*trial_derivatives)
                                    : differentiate(q, current.state.trajectory);
    g = &derivatives.gradient;
    measure = stationarity(q, *g, bounds, dt);
    log(make_record(iter, current.report, measure, accepted_step, blowups));
  }
  if (!result.converged && measure <= options.tol) {
    result.converged = true;
    result.stop_reason = "stationarity tolerance reached";
  }

  result.control = q;
  result.report = current.report;
  result.gradient = *g;
  return result;
}

}  // namespace dnflow
