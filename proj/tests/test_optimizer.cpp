#include <doctest.h>

#include <limits>
#include <numbers>
#include <random>

#include "dnflow/optimizer.hpp"
#include "dnflow/verify.hpp"
#include "support.hpp"

using namespace dnflow;
using dnflow::test::channel_problem;
using dnflow::test::w_interpolant;

namespace {

SpaceTimeField w_times(std::function<double(double)> profile) {
  const VectorField w = make_w_field(dnflow::test::default_channel());
  return [w, profile](double t, const Point2& p) {
    const Vec2 v = w(p);
    return Vec2{profile(t) * v[0], profile(t) * v[1]};
  };
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("projection and stationarity measure") {
  ControlVector q = ControlVector::constant({-2.0, 5.0}, 3);
  const BoxBounds bounds{{-1.0, -kInf}, {1.0, 4.0}};
  const ControlVector p = project(q, bounds);
  for (int n = 1; n <= 3; ++n) {
    CHECK(p(1, n) == -1.0);
    CHECK(p(2, n) == 4.0);
  }
  // At a lower bound with a gradient pushing outward the measure vanishes.
  const ControlVector at_bound = ControlVector::constant({-1.0, 0.0}, 3);
  const ControlVector g = ControlVector::constant({0.5, 0.0}, 3);
  CHECK(stationarity(at_bound, g, bounds, 0.1) == 0.0);
  const ControlVector g2 = ControlVector::constant({0.0, 0.3}, 3);
  CHECK(stationarity(at_bound, g2, bounds, 0.1) == doctest::Approx(std::sqrt(3.0) * 0.3 / 0.1));
  CHECK_THROWS(BoxBounds({{1.0, 0.0}, {0.0, 1.0}}).validate(2));
}

TEST_CASE("convex Stokes problem is solved to tolerance with monotone decrease") {
  StateOptions options;
  options.model = FlowModel::Stokes;
  const auto problem = channel_problem(6, 4, 10, options);
  const ReducedObjective j(*problem, w_interpolant(*problem, 2.0),
                           {w_times([](double t) { return 5.0 * t; }), ControlVector(2, 10), 1e-2});
  for (SearchDirection direction :
       {SearchDirection::NewtonCg, SearchDirection::Lbfgs, SearchDirection::Gradient}) {
    OptimizerOptions opt;
    opt.direction = direction;
    opt.tol = 1e-6;
    opt.max_iterations = 2000;
    const OptimizationResult r = optimize(j, ControlVector(2, 10), BoxBounds::unbounded(2), opt);
    CHECK(r.converged);
    CHECK(r.log.back().stationarity <= 1e-6);
    for (std::size_t k = 1; k < r.log.size(); ++k) CHECK(r.log[k].objective < r.log[k - 1].objective);
    CHECK(r.log.front().iteration == 0);
    // Fixed point of the gradient map at the optimum.
    CHECK(r.gradient.norm() / problem->grid().dt() <= 1e-6);
  }
}

TEST_CASE("box bounds are respected and become active") {
  StateOptions options;
  options.model = FlowModel::Stokes;
  const auto problem = channel_problem(6, 4, 10, options);
  const ReducedObjective j(*problem, Eigen::VectorXd::Zero(problem->layout().num_velocity_dofs()),
                           {w_times([](double) { return 20.0; }), ControlVector(2, 10), 1e-2});
  const BoxBounds bounds{{-2.0, -2.0}, {2.0, 2.0}};
  OptimizerOptions opt;
  opt.tol = 1e-6;
  opt.max_iterations = 1000;
  const OptimizationResult r = optimize(j, ControlVector(2, 10), bounds, opt);
  CHECK(r.converged);
  int active = 0;
  for (int i = 1; i <= 2; ++i) {
    for (int n = 1; n <= 10; ++n) {
      CHECK(r.control(i, n) >= -2.0);
      CHECK(r.control(i, n) <= 2.0);
      if (std::abs(std::abs(r.control(i, n)) - 2.0) < 1e-12) ++active;
    }
  }
  CHECK(active > 0);
  // Projection formula: inactive entries have zero gradient, active ones
  // have a gradient pointing out of the box.
  for (int i = 1; i <= 2; ++i) {
    for (int n = 1; n <= 10; ++n) {
      const double q = r.control(i, n);
      const double g = r.gradient(i, n) / problem->grid().dt();
      if (q == 2.0) CHECK(g <= 1e-6);
      if (q == -2.0) CHECK(g >= -1e-6);
    }
  }
}

TEST_CASE("infeasible start is reported") {
  const auto problem = channel_problem(8, 4, 20);
  const ReducedObjective j(*problem, w_interpolant(*problem, 15.0),
                           {w_times([](double) { return 10.0; }), ControlVector(2, 20), 1e-2});
  CHECK_THROWS_AS(optimize(j, ControlVector(2, 20), BoxBounds::unbounded(2), {}), InfeasibleStartError);
  OptimizerOptions bad;
  bad.memory = 0;
  CHECK_THROWS(optimize(j, ControlVector::constant({0.0, 50.0}, 20), BoxBounds::unbounded(2), bad));
}

TEST_CASE("controls drift toward the desired control near the final time") {
  const auto problem = channel_problem(8, 4, 20);
  const ControlVector desired = ControlVector::constant({50.0, 0.0}, 20);
  for (double alpha : {1e-2, 1e-3}) {
    CAPTURE(alpha);
    const ReducedObjective j(*problem, w_interpolant(*problem, 15.0),
                             {w_times([](double) { return 10.0; }), desired, alpha});
    OptimizerOptions opt;
    opt.tol = 1e-4;
    opt.max_iterations = 1000;
    const OptimizationResult r = optimize(j, ControlVector::constant({0.0, 50.0}, 20),
                                          BoxBounds::unbounded(2), opt);
    CHECK(r.converged);
    for (int i = 1; i <= 2; ++i) {
      CHECK(std::abs(r.control(i, 20) - desired(i, 20)) < std::abs(r.control(i, 10) - desired(i, 10)));
    }
  }
}

TEST_CASE("line search survives trial blowups near the blowup regime") {
  const auto problem = channel_problem(8, 4, 20);
  const ReducedObjective j(*problem, Eigen::VectorXd::Zero(problem->layout().num_velocity_dofs()),
                           {w_times(zeta_profile), ControlVector::constant({50.0, 0.0}, 20), 10.0});
  OptimizerOptions opt;
  opt.max_iterations = 30;
  const OptimizationResult r = optimize(j, ControlVector(2, 20), BoxBounds::unbounded(2), opt);
  int blowups = 0;
  for (std::size_t k = 1; k < r.log.size(); ++k) {
    // Slope-test acceptances may raise j by at most its rounding level.
    CHECK(r.log[k].objective <= r.log[k - 1].objective * (1.0 + opt.function_noise));
    blowups += r.log[k].blowups_in_linesearch;
  }
  CHECK(r.log.back().objective < 0.5 * r.log.front().objective);
  CHECK(r.log.size() > 10);
  CHECK(blowups > 0);
  CHECK_FALSE(j.evaluate(r.control).blew_up());
}
