#include <doctest.h>

#include "dnflow/verify.hpp"
#include "support.hpp"

using namespace dnflow;
using dnflow::test::channel_problem;
using dnflow::test::w_interpolant;

namespace {

ControlVector ramp_control(int steps) {
  ControlVector q(2, steps);
  for (int n = 1; n <= steps; ++n) {
    q(1, n) = 6.0 * n / steps;
    q(2, n) = -1.0;
  }
  return q;
}

}  // namespace

TEST_CASE("Poiseuille flow is a steady discrete solution") {
  const ChannelGeometry straight(1.0, 1.0, 2.0);
  const auto problem = channel_problem(4, 2, 5, {}, {}, straight);
  const PoiseuilleSolution exact = poiseuille_oracle(straight, 3.0, 0.0);
  CHECK(exact.flowrate == doctest::Approx(1.0));
  const Eigen::VectorXd u0 = interpolate_velocity(problem->layout(), exact.velocity);
  const StateSolution s = problem->solve_state(ControlVector::constant({3.0, 0.0}, 5), u0);
  REQUIRE(s.completed());
  const Eigen::VectorXd p_exact = interpolate_pressure(problem->layout(), exact.pressure);
  for (int n = 1; n <= 5; ++n) {
    CHECK((s.trajectory.velocity[n] - u0).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((s.trajectory.pressure[n] - p_exact).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(problem->flowrate(s.trajectory.velocity[n]) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("state depends on the control difference only") {
  const auto problem = channel_problem(6, 4, 8);
  const Eigen::VectorXd u0 = w_interpolant(*problem, 2.0);
  const ControlVector q = ramp_control(8);
  const ControlVector shifted = q + ControlVector::constant({7.5, 7.5}, 8);
  const StateSolution a = problem->solve_state(q, u0);
  const StateSolution b = problem->solve_state(shifted, u0);
  REQUIRE(a.completed());
  REQUIRE(b.completed());
  for (int n = 1; n <= 8; ++n) {
    CHECK((a.trajectory.velocity[n] - b.trajectory.velocity[n]).norm() <
          1e-9 * a.trajectory.velocity[n].norm());
    const Eigen::VectorXd dp = b.trajectory.pressure[n] - a.trajectory.pressure[n];
    CHECK(dp.minCoeff() == doctest::Approx(7.5));
    CHECK(dp.maxCoeff() == doctest::Approx(7.5));
  }
}

TEST_CASE("Stokes solutions superpose") {
  const auto problem = channel_problem(6, 4, 6);
  const Eigen::VectorXd u1 = w_interpolant(*problem, 1.0);
  const ControlVector q1 = ramp_control(6);
  const ControlVector q2 = ControlVector::constant({0.0, 4.0}, 6);
  const StateSolution a = problem->solve_state_stokes(q1, u1);
  const StateSolution b = problem->solve_state_stokes(q2, Eigen::VectorXd::Zero(u1.size()));
  const StateSolution c = problem->solve_state_stokes(q1 + q2, u1);
  for (int n = 0; n <= 6; ++n) {
    const Eigen::VectorXd sum = a.trajectory.velocity[n] + b.trajectory.velocity[n];
    CHECK((c.trajectory.velocity[n] - sum).norm() < 1e-10 * std::max(1.0, sum.norm()));
  }
}

TEST_CASE("uncontrolled Stokes flow dissipates kinetic energy") {
  const auto problem = channel_problem(6, 4, 10);
  const StateSolution s = problem->solve_state_stokes(ControlVector(2, 10), w_interpolant(*problem, 5.0));
  REQUIRE(s.completed());
  for (int n = 1; n <= 10; ++n) {
    CHECK(problem->l2_norm(s.trajectory.velocity[n]) < problem->l2_norm(s.trajectory.velocity[n - 1]));
  }
}

TEST_CASE("accepted steps satisfy the discrete equations") {
  const auto problem = channel_problem(6, 4, 10);
  const ControlVector q = ramp_control(10);
  const StateSolution s = problem->solve_state(q, w_interpolant(*problem, 3.0));
  REQUIRE(s.completed());
  const int nu = problem->layout().num_velocity_dofs();
  for (int n = 1; n <= 10; ++n) {
    Eigen::VectorXd x(problem->layout().num_dofs());
    x << s.trajectory.velocity[n], s.trajectory.pressure[n];
    const Eigen::VectorXd r =
        problem->step_residual(x, s.trajectory.velocity[n - 1], q, n, FlowModel::NavierStokes);
    CHECK(r.lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((problem->divergence() * s.trajectory.velocity[n]).lpNorm<Eigen::Infinity>() < 1e-9);
    for (int d : problem->layout().constrained_dofs()) CHECK(s.trajectory.velocity[n][d] == 0.0);
    (void)nu;
  }
}

TEST_CASE("large data blow up in finite time; Stokes does not") {
  const auto ns = channel_problem(8, 4, 20);
  StateOptions stokes_options;
  stokes_options.model = FlowModel::Stokes;
  const auto stokes = channel_problem(8, 4, 20, stokes_options);
  SUBCASE("large initial velocity") {
    const ControlVector q(2, 20);
    const StateSolution s = ns->solve_state(q, w_interpolant(*ns, 15.0));
    REQUIRE(s.blowup.has_value());
    CHECK(s.blowup->time > 0.0);
    CHECK(s.blowup->time < 1.0);
    CHECK(s.trajectory.last_step() == s.blowup->step - 1);
    CHECK(stokes->solve(q, w_interpolant(*stokes, 15.0), FlowModel::Stokes).completed());
  }
  SUBCASE("large pressure difference") {
    const ControlVector q = ControlVector::constant({50.0, 0.0}, 20);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(ns->layout().num_velocity_dofs());
    const StateSolution s = ns->solve_state(q, zero);
    REQUIRE(s.blowup.has_value());
    CHECK(s.blowup->time < 1.0);
    // The flowrate rises before the blowup.
    const auto& v = s.trajectory.velocity;
    REQUIRE(v.size() >= 3);
    for (std::size_t n = 1; n < v.size(); ++n) CHECK(ns->flowrate(v[n]) > ns->flowrate(v[n - 1]));
    CHECK(stokes->solve(q, zero, FlowModel::Stokes).completed());
  }
}

TEST_CASE("norm threshold triggers a blowup report") {
  StateOptions options;
  options.blowup_threshold = 5.0;
  const auto problem = channel_problem(4, 2, 10, options);
  const StateSolution s = problem->solve_state(ControlVector::constant({10.0, 0.0}, 10),
                                               Eigen::VectorXd::Zero(problem->layout().num_velocity_dofs()));
  REQUIRE(s.blowup.has_value());
  CHECK(s.blowup->trigger == BlowupTrigger::NormThreshold);
  CHECK(s.blowup->last_finite_norm <= 5.0);
  CHECK(s.blowup->time == doctest::Approx(problem->grid().time(s.blowup->step)));
}

TEST_CASE("inputs are validated") {
  const auto problem = channel_problem(4, 2, 10);
  const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(problem->layout().num_velocity_dofs());
  CHECK_THROWS_AS(problem->solve_state(ControlVector(2, 9), u0), std::invalid_argument);
  CHECK_THROWS_AS(problem->solve_state(ControlVector(2, 10), Eigen::VectorXd::Zero(3)), std::invalid_argument);
  ControlVector bad(2, 10);
  bad(1, 3) = NAN;
  CHECK_THROWS_AS(problem->solve_state(bad, u0), std::invalid_argument);
  CHECK_THROWS(TimeGrid(1.0, 0));
  CHECK_THROWS(TimeGrid(-1.0, 4));
}

TEST_CASE("implicit Euler converges at first order") {
  std::vector<double> finals;
  for (int steps : {10, 20, 40}) {
    const auto problem = channel_problem(6, 4, steps);
    const StateSolution s = problem->solve_state(ramp_control(steps), w_interpolant(*problem, 3.0));
    REQUIRE(s.completed());
    finals.push_back(problem->flowrate(s.trajectory.velocity.back()));
  }
  const double ratio = (finals[0] - finals[1]) / (finals[1] - finals[2]);
  CHECK(ratio >= 1.7);
  CHECK(ratio <= 2.3);
}

TEST_CASE("repeated solves are bit identical") {
  const auto a = channel_problem(6, 4, 10);
  const auto b = channel_problem(6, 4, 10);
  const StateSolution sa = a->solve_state(ramp_control(10), w_interpolant(*a, 3.0));
  const StateSolution sb = b->solve_state(ramp_control(10), w_interpolant(*b, 3.0));
  for (int n = 0; n <= 10; ++n) CHECK(sa.trajectory.velocity[n] == sb.trajectory.velocity[n]);
}
