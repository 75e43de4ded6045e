#include <doctest.h>

#include <random>

#include "dnflow/adjoint.hpp"
#include "dnflow/verify.hpp"
#include "support.hpp"

using namespace dnflow;
using dnflow::test::channel_problem;
using dnflow::test::w_interpolant;

TEST_CASE("adjoint and tangent satisfy the discrete duality identity") {
  for (int steps : {1, 2, 10}) {
    CAPTURE(steps);
    const auto problem = channel_problem(6, 4, steps);
    std::mt19937 rng(23 + steps);
    const ControlVector q = smooth_random_control(2, steps, rng, 3.0);
    const StateSolution s = problem->solve_state(q, w_interpolant(*problem, 3.0));
    REQUIRE(s.completed());
    CHECK(duality_defect(*problem, s.trajectory, rng) < 1e-10);
  }
}

TEST_CASE("duality holds in Stokes mode") {
  StateOptions options;
  options.model = FlowModel::Stokes;
  const auto problem = channel_problem(4, 2, 3, options);
  std::mt19937 rng(29);
  const StateSolution s =
      problem->solve_state_stokes(smooth_random_control(2, 3, rng, 1.0), w_interpolant(*problem, 1.0));
  CHECK(duality_defect(*problem, s.trajectory, rng) < 1e-10);
}

TEST_CASE("adjoint terminal value and loads") {
  const auto problem = channel_problem(4, 2, 3);
  const StateSolution s = problem->solve_state(ControlVector::constant({2.0, 0.0}, 3), w_interpolant(*problem, 1.0));
  const LinearizedTrajectory lin(*problem, s.trajectory);
  const int nu = problem->layout().num_velocity_dofs();
  SUBCASE("zero loads give a zero adjoint") {
    const AdjointTrajectory z = solve_adjoint(lin, std::vector<Eigen::VectorXd>(4, Eigen::VectorXd::Zero(nu)));
    for (const auto& v : z.velocity) CHECK(v.norm() == 0.0);
  }
  SUBCASE("z[N] vanishes and only earlier levels feel the last load") {
    std::vector<Eigen::VectorXd> loads(4, Eigen::VectorXd::Zero(nu));
    loads[3] = Eigen::VectorXd::Ones(nu);
    const AdjointTrajectory z = solve_adjoint(lin, loads);
    REQUIRE(z.last_step() == 3);
    CHECK(z.velocity[3].norm() == 0.0);
    CHECK(z.velocity[2].norm() > 0.0);
    CHECK(z.velocity[0].norm() > 0.0);
  }
  SUBCASE("wrong number of loads is rejected") {
    CHECK_THROWS(solve_adjoint(lin, std::vector<Eigen::VectorXd>(2, Eigen::VectorXd::Zero(nu))));
  }
}

TEST_CASE("tracking loads match the tracking residual") {
  const auto problem = channel_problem(4, 2, 2);
  const StateSolution s = problem->solve_state(ControlVector::constant({2.0, 0.0}, 2), w_interpolant(*problem, 1.0));
  const std::vector<Eigen::VectorXd> targets(3, w_interpolant(*problem, 2.0));
  const auto loads = tracking_loads(*problem, s.trajectory, targets);
  REQUIRE(loads.size() == 3);
  for (int n = 1; n <= 2; ++n) {
    const auto terms = problem->assembler().tracking_terms(s.trajectory.velocity[n], targets[n], false);
    CHECK((loads[n] - terms.residual).norm() <= 1e-14 * terms.residual.norm());
  }
}
