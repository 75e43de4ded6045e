#include <doctest.h>

#include <random>

#include "dnflow/assembly.hpp"
#include "dnflow/verify.hpp"
#include "support.hpp"

using namespace dnflow;
using dnflow::test::channel_problem;

namespace {

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

}  // namespace

TEST_CASE("mass matrices integrate constants to the area") {
  const auto problem = channel_problem(6, 4, 1);
  const FlowAssembler& a = problem->assembler();
  const double area = problem->mesh().area();
  for (ScalarSpace space : {ScalarSpace::P1, ScalarSpace::P2}) {
    const SparseMatrix m = a.scalar_mass(space);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(m.rows());
    CHECK(one.dot(m * one) == doctest::Approx(area).epsilon(1e-13));
    const SparseMatrix k = a.scalar_stiffness(space);
    CHECK((k * one).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  const Eigen::VectorXd ex = interpolate_velocity(problem->layout(), [](const Point2&) { return Vec2{1.0, 0.0}; });
  CHECK(ex.dot(problem->mass() * ex) == doctest::Approx(area).epsilon(1e-13));
}

TEST_CASE("stiffness gives the Dirichlet energy of polynomial fields") {
  const auto problem = channel_problem(6, 4, 1);
  // grad u = [[1, 0], [0, 2 y]] ... integrate |grad u|^2 = area + 4 int y^2.
  const Eigen::VectorXd u = interpolate_velocity(problem->layout(), [](const Point2& p) {
    return Vec2{p.x, p.y * p.y};
  });
  const Eigen::VectorXd y2 = interpolate_velocity(problem->layout(), [](const Point2& p) {
    return Vec2{p.y * p.y, 0.0};
  });
  const Eigen::VectorXd one = interpolate_velocity(problem->layout(), [](const Point2&) { return Vec2{1.0, 0.0}; });
  const double int_y2 = one.dot(problem->mass() * y2);
  CHECK(u.dot(problem->stiffness() * u) ==
        doctest::Approx(problem->mesh().area() + 4.0 * int_y2).epsilon(1e-12));
}

TEST_CASE("divergence operator integrates div u against P1 functions") {
  const auto problem = channel_problem(6, 4, 1);
  const Eigen::VectorXd u = interpolate_velocity(problem->layout(), [](const Point2& p) {
    return Vec2{p.x * p.y, p.y};
  });
  // div u = y + 1; sum of P1 hats is 1.
  const Eigen::VectorXd one_p = Eigen::VectorXd::Ones(problem->layout().num_pressure_dofs());
  const double integral = one_p.dot(problem->divergence() * u);
  CHECK(integral == doctest::Approx(problem->mesh().area()).epsilon(1e-12));  // int y = 0 by symmetry
  // Solenoidal quadratic: u = (x^2, -2 x y).
  const Eigen::VectorXd s = interpolate_velocity(problem->layout(), [](const Point2& p) {
    return Vec2{p.x * p.x, -2.0 * p.x * p.y};
  });
  CHECK((problem->divergence() * s).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("flowrate functional gives Q(w) = 2 and linear scaling") {
  const auto problem = channel_problem(8, 4, 1);
  CHECK(problem->flowrate(dnflow::test::w_interpolant(*problem, 1.0)) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(problem->flowrate(dnflow::test::w_interpolant(*problem, 15.0)) == doctest::Approx(30.0).epsilon(1e-13));
  // b_1 is the inlet normal flux: uniform inflow (1, 0) gives 2 r.
  const Eigen::VectorXd ex = interpolate_velocity(problem->layout(), [](const Point2&) { return Vec2{1.0, 0.0}; });
  CHECK(problem->boundary_loads()[0].dot(ex) == doctest::Approx(-2.0));
  CHECK(problem->boundary_loads()[1].dot(ex) == doctest::Approx(4.0));
}

TEST_CASE("convection kernels are mutually consistent") {
  const auto problem = channel_problem(4, 2, 1);
  const FlowAssembler& a = problem->assembler();
  std::mt19937 rng(7);
  const int n = problem->layout().num_velocity_dofs();
  const Eigen::VectorXd u = random_vector(n, rng);
  const Eigen::VectorXd v = random_vector(n, rng);
  const Eigen::VectorXd w = random_vector(n, rng);
  CHECK((a.convection(u) * v - a.convection_vector(u, v)).norm() < 1e-12 * a.convection_vector(u, v).norm());
  CHECK((a.convection_linearization(u) * w - a.convection_vector(w, u)).norm() <
        1e-12 * a.convection_vector(w, u).norm());
  // Bilinear: c(u + w, v) = c(u, v) + c(w, v).
  CHECK((a.convection_vector(u + w, v) - a.convection_vector(u, v) - a.convection_vector(w, v)).norm() <
        1e-12 * a.convection_vector(u, v).norm());
}

TEST_CASE("trilinear form matches the boundary plus volume identity") {
  const auto problem = channel_problem(6, 4, 1);
  std::mt19937 rng(9);
  const int n = problem->layout().num_velocity_dofs();
  for (int k = 0; k < 10; ++k) {
    CHECK(trilinear_defect(*problem, random_vector(n, rng), random_vector(n, rng)) < 1e-12);
  }
}

TEST_CASE("corrupted convection sign breaks the identity") {
  AssemblyOptions flipped;
  flipped.flip_convection_sign = true;
  const auto problem = channel_problem(4, 2, 1, {}, flipped);
  std::mt19937 rng(11);
  const int n = problem->layout().num_velocity_dofs();
  CHECK(trilinear_defect(*problem, random_vector(n, rng), random_vector(n, rng)) > 1e-3);
}

TEST_CASE("tracking functional and its derivatives") {
  const auto problem = channel_problem(4, 2, 1);
  const FlowAssembler& a = problem->assembler();
  const auto& layout = problem->layout();
  const Eigen::VectorXd target = interpolate_velocity(layout, [](const Point2& p) { return Vec2{p.x, p.y * p.x}; });
  const Eigen::VectorXd shifted = interpolate_velocity(layout, [](const Point2& p) {
    return Vec2{p.x + 2.0, p.y * p.x - 1.0};
  });
  // |e| = sqrt(5) everywhere: value = 25/4 * area.
  CHECK(a.tracking_value(shifted, target) == doctest::Approx(6.25 * problem->mesh().area()).epsilon(1e-12));

  std::mt19937 rng(13);
  const Eigen::VectorXd u = random_vector(layout.num_velocity_dofs(), rng);
  const Eigen::VectorXd du = random_vector(layout.num_velocity_dofs(), rng);
  const TrackingTerms terms = a.tracking_terms(u, target, true);
  const double h = 1e-5;
  const double fd = (a.tracking_value(u + h * du, target) - a.tracking_value(u - h * du, target)) / (2 * h);
  CHECK(terms.residual.dot(du) == doctest::Approx(fd).epsilon(1e-8));
  const double fd2 = (a.tracking_terms(u + h * du, target, false).residual.dot(du) -
                      a.tracking_terms(u - h * du, target, false).residual.dot(du)) /
                     (2 * h);
  CHECK(du.dot(terms.hessian * du) == doctest::Approx(fd2).epsilon(1e-8));
  CHECK(a.tracking_curvature(u, target, du) == doctest::Approx(du.dot(terms.hessian * du)).epsilon(1e-12));
}
