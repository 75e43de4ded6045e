#include <doctest.h>

#include <random>
#include <set>

#include "dnflow/verify.hpp"
#include "support.hpp"

using namespace dnflow;

TEST_CASE("Poiseuille oracle") {
  const ChannelGeometry straight(1.0, 1.0, 2.0);
  const PoiseuilleSolution p = poiseuille_oracle(straight, 3.0, 0.0);
  CHECK(p.flowrate == doctest::Approx(1.0));
  CHECK(p.velocity({0.3, 0.0})[0] == doctest::Approx(0.75));
  CHECK(p.velocity({0.3, 1.0})[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(p.pressure({2.0, 0.4}) == doctest::Approx(0.0).scale(1.0));
  CHECK(p.pressure({0.0, 0.4}) == doctest::Approx(3.0));
  // Only the difference matters, linearly.
  CHECK(poiseuille_oracle(straight, 5.0, 5.0).flowrate == 0.0);
  CHECK(poiseuille_oracle(straight, 7.0, 1.0).flowrate == doctest::Approx(2.0));
  CHECK(poiseuille_oracle(straight, 0.0, 3.0).flowrate == doctest::Approx(-1.0));
  CHECK_THROWS_AS(poiseuille_oracle(ChannelGeometry(1.0, 2.0, 2.0), 3.0, 0.0), GeometryError);
}

TEST_CASE("smooth random controls are reproducible") {
  std::mt19937 a(4);
  std::mt19937 b(4);
  const ControlVector qa = smooth_random_control(2, 10, a, 3.0);
  const ControlVector qb = smooth_random_control(2, 10, b, 3.0);
  CHECK(qa.values() == qb.values());
  CHECK(qa.segments() == 2);
  CHECK(qa.steps() == 10);
}

TEST_CASE("finite-difference step sweep") {
  const auto steps = default_fd_steps();
  REQUIRE(steps.size() == 6);
  CHECK(steps.front() == 1e-2);
  CHECK(steps.back() == doctest::Approx(1e-7));
}

TEST_CASE("duality defect is at rounding level") {
  const auto problem = dnflow::test::channel_problem(4, 2, 3);
  const StateSolution s = problem->solve_state(ControlVector::constant({2.0, 0.0}, 3),
                                               dnflow::test::w_interpolant(*problem, 1.0));
  std::mt19937 rng(2);
  CHECK(duality_defect(*problem, s.trajectory, rng) < 1e-10);
}

TEST_CASE("check registry is complete and ordered") {
  std::vector<std::string> ids;
  for (const auto& c : registered_checks()) ids.push_back(c.id);
  const std::vector<std::string> expected{"poiseuille",    "gradient",          "duality",
                                          "curvature",     "trilinear",         "blowup",
                                          "optimal_control", "blowup_prevention", "bidirectional",
                                          "divergence",    "mirror_symmetry",   "determinism",
                                          "time_convergence", "negative_controls"};
  CHECK(ids == expected);
}

TEST_CASE("quick checks pass and sign corruptions are detected") {
  const VerificationReport ok = run_all(VerifyProfile::Quick, {}, {"trilinear", "gradient"});
  REQUIRE(ok.checks.size() == 2);
  CHECK(ok.all_passed());
  VerifyHooks convection;
  convection.flip_convection_sign = true;
  CHECK_FALSE(run_all(VerifyProfile::Quick, convection, {"trilinear"}).all_passed());
  VerifyHooks adjoint;
  adjoint.flip_adjoint_sign = true;
  CHECK_FALSE(run_all(VerifyProfile::Quick, adjoint, {"gradient"}).all_passed());
}

TEST_CASE("report writers") {
  VerificationReport report;
  CheckResult c;
  c.id = "x";
  c.description = "demo";
  c.passed = true;
  c.measured = 1e-13;
  c.threshold = 1e-12;
  report.checks.push_back(c);
  std::ostringstream csv;
  write_report_csv(csv, report);
  CHECK(csv.str().find("x,") != std::string::npos);
  std::ostringstream text;
  write_report_text(text, report);
  CHECK(text.str().find("PASS") != std::string::npos);
  CHECK(report.all_passed());
  report.checks.push_back(CheckResult{});
  CHECK_FALSE(report.all_passed());
}
