#include <doctest.h>

#include <sstream>

#include "dnflow/format.hpp"
#include "dnflow/output.hpp"
#include "support.hpp"

using namespace dnflow;

TEST_CASE("number formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456789.0, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(100.0) == "100");
}

TEST_CASE("flowrate CSV round trip is bit exact") {
  FlowrateSeries s;
  s.time = {0.0, 0.1, 0.2};
  s.flowrate = {1.0 / 3.0, -2.0e-7, 42.0};
  std::stringstream out;
  write_flowrate_csv(out, s);
  CHECK(out.str().rfind("time,Q\n", 0) == 0);
  const FlowrateSeries back = read_flowrate_csv(out);
  CHECK(back.time == s.time);
  CHECK(back.flowrate == s.flowrate);
  CHECK_FALSE(back.blowup_time.has_value());
}

TEST_CASE("blowup status line") {
  FlowrateSeries s;
  s.time = {0.0, 0.1};
  s.flowrate = {0.0, 5.0};
  s.blowup_time = 0.2;
  std::stringstream out;
  write_flowrate_csv(out, s);
  CHECK(out.str() == "time,Q\n0,0\n0.1,5\n# blowup t=0.2\n");
  const FlowrateSeries back = read_flowrate_csv(out);
  REQUIRE(back.blowup_time.has_value());
  CHECK(*back.blowup_time == 0.2);
}

TEST_CASE("malformed flowrate CSV") {
  std::istringstream bad_header("t,Q\n0,1\n");
  CHECK_THROWS_AS(read_flowrate_csv(bad_header), DataFileError);
  std::istringstream bad_row("time,Q\n0,1\n0.1,x\n");
  try {
    read_flowrate_csv(bad_row);
    FAIL("expected an error");
  } catch (const DataFileError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("control CSV samples t_0..t_N and round trips") {
  const TimeGrid grid(1.0, 4);
  ControlVector q(2, 4);
  for (int n = 1; n <= 4; ++n) {
    q(1, n) = n * 0.1;
    q(2, n) = -n / 3.0;
  }
  std::stringstream out;
  write_control_csv(out, grid, q);
  std::string header;
  std::getline(out, header);
  CHECK(header == "time,q1,q2");
  std::string first;
  std::getline(out, first);
  CHECK(first == "0,0.1," + format_double(-1.0 / 3.0));
  out.seekg(0);
  const ControlVector back = read_control_csv(out, grid, 2);
  CHECK(back.values() == q.values());
}

TEST_CASE("control CSV validation") {
  const TimeGrid grid(1.0, 2);
  std::istringstream wrong_header("time,a,b\n0,1,1\n0.5,1,1\n1,1,1\n");
  CHECK_THROWS_AS(read_control_csv(wrong_header, grid, 2), DataFileError);
  std::istringstream wrong_time("time,q1,q2\n0,1,1\n0.4,1,1\n1,1,1\n");
  CHECK_THROWS_AS(read_control_csv(wrong_time, grid, 2), DataFileError);
  std::istringstream short_file("time,q1,q2\n0,1,1\n0.5,1,1\n");
  CHECK_THROWS_AS(read_control_csv(short_file, grid, 2), DataFileError);
  std::istringstream not_finite("time,q1,q2\n0,1,1\n0.5,nan,1\n1,1,1\n");
  CHECK_THROWS_AS(read_control_csv(not_finite, grid, 2), DataFileError);
  CHECK_THROWS_AS(read_control_csv(std::filesystem::path("/nonexistent/q.csv"), grid, 2), DataFileError);
}

TEST_CASE("iterations CSV header") {
  std::stringstream out;
  write_iterations_csv(out, {{0, 2.0, 1.5, 0.5, 3.0, 0.0, 0}, {1, 1.0, 0.75, 0.25, 0.1, 0.5, 2}});
  CHECK(out.str() ==
        "iter,j,tracking,regularization,stationarity,step,blowups_in_linesearch\n"
        "0,2,1.5,0.5,3,0,0\n1,1,0.75,0.25,0.1,0.5,2\n");
}

TEST_CASE("flowrate series of a state and of a target") {
  const auto problem = dnflow::test::channel_problem(4, 2, 4);
  const StateSolution s = problem->solve_state(ControlVector::constant({2.0, 0.0}, 4),
                                               dnflow::test::w_interpolant(*problem, 1.0));
  const FlowrateSeries series = flowrate_series(*problem, s);
  REQUIRE(series.time.size() == 5);
  CHECK(series.flowrate[0] == doctest::Approx(2.0));
  CHECK(series.time.back() == 1.0);
  const VectorField w = make_w_field(dnflow::test::default_channel());
  const FlowrateSeries target = flowrate_series(*problem, [&](double t, const Point2& p) {
    const Vec2 v = w(p);
    return Vec2{t * v[0], t * v[1]};
  });
  CHECK(target.flowrate[2] == doctest::Approx(1.0));
}

TEST_CASE("legacy VTK file structure") {
  const auto problem = dnflow::test::channel_problem(2, 2, 1);
  const auto& layout = problem->layout();
  const Eigen::VectorXd u = dnflow::test::w_interpolant(*problem, 1.0);
  const Eigen::VectorXd p = interpolate_pressure(layout, [](const Point2& x) { return x.x; });
  std::stringstream out;
  write_vtk(out, layout, u, p, 0.25);
  const std::string text = out.str();
  CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(text.find("POINTS " + std::to_string(layout.num_nodes()) + " double") != std::string::npos);
  CHECK(text.find("CELLS 8 56") != std::string::npos);
  CHECK(text.find("VECTORS velocity double") != std::string::npos);
  CHECK(text.find("SCALARS pressure double 1") != std::string::npos);
  // Midpoint pressures are exact for the linear field x.
  std::istringstream in(text.substr(text.find("LOOKUP_TABLE default\n") + 21));
  for (int k = 0; k < layout.num_nodes(); ++k) {
    double v = 0.0;
    in >> v;
    CHECK(v == doctest::Approx(layout.node_coordinates()[k].x).scale(1.0));
  }
  CHECK_THROWS(write_vtk(out, layout, Eigen::VectorXd::Zero(3), p, 0.0));
}
