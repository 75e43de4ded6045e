#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "dnflow/basis.hpp"
#include "dnflow/dof_layout.hpp"
#include "dnflow/interpolation.hpp"
#include "dnflow/mesh.hpp"
#include "dnflow/quadrature.hpp"

using namespace dnflow;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// int over the reference triangle of xi^a eta^b.
double monomial_integral(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

const std::array<std::array<double, 2>, 6> kNodes{
    {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}}};

}  // namespace

TEST_CASE("triangle rules integrate monomials exactly up to their degree") {
  for (int degree : {1, 2, 3, 4, 5, 6, 7, 8}) {
    const TriangleRule rule = triangle_rule(degree);
    CHECK(rule.degree >= degree);
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          sum += rule.weights[q] * std::pow(rule.points[q][1], a) * std::pow(rule.points[q][2], b);
        }
        CHECK(sum == doctest::Approx(monomial_integral(a, b)).epsilon(1e-13));
      }
    }
  }
  CHECK_THROWS(triangle_rule(9));
}

TEST_CASE("line rules integrate polynomials on [0,1]") {
  for (int degree = 0; degree <= 9; ++degree) {
    const LineRule rule = line_rule(degree);
    for (int k = 0; k <= degree; ++k) {
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * std::pow(rule.points[q], k);
      CHECK(sum == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("P2 basis is nodal and sums to one") {
  for (int i = 0; i < 6; ++i) {
    const auto phi = p2_values(kNodes[i][0], kNodes[i][1]);
    for (int j = 0; j < 6; ++j) CHECK(phi[j] == doctest::Approx(i == j ? 1.0 : 0.0));
  }
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    double xi = u(rng);
    double eta = u(rng) * (1.0 - xi);
    const auto phi = p2_values(xi, eta);
    const auto grad = p2_gradients(xi, eta);
    double s = 0.0;
    double gx = 0.0;
    double gy = 0.0;
    for (int j = 0; j < 6; ++j) {
      s += phi[j];
      gx += grad[j][0];
      gy += grad[j][1];
    }
    CHECK(s == doctest::Approx(1.0));
    CHECK(gx == doctest::Approx(0.0).scale(1.0));
    CHECK(gy == doctest::Approx(0.0).scale(1.0));
    // Gradients against central differences.
    const double h = 1e-6;
    const auto px = p2_values(xi + h, eta);
    const auto mx = p2_values(xi - h, eta);
    const auto py = p2_values(xi, eta + h);
    const auto my = p2_values(xi, eta - h);
    for (int j = 0; j < 6; ++j) {
      CHECK(grad[j][0] == doctest::Approx((px[j] - mx[j]) / (2 * h)).epsilon(1e-7));
      CHECK(grad[j][1] == doctest::Approx((py[j] - my[j]) / (2 * h)).epsilon(1e-7));
    }
  }
}

TEST_CASE("P1 basis and edge basis") {
  const auto p = p1_values(0.2, 0.3);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.2));
  CHECK(p[2] == doctest::Approx(0.3));
  const auto g = p1_gradients();
  CHECK(g[0][0] + g[1][0] + g[2][0] == doctest::Approx(0.0));
  const auto e0 = p2_edge_values(0.0);
  const auto e1 = p2_edge_values(1.0);
  const auto em = p2_edge_values(0.5);
  CHECK(e0[0] == 1.0);
  CHECK(e1[1] == 1.0);
  CHECK(em[2] == 1.0);
  CHECK(e0[1] == 0.0);
  CHECK(em[0] == 0.0);
}

TEST_CASE("Taylor-Hood layout counts and ordering") {
  const Mesh mesh = generate_channel_mesh(ChannelGeometry(1.0, 2.0, 2.0), 4, 2);
  const DofLayout layout(mesh);
  CHECK(layout.num_nodes() == mesh.num_vertices() + mesh.num_edges());
  CHECK(layout.num_velocity_dofs() == 2 * layout.num_nodes());
  CHECK(layout.num_pressure_dofs() == mesh.num_vertices());
  CHECK(layout.velocity_dof(1, 0) == layout.num_nodes());
  CHECK(layout.pressure_dof(0) == layout.num_velocity_dofs());
  // Edge nodes sit at edge midpoints.
  for (std::size_t t = 0; t < layout.element_nodes().size(); ++t) {
    const auto& nodes = layout.element_nodes()[t];
    const auto& x = layout.node_coordinates();
    for (int e = 0; e < 3; ++e) {
      const Point2 a = x[nodes[kTriangleEdges[e][0]]];
      const Point2 b = x[nodes[kTriangleEdges[e][1]]];
      CHECK(x[nodes[3 + e]].x == doctest::Approx(0.5 * (a.x + b.x)));
      CHECK(x[nodes[3 + e]].y == doctest::Approx(0.5 * (a.y + b.y)));
    }
  }
}

TEST_CASE("no-slip constraints cover exactly the wall closure") {
  const Mesh mesh = generate_channel_mesh(ChannelGeometry(1.0, 2.0, 2.0), 4, 2);
  const DofLayout layout(mesh);
  const auto wall = layout.boundary_nodes(kWallTag);
  std::set<int> expected;
  for (int n : wall) {
    expected.insert(layout.velocity_dof(0, n));
    expected.insert(layout.velocity_dof(1, n));
  }
  const auto& constrained = layout.constrained_dofs();
  CHECK(std::set<int>(constrained.begin(), constrained.end()) == expected);
  // Walls: 2 * (nx vertices + 1 + nx midpoints).
  CHECK(wall.size() == 2 * (2 * 4 + 1));
  // The four channel corners are constrained; open-segment interiors are free.
  for (int n : layout.boundary_nodes(1)) {
    const double y = layout.node_coordinates()[n].y;
    const bool corner = std::abs(std::abs(y) - 1.0) < 1e-14;
    CHECK(layout.is_constrained(layout.velocity_dof(0, n)) == corner);
  }
}

TEST_CASE("boundary facets carry outward unit normals") {
  const Mesh mesh = generate_channel_mesh(ChannelGeometry(1.0, 2.0, 2.0), 4, 2);
  const DofLayout layout(mesh);
  double inlet = 0.0;
  for (const auto& f : layout.boundary_facets()) {
    CHECK(std::hypot(f.normal.x, f.normal.y) == doctest::Approx(1.0));
    if (f.tag == 1) {
      CHECK(f.normal.x == doctest::Approx(-1.0));
      inlet += f.length;
    }
    if (f.tag == 2) CHECK(f.normal.x == doctest::Approx(1.0));
  }
  CHECK(inlet == doctest::Approx(2.0));
}

TEST_CASE("P2 interpolation reproduces quadratics exactly") {
  const Mesh mesh = generate_channel_mesh(ChannelGeometry(1.0, 2.0, 2.0), 3, 2);
  const DofLayout layout(mesh);
  const auto f = [](const Point2& p) {
    return Vec2{1.0 + p.x - 2.0 * p.y + p.x * p.y + 0.5 * p.y * p.y, p.x * p.x - 3.0 * p.y};
  };
  const Eigen::VectorXd u = interpolate_velocity(layout, f);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double xi = d(rng);
    const double eta = d(rng) * (1.0 - xi);
    const auto& tri = mesh.triangles()[t];
    const Point2 a = mesh.vertices()[tri[0]];
    const Point2 b = mesh.vertices()[tri[1]];
    const Point2 c = mesh.vertices()[tri[2]];
    const Point2 x{a.x + xi * (b.x - a.x) + eta * (c.x - a.x), a.y + xi * (b.y - a.y) + eta * (c.y - a.y)};
    const Vec2 v = evaluate_velocity(layout, u, t, xi, eta);
    CHECK(v[0] == doctest::Approx(f(x)[0]).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(f(x)[1]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(interpolate_velocity(layout, [](const Point2&) { return Vec2{NAN, 0.0}; }),
                  InterpolationError);
  const Eigen::VectorXd p = interpolate_pressure(layout, [](const Point2& x) { return x.x; });
  for (int v = 0; v < mesh.num_vertices(); ++v) CHECK(p[v] == mesh.vertices()[v].x);
}
