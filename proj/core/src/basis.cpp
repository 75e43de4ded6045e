#include "dnflow/basis.hpp"

namespace dnflow {

std::array<double, 6> p2_values(double xi, double eta) {
  const double l0 = 1.0 - xi - eta;
  const double l1 = xi;
  const double l2 = eta;
  return {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
          4.0 * l0 * l1,         4.0 * l1 * l2,         4.0 * l2 * l0};
}

std::array<ReferenceGradient, 6> p2_gradients(double xi, double eta) {
  const double l0 = 1.0 - xi - eta;
  const double l1 = xi;
  const double l2 = eta;
  // d(l0) = (-1, -1), d(l1) = (1, 0), d(l2) = (0, 1)
  const double g0 = 4.0 * l0 - 1.0;
  return {{{-g0, -g0},
           {4.0 * l1 - 1.0, 0.0},
           {0.0, 4.0 * l2 - 1.0},
           {4.0 * (l0 - l1), -4.0 * l1},
           {4.0 * l2, 4.0 * l1},
           {-4.0 * l2, 4.0 * (l0 - l2)}}};
}

std::array<double, 3> p1_values(double xi, double eta) { return {1.0 - xi - eta, xi, eta}; }

std::array<ReferenceGradient, 3> p1_gradients() {
  return {{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
}

std::array<double, 3> p2_edge_values(double t) {
  return {(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)};
}

BasisTable eval_basis(const TriangleRule& rule) {
  BasisTable table;
  table.p1_grad = p1_gradients();
  for (const auto& p : rule.points) {
    table.p2.push_back(p2_values(p[1], p[2]));
    table.p2_grad.push_back(p2_gradients(p[1], p[2]));
    table.p1.push_back(p1_values(p[1], p[2]));
  }
  return table;
}

}  // namespace dnflow
