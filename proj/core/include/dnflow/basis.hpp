#pragma once

#include <array>
#include <vector>

#include "dnflow/quadrature.hpp"

namespace dnflow {

// Local node order on a triangle (v0, v1, v2): vertices 0..2, then the
// midpoints of edges (0,1), (1,2), (2,0) as nodes 3..5.
inline constexpr int kP2NodesPerTriangle = 6;
inline constexpr int kP1NodesPerTriangle = 3;
inline constexpr std::array<std::array<int, 2>, 3> kTriangleEdges{{{0, 1}, {1, 2}, {2, 0}}};

using ReferenceGradient = std::array<double, 2>;

std::array<double, 6> p2_values(double xi, double eta);
std::array<ReferenceGradient, 6> p2_gradients(double xi, double eta);
std::array<double, 3> p1_values(double xi, double eta);
std::array<ReferenceGradient, 3> p1_gradients();

/// Quadratic Lagrange basis on [0, 1] with nodes 0, 1, 1/2 (edge start,
/// edge end, midpoint).
std::array<double, 3> p2_edge_values(double t);

/// P2 and P1 basis values and reference gradients tabulated at the points
/// of a triangle rule.
struct BasisTable {
  std::vector<std::array<double, 6>> p2;
  std::vector<std::array<ReferenceGradient, 6>> p2_grad;
  std::vector<std::array<double, 3>> p1;
  std::array<ReferenceGradient, 3> p1_grad{};
};

BasisTable eval_basis(const TriangleRule& rule);

}  // namespace dnflow
