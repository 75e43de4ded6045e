#pragma once

#include <array>
#include <span>
#include <vector>

#include "dnflow/geometry.hpp"
#include "dnflow/mesh.hpp"

namespace dnflow {

/// Boundary edge as seen from its owning triangle.
struct BoundaryFacet {
  int triangle = 0;
  int local_edge = 0;
  int tag = kWallTag;
  /// P2 nodes: start vertex, end vertex, midpoint (in the triangle's
  /// counterclockwise order, so the outward normal is to the right).
  std::array<int, 3> nodes{};
  Point2 normal;
  double length = 0.0;
};

/// Taylor-Hood P2/P1 degree-of-freedom layout.
///
/// P2 nodes are the mesh vertices (ids 0..nv-1) followed by one node per
/// edge. Global unknowns are ordered [u_x nodes | u_y nodes | p vertices].
/// Velocity dofs on the closure of wall edges are constrained to zero;
/// corners shared by a wall and an open segment belong to that set.
class DofLayout {
 public:
  explicit DofLayout(const Mesh& mesh);

  int num_nodes() const { return static_cast<int>(node_coordinates_.size()); }
  int num_velocity_dofs() const { return 2 * num_nodes(); }
  int num_pressure_dofs() const { return num_vertices_; }
  int num_dofs() const { return num_velocity_dofs() + num_pressure_dofs(); }
  int num_open_segments() const { return open_segments_; }

  int velocity_dof(int component, int node) const { return component * num_nodes() + node; }
  /// Position of the pressure unknown of `vertex` in the full system vector.
  int pressure_dof(int vertex) const { return num_velocity_dofs() + vertex; }

  std::span<const std::array<int, 6>> element_nodes() const { return element_nodes_; }
  const std::vector<Point2>& node_coordinates() const { return node_coordinates_; }
  const std::vector<BoundaryFacet>& boundary_facets() const { return facets_; }

  /// Sorted velocity dofs constrained by the no-slip condition.
  const std::vector<int>& constrained_dofs() const { return constrained_; }
  bool is_constrained(int velocity_dof) const { return constrained_mask_[velocity_dof] != 0; }

  /// Sorted P2 nodes lying on edges tagged `tag`.
  std::vector<int> boundary_nodes(int tag) const;

 private:
  int num_vertices_ = 0;
  int open_segments_ = 0;
  std::vector<std::array<int, 6>> element_nodes_;
  std::vector<Point2> node_coordinates_;
  std::vector<BoundaryFacet> facets_;
  std::vector<int> constrained_;
  std::vector<char> constrained_mask_;
};

}  // namespace dnflow
