#include "dnflow/dof_layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dnflow/basis.hpp"

namespace dnflow {

DofLayout::DofLayout(const Mesh& mesh)
    : num_vertices_(mesh.num_vertices()), open_segments_(mesh.num_open_segments()) {
  const auto& vertices = mesh.vertices();
  node_coordinates_ = vertices;

  std::map<std::pair<int, int>, int> edge_node;
  std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;  // -> (triangle, local edge)
  element_nodes_.reserve(mesh.triangles().size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    std::array<int, 6> nodes{tri[0], tri[1], tri[2], 0, 0, 0};
    for (int e = 0; e < 3; ++e) {
      const int a = tri[kTriangleEdges[e][0]];
      const int b = tri[kTriangleEdges[e][1]];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_node.try_emplace({key.first, key.second}, num_nodes());
      if (inserted) {
        const Point2& pa = vertices[a];
        const Point2& pb = vertices[b];
        node_coordinates_.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
        edge_owner[{key.first, key.second}] = {t, e};
      }
      nodes[3 + e] = it->second;
    }
    element_nodes_.push_back(nodes);
  }

  std::set<int> wall_nodes;
  for (const auto& edge : mesh.boundary_edges()) {
    const auto key = std::minmax(edge.vertices[0], edge.vertices[1]);
    const auto [t, e] = edge_owner.at({key.first, key.second});
    const auto& tri = mesh.triangles()[t];
    BoundaryFacet facet;
    facet.triangle = t;
    facet.local_edge = e;
    facet.tag = edge.tag;
    const int a = tri[kTriangleEdges[e][0]];
    const int b = tri[kTriangleEdges[e][1]];
    facet.nodes = {a, b, element_nodes_[t][3 + e]};
    const double dx = vertices[b].x - vertices[a].x;
    const double dy = vertices[b].y - vertices[a].y;
    facet.length = std::hypot(dx, dy);
    facet.normal = {dy / facet.length, -dx / facet.length};
    facets_.push_back(facet);
    if (edge.tag == kWallTag) wall_nodes.insert(facet.nodes.begin(), facet.nodes.end());
  }

  constrained_mask_.assign(num_velocity_dofs(), 0);
  for (int component = 0; component < 2; ++component) {
    for (int node : wall_nodes) {
      const int dof = velocity_dof(component, node);
      constrained_.push_back(dof);
      constrained_mask_[dof] = 1;
    }
  }
  std::sort(constrained_.begin(), constrained_.end());
}

std::vector<int> DofLayout::boundary_nodes(int tag) const {
  std::set<int> nodes;
  for (const auto& f : facets_) {
    if (f.tag == tag) nodes.insert(f.nodes.begin(), f.nodes.end());
  }
  return {nodes.begin(), nodes.end()};
}

}  // namespace dnflow
