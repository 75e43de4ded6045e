#include "dnflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace dnflow {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey make_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::map<EdgeKey, int> count_edges(const std::vector<std::array<int, 3>>& triangles) {
  std::map<EdgeKey, int> counts;
  for (const auto& t : triangles) {
    for (int e = 0; e < 3; ++e) {
      ++counts[make_key(t[e], t[(e + 1) % 3])];
    }
  }
  return counts;
}

}  // namespace

MeshParseError::MeshParseError(int line, const std::string& what)
    : MeshError("line " + std::to_string(line) + ": " + what), line_(line) {}

Mesh::Mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<BoundaryEdge> boundary_edges, int open_segments)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      open_segments_(open_segments) {
  validate();
}

double Mesh::signed_area(int triangle) const {
  const auto& t = triangles_[triangle];
  const Point2& a = vertices_[t[0]];
  const Point2& b = vertices_[t[1]];
  const Point2& c = vertices_[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh::area() const {
  double total = 0.0;
  for (int t = 0; t < num_triangles(); ++t) total += signed_area(t);
  return total;
}

double Mesh::tagged_length(int tag) const {
  double total = 0.0;
  for (const auto& e : boundary_edges_) {
    if (e.tag != tag) continue;
    const Point2& a = vertices_[e.vertices[0]];
    const Point2& b = vertices_[e.vertices[1]];
    total += std::hypot(b.x - a.x, b.y - a.y);
  }
  return total;
}

int Mesh::num_edges() const { return static_cast<int>(count_edges(triangles_).size()); }

void Mesh::validate() const {
  const int nv = num_vertices();
  if (open_segments_ < 0) throw MeshError("negative number of open segments");
  for (const auto& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw MeshError("vertex coordinate is not finite");
    }
  }
  for (int t = 0; t < num_triangles(); ++t) {
    for (int v : triangles_[t]) {
      if (v < 0 || v >= nv) {
        throw MeshError("triangle " + std::to_string(t) + " references vertex " +
                        std::to_string(v) + " out of range");
      }
    }
    if (!(signed_area(t) > 0.0)) {
      throw MeshError("triangle " + std::to_string(t) + " is not counterclockwise");
    }
  }

  const auto counts = count_edges(triangles_);
  std::map<EdgeKey, int> tagged;
  std::vector<int> per_tag(open_segments_ + 1, 0);
  for (const auto& e : boundary_edges_) {
    const auto [a, b] = e.vertices;
    if (a < 0 || a >= nv || b < 0 || b >= nv || a == b) {
      throw MeshError("boundary edge references invalid vertices");
    }
    if (e.tag < 0 || e.tag > open_segments_) {
      throw MeshError("boundary edge tag " + std::to_string(e.tag) + " is not declared");
    }
    const auto key = make_key(a, b);
    const auto it = counts.find(key);
    if (it == counts.end() || it->second != 1) {
      throw MeshError("tagged edge (" + std::to_string(a) + "," + std::to_string(b) +
                      ") does not belong to exactly one triangle");
    }
    if (++tagged[key] > 1) {
      throw MeshError("boundary edge (" + std::to_string(a) + "," + std::to_string(b) +
                      ") carries more than one tag");
    }
    ++per_tag[e.tag];
  }
  for (const auto& [key, count] : counts) {
    if (count > 2) throw MeshError("edge shared by more than two triangles");
    if (count == 1 && !tagged.contains(key)) {
      throw MeshError("boundary edge (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + ") has no tag");
    }
  }
  for (int tag = 1; tag <= open_segments_; ++tag) {
    if (per_tag[tag] == 0) {
      throw MeshError("open segment " + std::to_string(tag) + " has no edges");
    }
    double x_ref = 0.0;
    double scale = 1.0;
    bool first = true;
    for (const auto& e : boundary_edges_) {
      if (e.tag != tag) continue;
      for (int v : e.vertices) {
        const Point2& p = vertices_[v];
        if (first) {
          x_ref = p.x;
          first = false;
        }
        scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
        if (std::abs(p.x - x_ref) > 1e-12 * scale) {
          throw MeshError("open segment " + std::to_string(tag) +
                          " is not a straight vertical segment");
        }
      }
    }
  }
}

Mesh generate_channel_mesh(const ChannelGeometry& geometry, int nx, int ny) {
  if (nx < 1) throw MeshError("nx must be >= 1");
  if (ny < 2 || ny % 2 != 0) throw MeshError("ny must be even and >= 2");

  const double length = geometry.length();
  std::vector<Point2> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    // Exact reference coordinate so that mirrored rows map to mirrored values.
    const double t = static_cast<double>(2 * j - ny) / ny;
    for (int i = 0; i <= nx; ++i) {
      const double s = length * i / nx;
      vertices.push_back({s, t * geometry.half_width(s)});
    }
  }
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(static_cast<std::size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j);
      const int b = id(i + 1, j);
      const int c = id(i + 1, j + 1);
      const int d = id(i, j + 1);
      if (2 * j >= ny) {
        triangles.push_back({a, b, c});
        triangles.push_back({a, c, d});
      } else {
        triangles.push_back({a, b, d});
        triangles.push_back({b, c, d});
      }
    }
  }

  std::vector<BoundaryEdge> edges;
  edges.reserve(static_cast<std::size_t>(2) * (nx + ny));
  for (int j = 0; j < ny; ++j) edges.push_back({{id(0, j + 1), id(0, j)}, 1});
  for (int i = 0; i < nx; ++i) edges.push_back({{id(i, 0), id(i + 1, 0)}, kWallTag});
  for (int j = 0; j < ny; ++j) edges.push_back({{id(nx, j), id(nx, j + 1)}, 2});
  for (int i = 0; i < nx; ++i) edges.push_back({{id(i + 1, ny), id(i, ny)}, kWallTag});

  return Mesh(std::move(vertices), std::move(triangles), std::move(edges), 2);
}

}  // namespace dnflow
