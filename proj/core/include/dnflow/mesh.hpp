#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnflow/geometry.hpp"

namespace dnflow {

/// Boundary tag of the no-slip wall; open segments are numbered 1..L.
inline constexpr int kWallTag = 0;

struct BoundaryEdge {
  std::array<int, 2> vertices{};
  int tag = kWallTag;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshParseError : public MeshError {
 public:
  MeshParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Triangulation with tagged boundary edges. Immutable once constructed; the
/// constructor checks orientation, boundary coverage and straightness of
/// the open segments.
class Mesh {
 public:
  Mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles,
       std::vector<BoundaryEdge> boundary_edges, int open_segments);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  int num_open_segments() const { return open_segments_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  double signed_area(int triangle) const;
  double area() const;
  /// Total length of the boundary edges carrying `tag`.
  double tagged_length(int tag) const;
  /// Number of distinct (undirected) edges.
  int num_edges() const;

 private:
  void validate() const;

  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  int open_segments_;
};

/// Structured mapped triangulation of the channel: the reference rectangle
/// [0,L] x [-1,1] with nx x ny cells is mapped by (s, t) -> (s, t * phi(s)).
/// The quad diagonals mirror across x2 = 0 so the mesh is reflection
/// symmetric. Left edge tag 1, right edge tag 2, walls tag 0.
Mesh generate_channel_mesh(const ChannelGeometry& geometry, int nx, int ny);

/// ASCII mesh format: `nv nt ne`, then nv lines `x y`, nt lines `i j k`
/// (0-based, counterclockwise), ne lines `i j tag`. Tags above
/// `max_open_tag` are rejected.
Mesh read_mesh(std::istream& in, int max_open_tag = 2);
Mesh read_mesh(const std::filesystem::path& path, int max_open_tag = 2);
void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace dnflow
