#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "dnflow/format.hpp"
#include "dnflow/mesh.hpp"

namespace dnflow {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-empty line split into whitespace separated fields.
  std::vector<std::string> fields(std::size_t expected) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_number_;
      std::istringstream tokens(line);
      std::vector<std::string> out;
      for (std::string tok; tokens >> tok;) out.push_back(tok);
      if (out.empty()) continue;
      if (out.size() != expected) {
        fail("expected " + std::to_string(expected) + " fields, found " +
             std::to_string(out.size()));
      }
      return out;
    }
    ++line_number_;
    fail("unexpected end of file");
  }

  int to_int(const std::string& s) const {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("invalid integer '" + s + "'");
    return value;
  }

  double to_double(const std::string& s) const {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("invalid number '" + s + "'");
    return value;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshParseError(line_number_, what);
  }

  int line() const { return line_number_; }

 private:
  std::istream& in_;
  int line_number_ = 0;
};

}  // namespace

Mesh read_mesh(std::istream& in, int max_open_tag) {
  LineReader reader(in);
  const auto header = reader.fields(3);
  const int nv = reader.to_int(header[0]);
  const int nt = reader.to_int(header[1]);
  const int ne = reader.to_int(header[2]);
  if (nv < 3 || nt < 1 || ne < 3) reader.fail("invalid mesh counts");

  std::vector<Point2> vertices(nv);
  for (auto& p : vertices) {
    const auto f = reader.fields(2);
    p = {reader.to_double(f[0]), reader.to_double(f[1])};
  }
  std::vector<std::array<int, 3>> triangles(nt);
  for (auto& t : triangles) {
    const auto f = reader.fields(3);
    for (int k = 0; k < 3; ++k) {
      t[k] = reader.to_int(f[k]);
      if (t[k] < 0 || t[k] >= nv) {
        reader.fail("triangle vertex index " + f[k] + " out of range [0," +
                    std::to_string(nv) + ")");
      }
    }
  }
  std::vector<BoundaryEdge> edges(ne);
  int open_segments = 0;
  for (auto& e : edges) {
    const auto f = reader.fields(3);
    for (int k = 0; k < 2; ++k) {
      e.vertices[k] = reader.to_int(f[k]);
      if (e.vertices[k] < 0 || e.vertices[k] >= nv) {
        reader.fail("edge vertex index " + f[k] + " out of range");
      }
    }
    e.tag = reader.to_int(f[2]);
    if (e.tag < 0 || e.tag > max_open_tag) {
      reader.fail("unknown boundary tag " + f[2] + " (declared tags 0.." +
                  std::to_string(max_open_tag) + ")");
    }
    open_segments = std::max(open_segments, e.tag);
  }
  return Mesh(std::move(vertices), std::move(triangles), std::move(edges), open_segments);
}

Mesh read_mesh(const std::filesystem::path& path, int max_open_tag) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  return read_mesh(in, max_open_tag);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' '
      << mesh.boundary_edges().size() << '\n';
  for (const auto& p : mesh.vertices()) {
    out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
  }
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges()) {
    out << e.vertices[0] << ' ' << e.vertices[1] << ' ' << e.tag << '\n';
  }
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  write_mesh(mesh, out);
}

}  // namespace dnflow
