#include "dnflow/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dnflow/format.hpp"
#include "dnflow/interpolation.hpp"

namespace dnflow {

DataFileError::DataFileError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataFileError(0, "cannot write " + path.string());
  return out;
}

std::ifstream open_for_reading(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataFileError(0, "cannot read " + path.string());
  return in;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw DataFileError(0, "failed writing " + path.string());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, int line) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  std::size_t end = text.find_last_not_of(" \t\r");
  if (begin == std::string::npos) throw DataFileError(line, "empty field");
  const char* first = text.data() + begin;
  const char* last = text.data() + end + 1;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DataFileError(line, "invalid number '" + std::string(first, last) + "'");
  }
  return value;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

FlowrateSeries flowrate_series(const FlowProblem& problem, const StateSolution& state) {
  FlowrateSeries series;
  const Trajectory& traj = state.trajectory;
  for (int n = 0; n <= traj.last_step(); ++n) {
    series.time.push_back(problem.grid().time(n));
    series.flowrate.push_back(problem.flowrate(traj.velocity[n]));
  }
  if (state.blowup) series.blowup_time = state.blowup->time;
  return series;
}

FlowrateSeries flowrate_series(const FlowProblem& problem, const SpaceTimeField& field) {
  FlowrateSeries series;
  const TimeGrid& grid = problem.grid();
  for (int n = 0; n <= grid.steps(); ++n) {
    const double t = grid.time(n);
    const Eigen::VectorXd u =
        interpolate_velocity(problem.layout(), [&](const Point2& p) { return field(t, p); });
    series.time.push_back(t);
    series.flowrate.push_back(problem.flowrate(u));
  }
  return series;
}

void write_flowrate_csv(std::ostream& out, const FlowrateSeries& series) {
  if (series.time.size() != series.flowrate.size()) {
    throw std::invalid_argument("flowrate series columns differ in length");
  }
  out << "time,Q\n";
  for (std::size_t k = 0; k < series.time.size(); ++k) {
    out << format_double(series.time[k]) << ',' << format_double(series.flowrate[k]) << '\n';
  }
  if (series.blowup_time) out << "# blowup t=" << format_double(*series.blowup_time) << '\n';
}

void write_flowrate_csv(const std::filesystem::path& path, const FlowrateSeries& series) {
  auto out = open_for_writing(path);
  write_flowrate_csv(out, series);
  finish(out, path);
}

FlowrateSeries read_flowrate_csv(std::istream& in) {
  FlowrateSeries series;
  std::string line;
  int number = 0;
  if (!std::getline(in, line) || strip_cr(line) != "time,Q") {
    throw DataFileError(1, "expected header 'time,Q'");
  }
  ++number;
  while (std::getline(in, line)) {
    ++number;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# blowup t=";
      if (line.rfind(key, 0) == 0) {
        series.blowup_time = parse_number(line.substr(key.size()), number);
      }
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != 2) throw DataFileError(number, "expected 2 fields");
    series.time.push_back(parse_number(fields[0], number));
    series.flowrate.push_back(parse_number(fields[1], number));
  }
  return series;
}

FlowrateSeries read_flowrate_csv(const std::filesystem::path& path) {
  auto in = open_for_reading(path);
  return read_flowrate_csv(in);
}

void write_control_csv(std::ostream& out, const TimeGrid& grid, const ControlVector& q) {
  if (q.steps() != grid.steps()) throw std::invalid_argument("control does not match the grid");
  out << "time";
  for (int i = 1; i <= q.segments(); ++i) out << ",q" << i;
  out << '\n';
  for (int n = 0; n <= grid.steps(); ++n) {
    out << format_double(grid.time(n));
    for (int i = 1; i <= q.segments(); ++i) out << ',' << format_double(q(i, std::max(n, 1)));
    out << '\n';
  }
}

void write_control_csv(const std::filesystem::path& path, const TimeGrid& grid,
                       const ControlVector& q) {
  auto out = open_for_writing(path);
  write_control_csv(out, grid, q);
  finish(out, path);
}

ControlVector read_control_csv(std::istream& in, const TimeGrid& grid, int segments) {
  std::string header = "time";
  for (int i = 1; i <= segments; ++i) header += ",q" + std::to_string(i);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != header) {
    throw DataFileError(1, "expected header '" + header + "'");
  }
  ControlVector q(segments, grid.steps());
  int number = 1;
  int n = 0;
  while (std::getline(in, line)) {
    ++number;
    line = strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    if (n > grid.steps()) throw DataFileError(number, "more rows than time levels");
    const auto fields = split(line);
    if (static_cast<int>(fields.size()) != segments + 1) {
      throw DataFileError(number, "expected " + std::to_string(segments + 1) + " fields");
    }
    const double t = parse_number(fields[0], number);
    const double expected = grid.time(n);
    if (std::abs(t - expected) > 1e-9 * std::max(1.0, grid.final_time())) {
      throw DataFileError(number, "time " + format_double(t) + " does not match grid time " +
                                      format_double(expected));
    }
    for (int i = 1; i <= segments; ++i) {
      const double v = parse_number(fields[i], number);
      if (!std::isfinite(v)) throw DataFileError(number, "control values must be finite");
      if (n >= 1) q(i, n) = v;
    }
    ++n;
  }
  if (n != grid.steps() + 1) {
    throw DataFileError(number, "expected " + std::to_string(grid.steps() + 1) +
                                    " rows, found " + std::to_string(n));
  }
  return q;
}

ControlVector read_control_csv(const std::filesystem::path& path, const TimeGrid& grid,
                               int segments) {
  auto in = open_for_reading(path);
  return read_control_csv(in, grid, segments);
}

void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& log) {
  out << "iter,j,tracking,regularization,stationarity,step,blowups_in_linesearch\n";
  for (const auto& r : log) {
    out << r.iteration << ',' << format_double(r.objective) << ',' << format_double(r.tracking)
        << ',' << format_double(r.regularization) << ',' << format_double(r.stationarity) << ','
        << format_double(r.step) << ',' << r.blowups_in_linesearch << '\n';
  }
}

void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationRecord>& log) {
  auto out = open_for_writing(path);
  write_iterations_csv(out, log);
  finish(out, path);
}

void write_vtk(std::ostream& out, const DofLayout& layout, const Eigen::VectorXd& velocity,
               const Eigen::VectorXd& pressure, double time) {
  const int nodes = layout.num_nodes();
  if (velocity.size() != layout.num_velocity_dofs() ||
      pressure.size() != layout.num_pressure_dofs()) {
    throw std::invalid_argument("field sizes do not match the layout");
  }
  // Pressure on P2 nodes: vertex values, edge midpoints averaged.
  std::vector<double> p(nodes, 0.0);
  for (int v = 0; v < layout.num_pressure_dofs(); ++v) p[v] = pressure[v];
  for (const auto& e : layout.element_nodes()) {
    for (int k = 0; k < 3; ++k) p[e[3 + k]] = 0.5 * (pressure[e[k]] + pressure[e[(k + 1) % 3]]);
  }

  const auto elements = layout.element_nodes();
  out << "# vtk DataFile Version 3.0\n";
  out << "dnflow t=" << format_double(time) << '\n';
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "FIELD FieldData 1\nTIME 1 1 double\n" << format_double(time) << '\n';
  out << "POINTS " << nodes << " double\n";
  for (const auto& x : layout.node_coordinates()) {
    out << format_double(x.x) << ' ' << format_double(x.y) << " 0\n";
  }
  out << "CELLS " << elements.size() << ' ' << 7 * elements.size() << '\n';
  for (const auto& e : elements) {
    out << 6;
    for (int k : e) out << ' ' << k;
    out << '\n';
  }
  out << "CELL_TYPES " << elements.size() << '\n';
  for (std::size_t k = 0; k < elements.size(); ++k) out << "22\n";
  out << "POINT_DATA " << nodes << '\n';
  out << "VECTORS velocity double\n";
  for (int k = 0; k < nodes; ++k) {
    out << format_double(velocity[layout.velocity_dof(0, k)]) << ' '
        << format_double(velocity[layout.velocity_dof(1, k)]) << " 0\n";
  }
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double v : p) out << format_double(v) << '\n';
}

void write_vtk(const std::filesystem::path& path, const DofLayout& layout,
               const Eigen::VectorXd& velocity, const Eigen::VectorXd& pressure, double time) {
  auto out = open_for_writing(path);
  write_vtk(out, layout, velocity, pressure, time);
  finish(out, path);
}

}  // namespace dnflow
