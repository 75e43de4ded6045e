#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dnflow/control.hpp"
#include "dnflow/dof_layout.hpp"
#include "dnflow/fields.hpp"
#include "dnflow/optimizer.hpp"
#include "dnflow/state.hpp"

namespace dnflow {

/// Unreadable or malformed data file; `line` is 1-based, 0 if not applicable.
class DataFileError : public std::runtime_error {
 public:
  DataFileError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct FlowrateSeries {
  std::vector<double> time;
  std::vector<double> flowrate;
  /// Set when the run ended in blowup; written as a trailing comment line.
  std::optional<double> blowup_time;
};

/// Q(u^n) at every stored time level of a state.
FlowrateSeries flowrate_series(const FlowProblem& problem, const StateSolution& state);
/// Q of the P2 interpolant of a space-time field at t_0..t_N.
FlowrateSeries flowrate_series(const FlowProblem& problem, const SpaceTimeField& field);

/// `time,Q` rows, then `# blowup t=<t*>` if applicable.
void write_flowrate_csv(std::ostream& out, const FlowrateSeries& series);
void write_flowrate_csv(const std::filesystem::path& path, const FlowrateSeries& series);
FlowrateSeries read_flowrate_csv(std::istream& in);
FlowrateSeries read_flowrate_csv(const std::filesystem::path& path);

/// `time,q1,...,qL` at t_0..t_N. Controls are left-continuous, so the row at
/// t_n (n >= 1) holds q^n; the row at t_0 repeats q^1.
void write_control_csv(std::ostream& out, const TimeGrid& grid, const ControlVector& q);
void write_control_csv(const std::filesystem::path& path, const TimeGrid& grid,
                       const ControlVector& q);
/// Reads a file written by write_control_csv. Times must match the grid.
ControlVector read_control_csv(std::istream& in, const TimeGrid& grid, int segments);
ControlVector read_control_csv(const std::filesystem::path& path, const TimeGrid& grid,
                               int segments);

/// `iter,j,tracking,regularization,stationarity,step,blowups_in_linesearch`.
void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& log);
void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationRecord>& log);

/// Legacy ASCII VTK on the quadratic triangles (cell type 22): velocity as
/// point vectors, pressure as point scalars (linear on each edge).
void write_vtk(std::ostream& out, const DofLayout& layout, const Eigen::VectorXd& velocity,
               const Eigen::VectorXd& pressure, double time);
void write_vtk(const std::filesystem::path& path, const DofLayout& layout,
               const Eigen::VectorXd& velocity, const Eigen::VectorXd& pressure, double time);

}  // namespace dnflow
