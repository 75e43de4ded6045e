#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dnflow/assembly.hpp"
#include "dnflow/block_system.hpp"
#include "dnflow/control.hpp"
#include "dnflow/dof_layout.hpp"
#include "dnflow/mesh.hpp"

namespace dnflow {

enum class FlowModel { NavierStokes, Stokes };

struct StateOptions {
  FlowModel model = FlowModel::NavierStokes;
  double newton_tol = 1e-10;
  int newton_max = 20;
  double blowup_threshold = 1e6;
};

/// Velocity and pressure coefficients at t_0..t_k. Used for states,
/// tangents and second tangents alike.
struct Trajectory {
  FlowModel model = FlowModel::NavierStokes;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> velocity;
  std::vector<Eigen::VectorXd> pressure;

  /// Index of the last stored time level.
  int last_step() const { return static_cast<int>(velocity.size()) - 1; }
  double time(int n) const { return dt * n; }
};

enum class BlowupTrigger { NormThreshold, NewtonDivergence, NonFinite };

std::string to_string(BlowupTrigger trigger);

struct BlowupReport {
  double time = 0.0;
  int step = 0;
  BlowupTrigger trigger = BlowupTrigger::NormThreshold;
  double last_finite_norm = 0.0;
  std::string detail;
};

/// Result of a forward solve. On blowup the trajectory holds every accepted
/// step before the failing one.
struct StateSolution {
  Trajectory trajectory;
  std::optional<BlowupReport> blowup;

  bool completed() const { return !blowup.has_value(); }
};

/// Discretized channel flow problem: mesh, Taylor-Hood layout, assembled
/// constant operators and the implicit-Euler step system. Immutable after
/// construction; solves are reentrant.
class FlowProblem {
 public:
  FlowProblem(Mesh mesh, TimeGrid grid, StateOptions options = {},
              AssemblyOptions assembly_options = {});

  FlowProblem(const FlowProblem&) = delete;
  FlowProblem& operator=(const FlowProblem&) = delete;

  const Mesh& mesh() const { return mesh_; }
  const DofLayout& layout() const { return layout_; }
  const FlowAssembler& assembler() const { return assembler_; }
  const TimeGrid& grid() const { return grid_; }
  const StateOptions& options() const { return options_; }
  const StepSystem& step_system() const { return *step_system_; }
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& divergence() const { return divergence_; }
  const std::vector<Eigen::VectorXd>& boundary_loads() const { return loads_; }
  int num_open_segments() const { return layout_.num_open_segments(); }

  /// Time-marches with the configured model.
  StateSolution solve_state(const ControlVector& q, const Eigen::VectorXd& u0) const;
  /// Time-marches the unsteady Stokes problem (convection omitted).
  StateSolution solve_state_stokes(const ControlVector& q, const Eigen::VectorXd& u0) const;
  StateSolution solve(const ControlVector& q, const Eigen::VectorXd& u0, FlowModel model) const;

  /// Q(v) = -int_{Gamma_N,1} v . n ds
  double flowrate(const Eigen::VectorXd& velocity) const;
  double l2_norm(const Eigen::VectorXd& velocity) const;

  /// Step residual of the implicit-Euler scheme on the full unknown vector,
  /// with constrained rows replaced by the constrained values.
  Eigen::VectorXd step_residual(const Eigen::VectorXd& x_new, const Eigen::VectorXd& u_old,
                                const ControlVector& q, int step, FlowModel model) const;
  /// Jacobian of step_residual in x_new.
  FactorizedSystem step_jacobian(const Eigen::VectorXd& velocity, FlowModel model) const;

  /// -sum_i q_i^n b_i
  Eigen::VectorXd control_load(const ControlVector& q, int step) const;

 private:
  Mesh mesh_;
  TimeGrid grid_;
  StateOptions options_;
  DofLayout layout_;
  FlowAssembler assembler_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  SparseMatrix divergence_;
  std::vector<Eigen::VectorXd> loads_;
  std::unique_ptr<StepSystem> step_system_;
};

}  // namespace dnflow
