#pragma once

#include <vector>

#include <Eigen/Core>

#include "dnflow/assembly.hpp"
#include "dnflow/linear_solver.hpp"

namespace dnflow {

/// Implicit-Euler step matrix of the mixed problem
///
///   [ M/dt + K (+ C(u) + C'(u))   -B^T ]
///   [ -B                           0   ]
///
/// on the full unknown vector [u_x | u_y | p], with the no-slip dofs removed
/// by symmetric elimination (zero row and column, unit diagonal). The
/// pattern is fixed at construction so every step shares one symbolic
/// factorization, and the same assembly path serves Newton, tangent and
/// adjoint solves.
class StepSystem {
 public:
  StepSystem(const FlowAssembler& assembler, double inverse_time_step);

  int size() const { return size_; }

  /// Step matrix; `convection_state == nullptr` gives the Stokes operator.
  SparseMatrix matrix(const Eigen::VectorXd* convection_state) const;
  FactorizedSystem factorize(const Eigen::VectorXd* convection_state) const;

  /// Zeroes the constrained velocity rows of a full-length vector.
  void eliminate(Eigen::VectorXd& full) const;

  const SymbolicFactorization& symbolic() const { return symbolic_; }

 private:
  int position(int row, int col) const;

  const FlowAssembler* assembler_;
  int size_ = 0;
  SparseMatrix pattern_;
  std::vector<double> linear_values_;
  std::vector<std::array<int, kLocalVelocityDofs * kLocalVelocityDofs>> element_positions_;
  std::vector<int> constrained_positions_;
  std::vector<int> constrained_diagonal_;
  std::vector<int> constrained_dofs_;
  SymbolicFactorization symbolic_;
};

}  // namespace dnflow
