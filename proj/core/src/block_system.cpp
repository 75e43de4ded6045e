#include "dnflow/block_system.hpp"

#include <algorithm>
#include <stdexcept>

namespace dnflow {

StepSystem::StepSystem(const FlowAssembler& assembler, double inverse_time_step)
    : assembler_(&assembler) {
  const DofLayout& layout = assembler.layout();
  const int nu = layout.num_velocity_dofs();
  size_ = layout.num_dofs();

  std::vector<Eigen::Triplet<double>> structure;
  for (int e = 0; e < assembler.num_elements(); ++e) {
    const auto vel = assembler.local_velocity_dofs(e);
    std::array<int, kLocalVelocityDofs + 3> dofs{};
    std::copy(vel.begin(), vel.end(), dofs.begin());
    const auto& nodes = layout.element_nodes()[e];
    for (int i = 0; i < 3; ++i) dofs[kLocalVelocityDofs + i] = layout.pressure_dof(nodes[i]);
    for (int a = 0; a < static_cast<int>(dofs.size()); ++a) {
      for (int b = 0; b < static_cast<int>(dofs.size()); ++b) {
        if (a >= kLocalVelocityDofs && b >= kLocalVelocityDofs) continue;
        structure.emplace_back(dofs[a], dofs[b], 0.0);
      }
    }
  }
  pattern_.resize(size_, size_);
  pattern_.setFromTriplets(structure.begin(), structure.end());
  pattern_.makeCompressed();

  linear_values_.assign(pattern_.nonZeros(), 0.0);
  const auto scatter = [&](const SparseMatrix& m, int row_offset, int col_offset, double scale) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        linear_values_[position(static_cast<int>(it.row()) + row_offset,
                                static_cast<int>(it.col()) + col_offset)] += scale * it.value();
      }
    }
  };
  scatter(assembler.mass(), 0, 0, inverse_time_step);
  scatter(assembler.stiffness(), 0, 0, 1.0);
  const SparseMatrix div = assembler.divergence();
  scatter(div, nu, 0, -1.0);
  scatter(SparseMatrix(div.transpose()), 0, nu, -1.0);

  element_positions_.resize(assembler.num_elements());
  for (int e = 0; e < assembler.num_elements(); ++e) {
    const auto dofs = assembler.local_velocity_dofs(e);
    for (int a = 0; a < kLocalVelocityDofs; ++a) {
      for (int b = 0; b < kLocalVelocityDofs; ++b) {
        element_positions_[e][a * kLocalVelocityDofs + b] = position(dofs[a], dofs[b]);
      }
    }
  }

  constrained_dofs_ = layout.constrained_dofs();
  std::vector<char> mask(size_, 0);
  for (int d : constrained_dofs_) mask[d] = 1;
  for (int col = 0; col < pattern_.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(pattern_, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (!mask[row] && !mask[col]) continue;
      const int pos = static_cast<int>(&it.valueRef() - pattern_.valuePtr());
      if (row == col) {
        constrained_diagonal_.push_back(pos);
      } else {
        constrained_positions_.push_back(pos);
      }
    }
  }
  if (constrained_diagonal_.size() != constrained_dofs_.size()) {
    throw std::logic_error("constrained dof without diagonal entry");
  }
  symbolic_ = SymbolicFactorization::analyze(matrix(nullptr));
}

int StepSystem::position(int row, int col) const {
  const int* begin = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[col];
  const int* end = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(begin, end, row);
  if (it == end || *it != row) throw std::logic_error("entry outside the step pattern");
  return static_cast<int>(it - pattern_.innerIndexPtr());
}

SparseMatrix StepSystem::matrix(const Eigen::VectorXd* convection_state) const {
  SparseMatrix m = pattern_;
  double* values = m.valuePtr();
  std::copy(linear_values_.begin(), linear_values_.end(), values);
  if (convection_state != nullptr) {
    LocalVelocityMatrix local;
    for (int e = 0; e < assembler_->num_elements(); ++e) {
      assembler_->local_convection_jacobian(e, *convection_state, local);
      const auto& pos = element_positions_[e];
      for (int a = 0; a < kLocalVelocityDofs; ++a) {
        for (int b = 0; b < kLocalVelocityDofs; ++b) {
          values[pos[a * kLocalVelocityDofs + b]] += local(a, b);
        }
      }
    }
  }
  for (int pos : constrained_positions_) values[pos] = 0.0;
  for (int pos : constrained_diagonal_) values[pos] = 1.0;
  return m;
}

FactorizedSystem StepSystem::factorize(const Eigen::VectorXd* convection_state) const {
  return FactorizedSystem::factorize(matrix(convection_state), symbolic_);
}

void StepSystem::eliminate(Eigen::VectorXd& full) const {
  for (int d : constrained_dofs_) full[d] = 0.0;
}

}  // namespace dnflow
