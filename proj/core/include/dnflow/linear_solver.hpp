#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace dnflow {

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerically singular matrix; `dof` is the column whose pivot vanished.
class SingularMatrixError : public SolveError {
 public:
  SingularMatrixError(int dof, const std::string& what) : SolveError(what), dof_(dof) {}
  int dof() const { return dof_; }

 private:
  int dof_;
};

/// Symbolic LU analysis of a sparsity pattern, reusable for any matrix with
/// the identical compressed pattern.
class SymbolicFactorization {
 public:
  static SymbolicFactorization analyze(const Eigen::SparseMatrix<double>& pattern);

  bool matches(const Eigen::SparseMatrix<double>& matrix) const;

 private:
  friend class FactorizedSystem;
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Sparse LU factors of a square matrix. Immutable; concurrent solves are
/// safe. Every solve checks the normwise backward error
/// |Ax - b|_inf / (|A|_inf |x|_inf + |b|_inf) <= 1e-10.
class FactorizedSystem {
 public:
  static constexpr double kResidualTolerance = 1e-10;

  static FactorizedSystem factorize(const Eigen::SparseMatrix<double>& matrix);
  static FactorizedSystem factorize(const Eigen::SparseMatrix<double>& matrix,
                                    const SymbolicFactorization& symbolic);

  int size() const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve_transposed(const Eigen::VectorXd& rhs) const;
  const Eigen::SparseMatrix<double>& matrix() const;

 private:
  struct Impl;
  Eigen::VectorXd solve_system(bool transposed, const Eigen::VectorXd& rhs) const;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace dnflow
