#include "dnflow/linear_solver.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace dnflow {

using SparseMatrix = Eigen::SparseMatrix<double>;

namespace {

void require_compressed_square(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw SolveError("matrix is not square");
  if (!m.isCompressed()) throw SolveError("matrix must be in compressed storage");
}

double inf_norm(const SparseMatrix& m) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
  }
  return m.rows() > 0 ? row_sums.maxCoeff() : 0.0;
}

}  // namespace

// The column ordering is the expensive, pattern-only part; it is computed once
// and applied to every matrix that shares the pattern.
struct SymbolicFactorization::Impl {
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> ordering;
  std::vector<int> outer;
  std::vector<int> inner;
};

SymbolicFactorization SymbolicFactorization::analyze(const SparseMatrix& pattern) {
  require_compressed_square(pattern);
  auto impl = std::make_shared<Impl>();
  const int n = static_cast<int>(pattern.rows());
  impl->outer.assign(pattern.outerIndexPtr(), pattern.outerIndexPtr() + n + 1);
  impl->inner.assign(pattern.innerIndexPtr(), pattern.innerIndexPtr() + pattern.nonZeros());
  // COLAMD reports the new position of each column; keep the inverse so that
  // column k of `matrix * ordering` is column ordering[k] of the matrix.
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> position;
  Eigen::COLAMDOrdering<int> colamd;
  colamd(pattern, position);
  impl->ordering = position.inverse();
  SymbolicFactorization out;
  out.impl_ = std::move(impl);
  return out;
}

bool SymbolicFactorization::matches(const SparseMatrix& matrix) const {
  if (!impl_ || !matrix.isCompressed()) return false;
  const auto n = static_cast<std::size_t>(matrix.rows());
  if (matrix.rows() != matrix.cols() || impl_->outer.size() != n + 1 ||
      impl_->inner.size() != static_cast<std::size_t>(matrix.nonZeros())) {
    return false;
  }
  return std::equal(impl_->outer.begin(), impl_->outer.end(), matrix.outerIndexPtr()) &&
         std::equal(impl_->inner.begin(), impl_->inner.end(), matrix.innerIndexPtr());
}

struct FactorizedSystem::Impl {
  using Lu = Eigen::SparseLU<SparseMatrix, Eigen::NaturalOrdering<int>>;
  SparseMatrix matrix;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> ordering;
  double norm = 0.0;
  double norm_transposed = 0.0;
  // Transposed solves need a non-const view object; the factors are not modified.
  mutable Lu lu;
};

FactorizedSystem FactorizedSystem::factorize(const SparseMatrix& matrix) {
  return factorize(matrix, SymbolicFactorization::analyze(matrix));
}

FactorizedSystem FactorizedSystem::factorize(const SparseMatrix& matrix,
                                             const SymbolicFactorization& symbolic) {
  require_compressed_square(matrix);
  if (!symbolic.matches(matrix)) throw SolveError("symbolic analysis does not match the matrix");
  auto impl = std::make_shared<Impl>();
  impl->matrix = matrix;
  impl->ordering = symbolic.impl_->ordering;
  impl->norm = inf_norm(matrix);
  impl->norm_transposed = inf_norm(SparseMatrix(matrix.transpose()));
  const SparseMatrix permuted = matrix * impl->ordering;
  impl->lu.analyzePattern(permuted);
  impl->lu.factorize(permuted);
  if (impl->lu.info() != Eigen::Success) {
    // The factorization reports a 1-based column of its internally reordered matrix.
    const std::string message = impl->lu.lastErrorMessage();
    int dof = -1;
    const auto pos = message.find_last_of(' ');
    if (pos != std::string::npos) {
      std::istringstream in(message.substr(pos + 1));
      int column = 0;
      if (in >> column && column >= 1 && column <= matrix.cols()) {
        const int internal = column - 1;
        const auto& post = impl->lu.colsPermutation().indices();
        int local = -1;
        for (int k = 0; k < post.size(); ++k) {
          if (post[k] == internal) local = k;
        }
        if (local >= 0) dof = impl->ordering.indices()[local];
      }
    }
    throw SingularMatrixError(dof, "matrix is numerically singular (zero pivot at dof " +
                                       std::to_string(dof) + ")");
  }
  FactorizedSystem out;
  out.impl_ = std::move(impl);
  return out;
}

int FactorizedSystem::size() const { return static_cast<int>(impl_->matrix.rows()); }

const SparseMatrix& FactorizedSystem::matrix() const { return impl_->matrix; }

Eigen::VectorXd FactorizedSystem::solve(const Eigen::VectorXd& rhs) const {
  return solve_system(false, rhs);
}

Eigen::VectorXd FactorizedSystem::solve_transposed(const Eigen::VectorXd& rhs) const {
  return solve_system(true, rhs);
}

Eigen::VectorXd FactorizedSystem::solve_system(bool transposed, const Eigen::VectorXd& rhs) const {
  const SparseMatrix& a = impl_->matrix;
  if (rhs.size() != a.rows()) throw std::invalid_argument("right-hand side has wrong length");
  if (!rhs.allFinite()) throw std::invalid_argument("right-hand side is not finite");
  // A Q = P^T L U with Q the stored ordering.
  Eigen::VectorXd x;
  if (!transposed) {
    x = impl_->ordering * Eigen::VectorXd(impl_->lu.solve(rhs));
  } else {
    x = impl_->lu.transpose().solve(Eigen::VectorXd(impl_->ordering.transpose() * rhs));
  }
  if (impl_->lu.info() != Eigen::Success) throw SolveError("triangular solve failed");
  const Eigen::VectorXd residual =
      (transposed ? Eigen::VectorXd(a.transpose() * x) : Eigen::VectorXd(a * x)) - rhs;
  const double r = residual.lpNorm<Eigen::Infinity>();
  const double scale = (transposed ? impl_->norm_transposed : impl_->norm) *
                           x.lpNorm<Eigen::Infinity>() +
                       rhs.lpNorm<Eigen::Infinity>();
  if (!std::isfinite(r) || r > kResidualTolerance * scale) {
    throw SolveError("linear solve residual " + std::to_string(r) + " exceeds tolerance");
  }
  return x;
}

}  // namespace dnflow
