#include <doctest.h>

#include <random>

#include "dnflow/block_system.hpp"
#include "dnflow/linear_solver.hpp"
#include "support.hpp"

using namespace dnflow;

namespace {

Eigen::SparseMatrix<double> random_sparse(int n, std::mt19937& rng, double diagonal) {
  std::normal_distribution<double> d;
  std::uniform_int_distribution<int> col(0, n - 1);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, diagonal + d(rng));
    for (int k = 0; k < 3; ++k) t.emplace_back(i, col(rng), d(rng));
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

}  // namespace

TEST_CASE("sparse LU solves and transposed solves") {
  std::mt19937 rng(1);
  const auto a = random_sparse(200, rng, 10.0);
  const auto f = FactorizedSystem::factorize(a);
  CHECK(f.size() == 200);
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(200, -1.0, 2.0);
  const Eigen::VectorXd x = f.solve(b);
  CHECK((a * x - b).norm() < 1e-12 * b.norm());
  const Eigen::VectorXd y = f.solve_transposed(b);
  CHECK((Eigen::SparseMatrix<double>(a.transpose()) * y - b).norm() < 1e-12 * b.norm());
}

TEST_CASE("symbolic analysis is reused for matrices with the same pattern") {
  std::mt19937 rng(2);
  const auto a = random_sparse(80, rng, 8.0);
  const auto symbolic = SymbolicFactorization::analyze(a);
  CHECK(symbolic.matches(a));
  auto b = a;
  for (int k = 0; k < b.nonZeros(); ++k) b.valuePtr()[k] *= 1.5;
  CHECK(symbolic.matches(b));
  const auto f = FactorizedSystem::factorize(b, symbolic);
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(80);
  CHECK((b * f.solve(rhs) - rhs).norm() < 1e-12 * rhs.norm());
  const auto other = random_sparse(80, rng, 8.0);
  CHECK_FALSE(symbolic.matches(other));
  CHECK_THROWS(FactorizedSystem::factorize(other, symbolic));
}

TEST_CASE("singular matrices are reported with a dof") {
  std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}, {1, 1, 2.0}, {2, 0, 1.0}, {2, 1, 1.0}, {0, 2, 0.0}};
  Eigen::SparseMatrix<double> a(3, 3);
  a.setFromTriplets(t.begin(), t.end());
  try {
    FactorizedSystem::factorize(a);
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.dof() >= 0);
    CHECK(e.dof() < 3);
  }
}

TEST_CASE("Taylor-Hood step matrix is nonsingular and solves exactly") {
  const auto problem = dnflow::test::channel_problem(8, 4, 10);
  const StepSystem& system = problem->step_system();
  const Eigen::VectorXd u = dnflow::test::w_interpolant(*problem, 3.0);
  for (const Eigen::VectorXd* state : {static_cast<const Eigen::VectorXd*>(nullptr), &u}) {
    const SparseMatrix m = system.matrix(state);
    const auto f = system.factorize(state);
    Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(system.size(), 0.0, 1.0);
    system.eliminate(rhs);
    const Eigen::VectorXd x = f.solve(rhs);
    CHECK((m * x - rhs).lpNorm<Eigen::Infinity>() < 1e-10);
    const Eigen::VectorXd z = f.solve_transposed(rhs);
    CHECK((SparseMatrix(m.transpose()) * z - rhs).lpNorm<Eigen::Infinity>() < 1e-10);
  }
  // The Stokes step matrix is symmetric after elimination.
  const SparseMatrix stokes = system.matrix(nullptr);
  CHECK((stokes - SparseMatrix(stokes.transpose())).norm() < 1e-12 * stokes.norm());
}
