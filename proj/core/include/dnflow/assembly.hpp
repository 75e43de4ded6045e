#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dnflow/basis.hpp"
#include "dnflow/dof_layout.hpp"
#include "dnflow/mesh.hpp"
#include "dnflow/quadrature.hpp"

namespace dnflow {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class ScalarSpace { P1, P2 };

/// Local velocity unknowns of a triangle: component c, local node i -> 6 c + i.
inline constexpr int kLocalVelocityDofs = 12;
using LocalVelocityMatrix = Eigen::Matrix<double, kLocalVelocityDofs, kLocalVelocityDofs>;

struct TrackingTerms {
  /// (1/4) int |u - u_d|^4
  double value = 0.0;
  /// r_k = int |e|^2 e . phi_k, e = u - u_d
  Eigen::VectorXd residual;
  /// Derivative of r in u; empty unless requested.
  SparseMatrix hessian;
};

struct AssemblyOptions {
  /// Test hook: negate every convection kernel.
  bool flip_convection_sign = false;
};

/// Assembles the bilinear, trilinear and objective forms of the mixed
/// Navier-Stokes problem on a fixed mesh. Velocity operators act on vectors
/// of length num_velocity_dofs; the divergence maps velocity to pressure
/// test functions. Element traversal order is fixed, so results are
/// bit-reproducible.
class FlowAssembler {
 public:
  FlowAssembler(const Mesh& mesh, const DofLayout& layout, AssemblyOptions options = {});

  const DofLayout& layout() const { return layout_; }
  int num_elements() const { return static_cast<int>(elements_.size()); }

  SparseMatrix scalar_mass(ScalarSpace space) const;
  SparseMatrix scalar_stiffness(ScalarSpace space) const;

  /// (u, v) and (grad u, grad v) on the vector P2 space.
  SparseMatrix mass() const;
  SparseMatrix stiffness() const;
  /// B with (B u)_i = (div u, psi_i).
  SparseMatrix divergence() const;
  /// b_i with (b_i)_k = int_{Gamma_N,i} phi_k . n ds, one per open segment.
  std::vector<Eigen::VectorXd> boundary_loads() const;

  /// Matrix of w -> ((u . grad) w, v).
  SparseMatrix convection(const Eigen::VectorXd& u) const;
  /// Matrix of w -> ((w . grad) u, v).
  SparseMatrix convection_linearization(const Eigen::VectorXd& u) const;
  /// Vector ((a . grad) b, phi_k).
  Eigen::VectorXd convection_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  /// Local convection Jacobian C(u) + C'(u) on element `element`.
  void local_convection_jacobian(int element, const Eigen::VectorXd& u,
                                 LocalVelocityMatrix& out) const;
  /// Global velocity dofs of an element in local order 6 c + i.
  std::array<int, kLocalVelocityDofs> local_velocity_dofs(int element) const;

  /// Tracking functional and its derivatives, integrated with a degree-8
  /// rule so that all terms are exact for P2 fields.
  TrackingTerms tracking_terms(const Eigen::VectorXd& u, const Eigen::VectorXd& target,
                               bool with_hessian) const;
  double tracking_value(const Eigen::VectorXd& u, const Eigen::VectorXd& target) const;
  /// int |e|^2 |du|^2 + 2 (e . du)^2, the second derivative of the tracking
  /// value in direction du.
  double tracking_curvature(const Eigen::VectorXd& u, const Eigen::VectorXd& target,
                            const Eigen::VectorXd& du) const;

 private:
  struct Element {
    std::array<int, 6> nodes{};
    std::array<int, 3> vertices{};
    double abs_det = 0.0;
    // Physical P2 gradients at the points of the degree-5 rule.
    std::vector<std::array<std::array<double, 2>, 6>> p2_grad;
    std::array<std::array<double, 2>, 3> p1_grad{};
  };

  template <typename Kernel>
  SparseMatrix assemble_velocity_matrix(Kernel&& kernel) const;

  DofLayout layout_;
  AssemblyOptions options_;
  TriangleRule rule_;
  TriangleRule tracking_rule_;
  BasisTable basis_;
  BasisTable tracking_basis_;
  std::vector<Element> elements_;
};

}  // namespace dnflow
