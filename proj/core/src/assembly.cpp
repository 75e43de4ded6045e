#include "dnflow/assembly.hpp"

#include <cmath>

namespace dnflow {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int rows, int cols, const Triplets& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

FlowAssembler::FlowAssembler(const Mesh& mesh, const DofLayout& layout, AssemblyOptions options)
    : layout_(layout),
      options_(options),
      rule_(triangle_rule(5)),
      tracking_rule_(triangle_rule(8)),
      basis_(eval_basis(rule_)),
      tracking_basis_(eval_basis(tracking_rule_)) {
  const auto& vertices = mesh.vertices();
  elements_.reserve(mesh.triangles().size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    Element el;
    el.nodes = layout_.element_nodes()[t];
    el.vertices = tri;
    const Point2& a = vertices[tri[0]];
    const Point2& b = vertices[tri[1]];
    const Point2& c = vertices[tri[2]];
    const double j00 = b.x - a.x, j01 = c.x - a.x;
    const double j10 = b.y - a.y, j11 = c.y - a.y;
    const double det = j00 * j11 - j01 * j10;
    el.abs_det = std::abs(det);
    // grad = J^{-T} ref_grad
    const double i00 = j11 / det, i01 = -j10 / det;
    const double i10 = -j01 / det, i11 = j00 / det;
    const auto map = [&](const ReferenceGradient& g) -> std::array<double, 2> {
      return {i00 * g[0] + i01 * g[1], i10 * g[0] + i11 * g[1]};
    };
    el.p2_grad.resize(rule_.size());
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      for (int i = 0; i < 6; ++i) el.p2_grad[q][i] = map(basis_.p2_grad[q][i]);
    }
    for (int i = 0; i < 3; ++i) el.p1_grad[i] = map(basis_.p1_grad[i]);
    elements_.push_back(std::move(el));
  }
}

std::array<int, kLocalVelocityDofs> FlowAssembler::local_velocity_dofs(int element) const {
  std::array<int, kLocalVelocityDofs> dofs{};
  const auto& nodes = elements_[element].nodes;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 6; ++i) dofs[6 * c + i] = layout_.velocity_dof(c, nodes[i]);
  }
  return dofs;
}

SparseMatrix FlowAssembler::scalar_mass(ScalarSpace space) const {
  Triplets triplets;
  const bool p2 = space == ScalarSpace::P2;
  const int n = p2 ? 6 : 3;
  for (const auto& el : elements_) {
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const double w = rule_.weights[q] * el.abs_det;
      for (int i = 0; i < n; ++i) {
        const double phi_i = p2 ? basis_.p2[q][i] : basis_.p1[q][i];
        const int row = p2 ? el.nodes[i] : el.vertices[i];
        for (int j = 0; j < n; ++j) {
          const double phi_j = p2 ? basis_.p2[q][j] : basis_.p1[q][j];
          triplets.emplace_back(row, p2 ? el.nodes[j] : el.vertices[j], w * phi_i * phi_j);
        }
      }
    }
  }
  const int size = p2 ? layout_.num_nodes() : layout_.num_pressure_dofs();
  return from_triplets(size, size, triplets);
}

SparseMatrix FlowAssembler::scalar_stiffness(ScalarSpace space) const {
  Triplets triplets;
  const bool p2 = space == ScalarSpace::P2;
  const int n = p2 ? 6 : 3;
  for (const auto& el : elements_) {
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const double w = rule_.weights[q] * el.abs_det;
      for (int i = 0; i < n; ++i) {
        const auto& gi = p2 ? el.p2_grad[q][i] : el.p1_grad[i];
        const int row = p2 ? el.nodes[i] : el.vertices[i];
        for (int j = 0; j < n; ++j) {
          const auto& gj = p2 ? el.p2_grad[q][j] : el.p1_grad[j];
          triplets.emplace_back(row, p2 ? el.nodes[j] : el.vertices[j],
                                w * (gi[0] * gj[0] + gi[1] * gj[1]));
        }
      }
    }
  }
  const int size = p2 ? layout_.num_nodes() : layout_.num_pressure_dofs();
  return from_triplets(size, size, triplets);
}

namespace {

SparseMatrix block_diagonal(const SparseMatrix& scalar) {
  const int n = static_cast<int>(scalar.rows());
  Triplets triplets;
  triplets.reserve(2 * scalar.nonZeros());
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < scalar.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(scalar, k); it; ++it) {
        triplets.emplace_back(c * n + it.row(), c * n + it.col(), it.value());
      }
    }
  }
  return from_triplets(2 * n, 2 * n, triplets);
}

}  // namespace

SparseMatrix FlowAssembler::mass() const { return block_diagonal(scalar_mass(ScalarSpace::P2)); }

SparseMatrix FlowAssembler::stiffness() const {
  return block_diagonal(scalar_stiffness(ScalarSpace::P2));
}

SparseMatrix FlowAssembler::divergence() const {
  Triplets triplets;
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& el = elements_[e];
    const auto dofs = local_velocity_dofs(static_cast<int>(e));
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const double w = rule_.weights[q] * el.abs_det;
      for (int i = 0; i < 3; ++i) {
        const double psi = basis_.p1[q][i];
        for (int c = 0; c < 2; ++c) {
          for (int j = 0; j < 6; ++j) {
            triplets.emplace_back(el.vertices[i], dofs[6 * c + j], w * psi * el.p2_grad[q][j][c]);
          }
        }
      }
    }
  }
  return from_triplets(layout_.num_pressure_dofs(), layout_.num_velocity_dofs(), triplets);
}

std::vector<Eigen::VectorXd> FlowAssembler::boundary_loads() const {
  const LineRule edge_rule = line_rule(5);
  std::vector<Eigen::VectorXd> loads(layout_.num_open_segments(),
                                     Eigen::VectorXd::Zero(layout_.num_velocity_dofs()));
  for (const auto& facet : layout_.boundary_facets()) {
    if (facet.tag == kWallTag) continue;
    auto& b = loads[facet.tag - 1];
    for (std::size_t q = 0; q < edge_rule.size(); ++q) {
      const auto phi = p2_edge_values(edge_rule.points[q]);
      const double w = edge_rule.weights[q] * facet.length;
      for (int k = 0; k < 3; ++k) {
        b[layout_.velocity_dof(0, facet.nodes[k])] += w * phi[k] * facet.normal.x;
        b[layout_.velocity_dof(1, facet.nodes[k])] += w * phi[k] * facet.normal.y;
      }
    }
  }
  return loads;
}

template <typename Kernel>
SparseMatrix FlowAssembler::assemble_velocity_matrix(Kernel&& kernel) const {
  Triplets triplets;
  triplets.reserve(elements_.size() * kLocalVelocityDofs * kLocalVelocityDofs);
  LocalVelocityMatrix local;
  for (int e = 0; e < num_elements(); ++e) {
    local.setZero();
    kernel(e, local);
    const auto dofs = local_velocity_dofs(e);
    for (int a = 0; a < kLocalVelocityDofs; ++a) {
      for (int b = 0; b < kLocalVelocityDofs; ++b) {
        if (local(a, b) != 0.0) triplets.emplace_back(dofs[a], dofs[b], local(a, b));
      }
    }
  }
  const int n = layout_.num_velocity_dofs();
  return from_triplets(n, n, triplets);
}

namespace {

struct PointState {
  double u[2];
  double grad[2][2];  // grad[d][c] = d u_d / d x_c
};

PointState point_state(const std::array<int, kLocalVelocityDofs>& dofs, const Eigen::VectorXd& u,
                       const std::array<double, 6>& phi,
                       const std::array<std::array<double, 2>, 6>& grad) {
  PointState s{};
  for (int d = 0; d < 2; ++d) {
    for (int i = 0; i < 6; ++i) {
      const double coef = u[dofs[6 * d + i]];
      s.u[d] += coef * phi[i];
      s.grad[d][0] += coef * grad[i][0];
      s.grad[d][1] += coef * grad[i][1];
    }
  }
  return s;
}

}  // namespace

SparseMatrix FlowAssembler::convection(const Eigen::VectorXd& u) const {
  const double sign = options_.flip_convection_sign ? -1.0 : 1.0;
  return assemble_velocity_matrix([&](int e, LocalVelocityMatrix& local) {
    const auto& el = elements_[e];
    const auto dofs = local_velocity_dofs(e);
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const double w = sign * rule_.weights[q] * el.abs_det;
      const auto s = point_state(dofs, u, basis_.p2[q], el.p2_grad[q]);
      for (int j = 0; j < 6; ++j) {
        const double adv = s.u[0] * el.p2_grad[q][j][0] + s.u[1] * el.p2_grad[q][j][1];
        for (int i = 0; i < 6; ++i) {
          const double v = w * basis_.p2[q][i] * adv;
          local(i, j) += v;
          local(6 + i, 6 + j) += v;
        }
      }
    }
  });
}

SparseMatrix FlowAssembler::convection_linearization(const Eigen::VectorXd& u) const {
  const double sign = options_.flip_convection_sign ? -1.0 : 1.0;
  return assemble_velocity_matrix([&](int e, LocalVelocityMatrix& local) {
    const auto& el = elements_[e];
    const auto dofs = local_velocity_dofs(e);
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const double w = sign * rule_.weights[q] * el.abs_det;
      const auto s = point_state(dofs, u, basis_.p2[q], el.p2_grad[q]);
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          const double pp = w * basis_.p2[q][i] * basis_.p2[q][j];
          for (int d = 0; d < 2; ++d) {
            for (int c = 0; c < 2; ++c) local(6 * d + i, 6 * c + j) += pp * s.grad[d][c];
          }
        }
      }
    }
  });
}

void FlowAssembler::local_convection_jacobian(int element, const Eigen::VectorXd& u,
                                              LocalVelocityMatrix& local) const {
  const double sign = options_.flip_convection_sign ? -1.0 : 1.0;
  const auto& el = elements_[element];
  const auto dofs = local_velocity_dofs(element);
  local.setZero();
  for (std::size_t q = 0; q < rule_.size(); ++q) {
    const double w = sign * rule_.weights[q] * el.abs_det;
    const auto& phi = basis_.p2[q];
    const auto& grad = el.p2_grad[q];
    const auto s = point_state(dofs, u, phi, grad);
    for (int j = 0; j < 6; ++j) {
      const double adv = s.u[0] * grad[j][0] + s.u[1] * grad[j][1];
      for (int i = 0; i < 6; ++i) {
        const double wi = w * phi[i];
        const double v = wi * adv;
        const double pp = wi * phi[j];
        local(i, j) += v + pp * s.grad[0][0];
        local(i, 6 + j) += pp * s.grad[0][1];
        local(6 + i, j) += pp * s.grad[1][0];
        local(6 + i, 6 + j) += v + pp * s.grad[1][1];
      }
    }
  }
}

Eigen::VectorXd FlowAssembler::convection_vector(const Eigen::VectorXd& a,
                                                 const Eigen::VectorXd& b) const {
  const double sign = options_.flip_convection_sign ? -1.0 : 1.0;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(layout_.num_velocity_dofs());
  for (int e = 0; e < num_elements(); ++e) {
    const auto& el = elements_[e];
    const auto dofs = local_velocity_dofs(e);
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const double w = sign * rule_.weights[q] * el.abs_det;
      const auto sa = point_state(dofs, a, basis_.p2[q], el.p2_grad[q]);
      const auto sb = point_state(dofs, b, basis_.p2[q], el.p2_grad[q]);
      for (int d = 0; d < 2; ++d) {
        const double adv = sa.u[0] * sb.grad[d][0] + sa.u[1] * sb.grad[d][1];
        for (int i = 0; i < 6; ++i) out[dofs[6 * d + i]] += w * basis_.p2[q][i] * adv;
      }
    }
  }
  return out;
}

namespace {

std::array<double, 2> point_value(const std::array<int, kLocalVelocityDofs>& dofs,
                                  const Eigen::VectorXd& u, const std::array<double, 6>& phi) {
  std::array<double, 2> v{0.0, 0.0};
  for (int d = 0; d < 2; ++d) {
    for (int i = 0; i < 6; ++i) v[d] += u[dofs[6 * d + i]] * phi[i];
  }
  return v;
}

}  // namespace

TrackingTerms FlowAssembler::tracking_terms(const Eigen::VectorXd& u, const Eigen::VectorXd& target,
                                            bool with_hessian) const {
  TrackingTerms out;
  out.residual = Eigen::VectorXd::Zero(layout_.num_velocity_dofs());
  const Eigen::VectorXd diff = u - target;
  Triplets triplets;
  for (int e = 0; e < num_elements(); ++e) {
    const auto& el = elements_[e];
    const auto dofs = local_velocity_dofs(e);
    LocalVelocityMatrix local = LocalVelocityMatrix::Zero();
    for (std::size_t q = 0; q < tracking_rule_.size(); ++q) {
      const double w = tracking_rule_.weights[q] * el.abs_det;
      const auto& phi = tracking_basis_.p2[q];
      const auto err = point_value(dofs, diff, phi);
      const double err2 = err[0] * err[0] + err[1] * err[1];
      out.value += 0.25 * w * err2 * err2;
      for (int d = 0; d < 2; ++d) {
        for (int i = 0; i < 6; ++i) out.residual[dofs[6 * d + i]] += w * err2 * err[d] * phi[i];
      }
      if (!with_hessian) continue;
      for (int d = 0; d < 2; ++d) {
        for (int c = 0; c < 2; ++c) {
          const double coeff = w * ((c == d ? err2 : 0.0) + 2.0 * err[c] * err[d]);
          for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) local(6 * d + i, 6 * c + j) += coeff * phi[i] * phi[j];
          }
        }
      }
    }
    if (!with_hessian) continue;
    for (int a = 0; a < kLocalVelocityDofs; ++a) {
      for (int b = 0; b < kLocalVelocityDofs; ++b) {
        triplets.emplace_back(dofs[a], dofs[b], local(a, b));
      }
    }
  }
  if (with_hessian) {
    const int n = layout_.num_velocity_dofs();
    out.hessian = from_triplets(n, n, triplets);
  }
  return out;
}

double FlowAssembler::tracking_value(const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& target) const {
  const Eigen::VectorXd diff = u - target;
  double value = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const auto dofs = local_velocity_dofs(e);
    const double det = elements_[e].abs_det;
    for (std::size_t q = 0; q < tracking_rule_.size(); ++q) {
      const auto err = point_value(dofs, diff, tracking_basis_.p2[q]);
      const double err2 = err[0] * err[0] + err[1] * err[1];
      value += 0.25 * tracking_rule_.weights[q] * det * err2 * err2;
    }
  }
  return value;
}

double FlowAssembler::tracking_curvature(const Eigen::VectorXd& u, const Eigen::VectorXd& target,
                                         const Eigen::VectorXd& du) const {
  const Eigen::VectorXd diff = u - target;
  double value = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const auto dofs = local_velocity_dofs(e);
    const double det = elements_[e].abs_det;
    for (std::size_t q = 0; q < tracking_rule_.size(); ++q) {
      const auto& phi = tracking_basis_.p2[q];
      const auto err = point_value(dofs, diff, phi);
      const auto dir = point_value(dofs, du, phi);
      const double err2 = err[0] * err[0] + err[1] * err[1];
      const double dir2 = dir[0] * dir[0] + dir[1] * dir[1];
      const double cross = err[0] * dir[0] + err[1] * dir[1];
      value += tracking_rule_.weights[q] * det * (err2 * dir2 + 2.0 * cross * cross);
    }
  }
  return value;
}

}  // namespace dnflow
