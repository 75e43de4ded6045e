#include "dnflow/interpolation.hpp"

#include <cmath>
#include <string>

#include "dnflow/basis.hpp"

namespace dnflow {

namespace {

void require_finite(double value, const Point2& at) {
  if (!std::isfinite(value)) {
    throw InterpolationError("field is not finite at (" + std::to_string(at.x) + ", " +
                             std::to_string(at.y) + ")");
  }
}

}  // namespace

Eigen::VectorXd interpolate_velocity(const DofLayout& layout, const VectorField& field) {
  Eigen::VectorXd out(layout.num_velocity_dofs());
  const auto& nodes = layout.node_coordinates();
  for (int k = 0; k < layout.num_nodes(); ++k) {
    const Vec2 value = field(nodes[k]);
    require_finite(value[0], nodes[k]);
    require_finite(value[1], nodes[k]);
    out[layout.velocity_dof(0, k)] = value[0];
    out[layout.velocity_dof(1, k)] = value[1];
  }
  return out;
}

Eigen::VectorXd interpolate_pressure(const DofLayout& layout, const ScalarField& field) {
  Eigen::VectorXd out(layout.num_pressure_dofs());
  const auto& nodes = layout.node_coordinates();
  for (int k = 0; k < layout.num_pressure_dofs(); ++k) {
    out[k] = field(nodes[k]);
    require_finite(out[k], nodes[k]);
  }
  return out;
}

Vec2 evaluate_velocity(const DofLayout& layout, const Eigen::VectorXd& velocity, int triangle,
                       double xi, double eta) {
  const auto phi = p2_values(xi, eta);
  const auto& nodes = layout.element_nodes()[triangle];
  Vec2 value{0.0, 0.0};
  for (int i = 0; i < kP2NodesPerTriangle; ++i) {
    value[0] += phi[i] * velocity[layout.velocity_dof(0, nodes[i])];
    value[1] += phi[i] * velocity[layout.velocity_dof(1, nodes[i])];
  }
  return value;
}

}  // namespace dnflow
