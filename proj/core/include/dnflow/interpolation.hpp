#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>

#include "dnflow/dof_layout.hpp"

namespace dnflow {

using Vec2 = std::array<double, 2>;
using VectorField = std::function<Vec2(const Point2&)>;
using ScalarField = std::function<double(const Point2&)>;

class InterpolationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Nodal P2 interpolant of a vector field (length num_velocity_dofs).
/// Throws InterpolationError on non-finite field values.
Eigen::VectorXd interpolate_velocity(const DofLayout& layout, const VectorField& field);

/// Nodal P1 interpolant on the mesh vertices (length num_pressure_dofs).
Eigen::VectorXd interpolate_pressure(const DofLayout& layout, const ScalarField& field);

/// Value of a P2 velocity field inside `triangle` at reference point (xi, eta).
Vec2 evaluate_velocity(const DofLayout& layout, const Eigen::VectorXd& velocity, int triangle,
                       double xi, double eta);

}  // namespace dnflow
