#pragma once

#include <functional>

#include "dnflow/geometry.hpp"
#include "dnflow/interpolation.hpp"

namespace dnflow {

using SpaceTimeField = std::function<Vec2(double t, const Point2&)>;

/// Divergence-free channel field w = (1/phi(x1), x2 phi'(x1) / phi(x1)^2),
/// derived from the streamfunction x2 / phi(x1). It is tangent to the walls
/// and has flowrate 2 through every cross section.
VectorField make_w_field(const ChannelGeometry& geometry);

/// Steady Poiseuille velocity (dq / 2L) (r^2 - x2^2, 0) of a straight channel
/// driven by the pressure drop dq = q1 - q2. Throws GeometryError if r != R.
VectorField make_poiseuille_field(const ChannelGeometry& geometry, double pressure_drop);

/// Flowrate profile of the near-blowup target:
/// zeta(t) = 5 (1 / (0.9 - min(t, 0.82)) - 1 / 0.9) + 15 min(t, 0.82).
double zeta_profile(double t);

}  // namespace dnflow
