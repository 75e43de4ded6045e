#include "dnflow/fields.hpp"

#include <algorithm>

namespace dnflow {

VectorField make_w_field(const ChannelGeometry& geometry) {
  return [geometry](const Point2& p) -> Vec2 {
    const double phi = geometry.half_width(p.x);
    const double slope = geometry.half_width_slope(p.x);
    return {1.0 / phi, p.y * slope / (phi * phi)};
  };
}

VectorField make_poiseuille_field(const ChannelGeometry& geometry, double pressure_drop) {
  if (!geometry.is_straight()) {
    throw GeometryError("the Poiseuille profile needs a straight channel (r == R)");
  }
  const double r = geometry.inlet_half_width();
  const double c = pressure_drop / (2.0 * geometry.length());
  return [r, c](const Point2& p) -> Vec2 { return {c * (r * r - p.y * p.y), 0.0}; };
}

double zeta_profile(double t) {
  const double s = std::min(t, 0.82);
  return 5.0 * (1.0 / (0.9 - s) - 1.0 / 0.9) + 15.0 * s;
}

}  // namespace dnflow
