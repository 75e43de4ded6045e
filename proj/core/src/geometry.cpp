#include "dnflow/geometry.hpp"

#include <cmath>
#include <sstream>

namespace dnflow {

ChannelGeometry::ChannelGeometry(double inlet_half_width, double outlet_half_width,
                                 double length)
    : r_(inlet_half_width), big_r_(outlet_half_width), length_(length) {
  if (!(r_ > 0.0) || !(big_r_ > 0.0) || !(length_ > 0.0) || !std::isfinite(r_) ||
      !std::isfinite(big_r_) || !std::isfinite(length_)) {
    std::ostringstream msg;
    msg << "channel geometry requires r, R, L > 0 (got r=" << r_ << ", R=" << big_r_
        << ", L=" << length_ << ")";
    throw GeometryError(msg.str());
  }
  constexpr int kSamples = 2000;
  for (int k = 0; k <= kSamples; ++k) {
    const double s = length_ * k / kSamples;
    if (!(half_width(s) > 0.0)) {
      std::ostringstream msg;
      msg << "channel half-width is not positive at x1=" << s;
      throw GeometryError(msg.str());
    }
  }
}

double ChannelGeometry::half_width(double s) const {
  const double l2 = length_ * length_;
  const double a = 2.0 * (r_ - big_r_) / (l2 * length_);
  const double b = 3.0 * (big_r_ - r_) / l2;
  return (a * s + b) * s * s + r_;
}

double ChannelGeometry::half_width_slope(double s) const {
  const double l2 = length_ * length_;
  const double a = 2.0 * (r_ - big_r_) / (l2 * length_);
  const double b = 3.0 * (big_r_ - r_) / l2;
  return (3.0 * a * s + 2.0 * b) * s;
}

double ChannelGeometry::half_width_curvature(double s) const {
  const double l2 = length_ * length_;
  const double a = 2.0 * (r_ - big_r_) / (l2 * length_);
  const double b = 3.0 * (big_r_ - r_) / l2;
  return 6.0 * a * s + 2.0 * b;
}

double ChannelGeometry::area() const { return (r_ + big_r_) * length_; }

}  // namespace dnflow
