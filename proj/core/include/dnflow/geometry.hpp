#pragma once

#include <stdexcept>
#include <string>

namespace dnflow {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Symmetric channel {0 <= x1 <= L, |x2| <= phi(x1)} whose half-width is the
/// cubic Hermite blend phi(s) = 2(r-R)/L^3 s^3 + 3(R-r)/L^2 s^2 + r, so that
/// phi(0) = r, phi(L) = R and phi'(0) = phi'(L) = 0.
class ChannelGeometry {
 public:
  ChannelGeometry(double inlet_half_width, double outlet_half_width, double length);

  double inlet_half_width() const { return r_; }
  double outlet_half_width() const { return big_r_; }
  double length() const { return length_; }
  bool is_straight() const { return r_ == big_r_; }

  double half_width(double s) const;
  double half_width_slope(double s) const;
  double half_width_curvature(double s) const;

  /// Exact area 2 * int_0^L phi(s) ds.
  double area() const;

 private:
  double r_;
  double big_r_;
  double length_;
};

}  // namespace dnflow
