#include "dnflow/control.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dnflow {

TimeGrid::TimeGrid(double final_time, int steps) : final_time_(final_time), steps_(steps) {
  if (!(final_time > 0.0) || !std::isfinite(final_time)) {
    throw std::invalid_argument("final time must be positive");
  }
  if (steps < 1) throw std::invalid_argument("number of time steps must be >= 1");
}

ControlVector::ControlVector(int segments, int steps, double value)
    : segments_(segments), steps_(steps) {
  if (segments < 0 || steps < 0) throw std::invalid_argument("negative control dimensions");
  values_.assign(static_cast<std::size_t>(segments) * steps, value);
}

ControlVector ControlVector::constant(const std::vector<double>& per_segment, int steps) {
  ControlVector q(static_cast<int>(per_segment.size()), steps);
  for (int i = 1; i <= q.segments(); ++i) {
    for (int n = 1; n <= steps; ++n) q(i, n) = per_segment[i - 1];
  }
  return q;
}

std::size_t ControlVector::index(int segment, int step) const {
  if (segment < 1 || segment > segments_ || step < 1 || step > steps_) {
    throw std::out_of_range("control index (" + std::to_string(segment) + ", " +
                            std::to_string(step) + ") out of range");
  }
  return static_cast<std::size_t>(segment - 1) * steps_ + (step - 1);
}

bool ControlVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void ControlVector::require_same_shape(const ControlVector& other) const {
  if (segments_ != other.segments_ || steps_ != other.steps_) {
    throw std::invalid_argument("control vectors have different shapes");
  }
}

ControlVector& ControlVector::operator+=(const ControlVector& other) {
  require_same_shape(other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ControlVector& ControlVector::operator-=(const ControlVector& other) {
  require_same_shape(other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ControlVector& ControlVector::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

double ControlVector::dot(const ControlVector& other) const {
  require_same_shape(other);
  return std::inner_product(values_.begin(), values_.end(), other.values_.begin(), 0.0);
}

double ControlVector::norm() const { return std::sqrt(dot(*this)); }

BoxBounds BoxBounds::unbounded(int segments) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {std::vector<double>(segments, -inf), std::vector<double>(segments, inf)};
}

void BoxBounds::validate(int segments) const {
  if (static_cast<int>(lower.size()) != segments || static_cast<int>(upper.size()) != segments) {
    throw std::invalid_argument("bounds must have one entry per open segment");
  }
  for (int i = 0; i < segments; ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || !(lower[i] < upper[i])) {
      throw std::invalid_argument("bounds require q_a < q_b for segment " + std::to_string(i + 1));
    }
  }
}

ControlVector project(const ControlVector& q, const BoxBounds& bounds) {
  bounds.validate(q.segments());
  ControlVector out = q;
  for (int i = 1; i <= q.segments(); ++i) {
    for (int n = 1; n <= q.steps(); ++n) {
      out(i, n) = std::max(std::min(q(i, n), bounds.upper[i - 1]), bounds.lower[i - 1]);
    }
  }
  return out;
}

}  // namespace dnflow
