#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace dnflow {

/// Uniform grid t_n = n T / N, n = 0..N.
class TimeGrid {
 public:
  TimeGrid(double final_time, int steps);

  double final_time() const { return final_time_; }
  int steps() const { return steps_; }
  double dt() const { return final_time_ / steps_; }
  double time(int n) const { return final_time_ * n / steps_; }

 private:
  double final_time_;
  int steps_;
};

/// Purely time-dependent boundary controls, piecewise constant and
/// left-continuous: value(i, n) acts on (t_{n-1}, t_n], n = 1..N, for open
/// segment i = 1..L.
class ControlVector {
 public:
  ControlVector() = default;
  ControlVector(int segments, int steps, double value = 0.0);
  /// Constant-in-time controls, one value per segment.
  static ControlVector constant(const std::vector<double>& per_segment, int steps);

  int segments() const { return segments_; }
  int steps() const { return steps_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int segment, int step) { return values_[index(segment, step)]; }
  double operator()(int segment, int step) const { return values_[index(segment, step)]; }

  /// Flat storage, segment-major.
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const;

  ControlVector& operator+=(const ControlVector& other);
  ControlVector& operator-=(const ControlVector& other);
  ControlVector& operator*=(double scale);
  friend ControlVector operator+(ControlVector a, const ControlVector& b) { return a += b; }
  friend ControlVector operator-(ControlVector a, const ControlVector& b) { return a -= b; }
  friend ControlVector operator*(double s, ControlVector a) { return a *= s; }

  /// Euclidean inner product over all entries.
  double dot(const ControlVector& other) const;
  double norm() const;

 private:
  std::size_t index(int segment, int step) const;
  void require_same_shape(const ControlVector& other) const;

  int segments_ = 0;
  int steps_ = 0;
  std::vector<double> values_;
};

/// Box constraints q_a[i] <= q_i(t) <= q_b[i]; infinite bounds allowed.
struct BoxBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  static BoxBounds unbounded(int segments);
  void validate(int segments) const;
};

/// Entrywise clamp max(min(q, q_b), q_a).
ControlVector project(const ControlVector& q, const BoxBounds& bounds);

}  // namespace dnflow
