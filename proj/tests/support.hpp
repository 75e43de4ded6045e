#pragma once

#include <cmath>
#include <memory>

#include "dnflow/fields.hpp"
#include "dnflow/interpolation.hpp"
#include "dnflow/mesh.hpp"
#include "dnflow/state.hpp"

namespace dnflow::test {

inline ChannelGeometry default_channel() { return ChannelGeometry(1.0, 2.0, 2.0); }

inline std::unique_ptr<FlowProblem> channel_problem(int nx, int ny, int steps,
                                                    StateOptions options = {},
                                                    AssemblyOptions assembly = {},
                                                    ChannelGeometry geometry = default_channel()) {
  return std::make_unique<FlowProblem>(generate_channel_mesh(geometry, nx, ny),
                                       TimeGrid(1.0, steps), options, assembly);
}

inline Eigen::VectorXd w_interpolant(const FlowProblem& problem, double scale,
                                     ChannelGeometry geometry = default_channel()) {
  const VectorField w = make_w_field(geometry);
  return interpolate_velocity(problem.layout(), [&](const Point2& p) {
    const Vec2 v = w(p);
    return Vec2{scale * v[0], scale * v[1]};
  });
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace dnflow::test
