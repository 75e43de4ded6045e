#include "dnflow/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dnflow {

namespace {

template <unsigned N>
LineRule gauss_on_unit_interval() {
  using Gauss = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  LineRule rule;
  rule.degree = 2 * static_cast<int>(N) - 1;
  // Boost stores the non-negative half of the symmetric rule on [-1, 1].
  for (std::size_t k = abscissa.size(); k-- > 0;) {
    if (abscissa[k] == 0.0) continue;
    rule.points.push_back(0.5 * (1.0 - abscissa[k]));
    rule.weights.push_back(0.5 * weights[k]);
  }
  for (std::size_t k = 0; k < abscissa.size(); ++k) {
    rule.points.push_back(0.5 * (1.0 + abscissa[k]));
    rule.weights.push_back(0.5 * weights[k]);
  }
  return rule;
}

TriangleRule radon_degree5() {
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 - s15) / 21.0;
  const double b1 = 1.0 - 2.0 * a1;
  const double a2 = (6.0 + s15) / 21.0;
  const double b2 = 1.0 - 2.0 * a2;
  const double w0 = 9.0 / 80.0;
  const double w1 = (155.0 - s15) / 2400.0;
  const double w2 = (155.0 + s15) / 2400.0;
  TriangleRule rule;
  rule.degree = 5;
  rule.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                 {b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1},
                 {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}};
  rule.weights = {w0, w1, w1, w1, w2, w2, w2};
  return rule;
}

// Duffy collapse of the unit square: (u, v) -> (xi, eta) = (u, v (1 - u)).
// A degree-p integrand becomes degree p + 1 in u and p in v, so five Gauss
// points per direction integrate total degree 8 exactly.
TriangleRule collapsed_degree8() {
  const LineRule g = gauss_on_unit_interval<5>();
  TriangleRule rule;
  rule.degree = 8;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double xi = g.points[i];
      const double eta = g.points[j] * (1.0 - xi);
      rule.points.push_back({1.0 - xi - eta, xi, eta});
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - xi));
    }
  }
  return rule;
}

}  // namespace

TriangleRule triangle_rule(int degree) {
  if (degree < 0 || degree > 8) {
    throw std::invalid_argument("no triangle rule of degree " + std::to_string(degree));
  }
  return degree <= 5 ? radon_degree5() : collapsed_degree8();
}

LineRule line_rule(int degree) {
  switch ((std::max(degree, 0) + 2) / 2) {
    case 1: return gauss_on_unit_interval<1>();
    case 2: return gauss_on_unit_interval<2>();
    case 3: return gauss_on_unit_interval<3>();
    case 4: return gauss_on_unit_interval<4>();
    case 5: return gauss_on_unit_interval<5>();
    default:
      throw std::invalid_argument("no line rule of degree " + std::to_string(degree));
  }
}

}  // namespace dnflow
