#pragma once

#include <array>
#include <vector>

namespace dnflow {

/// Quadrature on the reference triangle {xi, eta >= 0, xi + eta <= 1}.
/// Points are barycentric (l0, l1, l2) with xi = l1, eta = l2; weights sum
/// to the reference area 1/2.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Smallest built-in rule exact for polynomials of total degree `degree`
/// (supported up to 8): the 7-point Radon rule through degree 5 and a
/// 25-point collapsed Gauss rule above.
TriangleRule triangle_rule(int degree);

/// Gauss-Legendre with ceil((degree + 1) / 2) points (supported up to 9).
LineRule line_rule(int degree);

}  // namespace dnflow
