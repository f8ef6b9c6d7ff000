#pragma once

#include <array>
#include <vector>

namespace mconv {

/// Rule on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 2>> points;  // (xi, eta)
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Symmetric triangle rules. Degree 8 (16 points) is the default everywhere;
/// degrees 1 and 2 exist for fault injection and cheap sanity checks.
const QuadratureRule& triangle_rule(int degree = 8);

/// Gauss-Legendre on [-1, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre, exact to degree 2n-1 (n in 1..5).
const LineRule& gauss_legendre(int n);

}  // namespace mconv
