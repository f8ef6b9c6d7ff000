#include "mconv/quadrature.hpp"

#include <cmath>

#include "mconv/errors.hpp"

namespace mconv {

namespace {

void add_centroid(QuadratureRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w);
}

// barycentric (a, a, 1-2a) and its rotations
void add_orbit3(QuadratureRule& r, double a, double w) {
  const double c = 1.0 - 2.0 * a;
  r.points.push_back({a, a});
  r.points.push_back({c, a});
  r.points.push_back({a, c});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

// barycentric (a, b, 1-a-b) and all permutations
void add_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const double p[6][2] = {{a, b}, {b, a}, {a, c}, {c, a}, {b, c}, {c, b}};
  for (const auto& q : p) {
    r.points.push_back({q[0], q[1]});
    r.weights.push_back(w);
  }
}

QuadratureRule make_degree1() {
  QuadratureRule r;
  r.degree = 1;
  add_centroid(r, 0.5);
  return r;
}

QuadratureRule make_degree2() {
  QuadratureRule r;
  r.degree = 2;
  add_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
  return r;
}

// Dunavant degree 8
QuadratureRule make_degree8() {
  QuadratureRule r;
  r.degree = 8;
  add_centroid(r, 0.14431560767778716825 * 0.5);
  add_orbit3(r, 0.17056930775176020662, 0.10321737053471825028 * 0.5);
  add_orbit3(r, 0.05054722831703097546, 0.03245849762319808031 * 0.5);
  add_orbit3(r, 0.45929258829272315603, 0.09509163426728462479 * 0.5);
  add_orbit6(r, 0.26311282963463811342, 0.72849239295540428124, 0.02723031417443499426 * 0.5);
  return r;
}

}  // namespace

const QuadratureRule& triangle_rule(int degree) {
  static const QuadratureRule d1 = make_degree1();
  static const QuadratureRule d2 = make_degree2();
  static const QuadratureRule d8 = make_degree8();
  switch (degree) {
    case 1: return d1;
    case 2: return d2;
    case 8: return d8;
    default: throw InvalidSpec("unsupported triangle quadrature degree " + std::to_string(degree));
  }
}

namespace {

LineRule make_gauss(int n) {
  LineRule r;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.points.push_back(x);
    r.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return r;
}

}  // namespace

const LineRule& gauss_legendre(int n) {
  static const LineRule rules[5] = {make_gauss(1), make_gauss(2), make_gauss(3), make_gauss(4), make_gauss(5)};
  if (n < 1 || n > 5) throw InvalidSpec("gauss_legendre supports 1..5 points");
  return rules[n - 1];
}

}  // namespace mconv
