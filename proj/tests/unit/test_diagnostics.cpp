#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "mconv/diagnostics.hpp"
#include "mconv/errors.hpp"

using namespace mconv;

namespace {

std::shared_ptr<const Mesh> gresho_mesh(int n) {
  return std::make_shared<const Mesh>(generate_uniform(DomainSpec::gresho(n)));
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mconv_" + name)).string();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// smooth, compactly supported swirl inside r < 0.4
double swirl_speed(double r) { return r < 0.4 ? r * (0.16 - r * r) * (0.16 - r * r) : 0.0; }

}  // namespace

TEST(Conserved, ZeroField) {
  const auto v = build_space(gresho_mesh(4), ElementKind::VectorP2);
  const DiagnosticsRecord r = conserved_quantities(Field(v));
  for (double q : {r.kinetic_energy, r.momentum_x, r.momentum_y, r.angular_momentum, r.enstrophy, r.total_vorticity,
                   r.div_l2})
    EXPECT_EQ(q, 0.0);
}

TEST(Conserved, UniformFlowOnCenteredSquare) {
  const auto v = build_space(gresho_mesh(6), ElementKind::VectorP2Bubble);
  const Field u = interpolate(v, VectorFunction([](double, double) { return Vec2{1.0, 0.0}; }));
  const DiagnosticsRecord r = conserved_quantities(u);
  EXPECT_NEAR(r.momentum_x, 1.0, 1e-14);
  EXPECT_NEAR(r.momentum_y, 0.0, 1e-14);
  EXPECT_NEAR(r.momentum_sum, 1.0, 1e-14);
  EXPECT_NEAR(r.kinetic_energy, 0.5, 1e-14);
  EXPECT_NEAR(r.angular_momentum, 0.0, 1e-14);
  EXPECT_NEAR(r.enstrophy, 0.0, 1e-14);
}

TEST(Conserved, LatticeEnergy) {
  const auto m = std::make_shared<const Mesh>(generate_uniform(DomainSpec::unit_square(64, 64)));
  const auto v = build_space(m, ElementKind::VectorP2);
  const Field u = interpolate(v, VectorFunction([](double x, double y) {
    return Vec2{std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y), std::cos(2 * M_PI * x) * std::cos(2 * M_PI * y)};
  }));
  EXPECT_NEAR(conserved_quantities(u).kinetic_energy, 0.25, 1e-3);
}

TEST(Conserved, VorticityFieldIsUsedWhenGiven) {
  const auto m = gresho_mesh(4);
  const auto v = build_space(m, ElementKind::VectorP2);
  const auto w = build_space(m, ElementKind::ScalarP2);
  const Field u = interpolate(v, VectorFunction([](double x, double y) { return Vec2{-y, x}; }));
  // curl of the rotation is 2 everywhere
  EXPECT_NEAR(conserved_quantities(u).total_vorticity, 2.0, 1e-13);
  const Field w3 = interpolate(w, ScalarFunction([](double, double) { return 3.0; }));
  const DiagnosticsRecord r = conserved_quantities(u, &w3);
  EXPECT_NEAR(r.total_vorticity, 3.0, 1e-13);
  EXPECT_NEAR(r.enstrophy, 4.5, 1e-13);
  EXPECT_THROW(conserved_quantities(w3), KindMismatch);
}

TEST(Conserved, InvariantUnderVertexRenumbering) {
  const Mesh base = generate_uniform(DomainSpec::gresho(8));
  std::vector<int> perm(base.num_vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(7));
  const auto m1 = std::make_shared<const Mesh>(base);
  const auto m2 = std::make_shared<const Mesh>(renumber_vertices(base, perm));
  VectorFunction f = [](double x, double y) { return Vec2{std::sin(3 * x + y), x * y - std::cos(2 * y)}; };
  const DiagnosticsRecord a = conserved_quantities(interpolate(build_space(m1, ElementKind::VectorP2), f));
  const DiagnosticsRecord b = conserved_quantities(interpolate(build_space(m2, ElementKind::VectorP2), f));
  EXPECT_NEAR(a.kinetic_energy, b.kinetic_energy, 1e-13);
  EXPECT_NEAR(a.momentum_x, b.momentum_x, 1e-13);
  EXPECT_NEAR(a.momentum_y, b.momentum_y, 1e-13);
  EXPECT_NEAR(a.angular_momentum, b.angular_momentum, 1e-13);
  EXPECT_NEAR(a.enstrophy, b.enstrophy, 1e-13);
  EXPECT_NEAR(a.total_vorticity, b.total_vorticity, 1e-13);
  EXPECT_NEAR(a.div_l2, b.div_l2, 1e-13);
}

TEST(Conserved, AngularMomentumMatchesRadialOracle) {
  // about the origin: int (u1 y - u2 x) = -2 pi int_0^R r^2 s(r) dr
  const auto& gl = gauss_legendre(5);
  double radial = 0.0;
  const int pieces = 400;
  for (int k = 0; k < pieces; ++k) {
    const double a = 0.4 * k / pieces, b = 0.4 * (k + 1) / pieces;
    for (std::size_t q = 0; q < gl.weights.size(); ++q) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * gl.points[q];
      radial += 0.5 * (b - a) * gl.weights[q] * r * r * swirl_speed(r);
    }
  }
  const double oracle = -2.0 * M_PI * radial;
  const auto v = build_space(gresho_mesh(32), ElementKind::VectorP2);
  const Field u = interpolate(v, VectorFunction([](double x, double y) {
    const double r = std::hypot(x, y);
    const double s = r > 0.0 ? swirl_speed(r) / r : 0.0;
    return Vec2{-s * y, s * x};
  }));
  EXPECT_NEAR(conserved_quantities(u).angular_momentum, oracle, 1e-6);
}

TEST(L2Error, AgainstZeroIsTheNorm) {
  const auto v = build_space(gresho_mesh(5), ElementKind::VectorP2);
  const Field u = interpolate(v, VectorFunction([](double x, double y) { return Vec2{x * x, y - x}; }));
  EXPECT_NEAR(l2_error(u, [](double, double) { return Vec2{0.0, 0.0}; }), norms(u).l2, 1e-15);
}

TEST(L2Error, InterpolationErrorIsThirdOrder) {
  VectorFunction f = [](double x, double y) { return Vec2{std::sin(M_PI * x) * std::cos(y), std::exp(x * y)}; };
  std::vector<double> e;
  for (int n : {8, 16, 32}) {
    const auto m = std::make_shared<const Mesh>(generate_uniform(DomainSpec::unit_square(n, n)));
    e.push_back(l2_error(interpolate(build_space(m, ElementKind::VectorP2), f), f));
  }
  EXPECT_GE(std::log2(e[1] / e[2]), 2.8);
}

TEST(L2Error, GreshoInterpolant) {
  VectorFunction g = [](double x, double y) {
    const double r = std::hypot(x, y);
    const double s = r <= 0.2 ? 5.0 : (r <= 0.4 ? (2.0 - 5.0 * r) / r : 0.0);
    return Vec2{-s * y, s * x};
  };
  const Field u = interpolate(build_space(gresho_mesh(48), ElementKind::VectorP2), g);
  EXPECT_LT(l2_error(u, g), 0.05 * norms(u).l2);
}

TEST(Csv, EmptyIsHeaderOnly) {
  const std::string p = temp_path("empty.csv");
  write_csv({}, p);
  const auto lines = read_lines(p);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].rfind("step,time,kinetic_energy", 0), 0u);
}

TEST(Csv, TwoRecordsThreeLinesAndBitwiseRoundTrip) {
  DiagnosticsRecord a, b;
  a.step = 1;
  a.time = 0.1;
  a.kinetic_energy = 1.0 / 3.0;
  a.momentum_x = -0.0;
  a.angular_momentum = 4.9e-324;  // smallest subnormal
  a.l2_error = std::numeric_limits<double>::quiet_NaN();
  b.step = 2;
  b.time = 0.2;
  b.enstrophy = 1e300;
  b.div_rec_max = 2.2250738585072014e-308;
  b.solver_residual = M_PI;
  const std::string p = temp_path("two.csv");
  write_csv({a, b}, p);
  EXPECT_EQ(read_lines(p).size(), 3u);
  const auto back = read_csv(p);
  ASSERT_EQ(back.size(), 2u);
  const DiagnosticsRecord* orig[] = {&a, &b};
  for (int i = 0; i < 2; ++i) {
    const DiagnosticsRecord& x = *orig[i];
    const DiagnosticsRecord& y = back[i];
    EXPECT_EQ(x.step, y.step);
    const double xs[] = {x.time, x.kinetic_energy, x.momentum_x, x.momentum_y, x.momentum_sum, x.angular_momentum,
                         x.enstrophy, x.total_vorticity, x.div_l2, x.div_rec_max, x.solver_residual};
    const double ys[] = {y.time, y.kinetic_energy, y.momentum_x, y.momentum_y, y.momentum_sum, y.angular_momentum,
                         y.enstrophy, y.total_vorticity, y.div_l2, y.div_rec_max, y.solver_residual};
    for (int k = 0; k < 11; ++k) EXPECT_TRUE(same_bits(xs[k], ys[k])) << "record " << i << " column " << k;
  }
  EXPECT_TRUE(std::isnan(back[0].l2_error));
}

TEST(Csv, BlowupMarkerIsACommentLine) {
  DiagnosticsRecord a;
  a.step = 1;
  const std::string p = temp_path("blowup.csv");
  write_csv({a}, p, BlowupMarker{2, 0.02});
  const auto lines = read_lines(p);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[2], "# blowup at step 2 t=0.02");
  EXPECT_EQ(read_csv(p).size(), 1u);
}

TEST(Csv, UnwritablePathThrows) {
  EXPECT_THROW(write_csv({}, "/nonexistent-dir/x.csv"), std::runtime_error);
}

TEST(Vtk, ConstantFieldAndCounts) {
  const auto m = gresho_mesh(4);
  const auto v = build_space(m, ElementKind::VectorP2Bubble);
  const auto p = build_space(m, ElementKind::ScalarP1Disc);
  const Field u = interpolate(v, VectorFunction([](double, double) { return Vec2{3.0, 4.0}; }));
  const Field q = interpolate(p, ScalarFunction([](double x, double) { return x; }));
  const std::string path = temp_path("c.vtk");
  export_vtk(u, q, path);
  const auto lines = read_lines(path);
  ASSERT_GE(lines.size(), 5u);
  EXPECT_EQ(lines[0], "# vtk DataFile Version 3.0");
  EXPECT_EQ(lines[3], "DATASET UNSTRUCTURED_GRID");
  EXPECT_EQ(lines[4], "POINTS " + std::to_string(m->num_vertices()) + " double");
  // speed block: every value is 5
  std::size_t k = 0;
  while (k < lines.size() && lines[k] != "SCALARS speed double 1") ++k;
  ASSERT_LT(k + 1 + m->num_vertices(), lines.size());
  for (int i = 0; i < m->num_vertices(); ++i) EXPECT_NEAR(std::stod(lines[k + 2 + i]), 5.0, 1e-14);
  int cells = 0;
  for (const auto& l : lines)
    if (l.rfind("CELLS ", 0) == 0) cells = std::stoi(l.substr(6));
  EXPECT_EQ(cells, m->num_cells());
}
