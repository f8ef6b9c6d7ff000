#include "mconv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mconv/errors.hpp"

namespace mconv {

namespace {

const ConstraintMasks kWalls{tag_bit(BoundaryTag::wall), 0, tag_bit(BoundaryTag::wall)};

double sup_norm(const Field& f) {
  const Mesh& m = f.space().mesh();
  const auto& r = triangle_rule();
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    for (int q = 0; q < r.size(); ++q) {
      const Vec2 v = f.eval(c, g, r.points[q][0], r.points[q][1]).value;
      s = std::max(s, std::hypot(v[0], v[1]));
    }
  }
  return s;
}

double interior_skew_defect(const SparseMatrix& n, const Space& s) {
  std::vector<char> interior(s.num_dofs(), 1);
  for (int d : s.boundary_dofs(0xff, false)) interior[d] = 0;
  const SparseMatrix t = n.transpose();
  double m = 0.0;
  for (int r = 0; r < n.rows(); ++r) {
    if (!interior[r]) continue;
    for (int k = n.row_ptr()[r]; k < n.row_ptr()[r + 1]; ++k) {
      const int c = n.col_idx()[k];
      if (interior[c]) m = std::max(m, std::abs(n.values()[k] + t.at(r, c)));
    }
  }
  return m;
}

}  // namespace

std::vector<ReconstructionSample> reconstruction_samples(std::shared_ptr<const Mesh> mesh, ElementPair pair,
                                                         std::uint64_t seed, int count, const QuadratureRule& rule) {
  const auto v = build_space(mesh, velocity_kind(pair));
  const auto p = build_space(mesh, pressure_kind(pair));
  Reconstructor rec(v, {pair, ProjectionFlavor::L2}, kWalls);
  std::vector<ReconstructionSample> out;
  for (int k = 0; k < count; ++k) {
    const Field u = random_discrete_divfree(v, p, seed * 1000003u + static_cast<std::uint64_t>(k));
    const Field a = rec.reconstruct(u);
    const SparseMatrix n = assemble_convection(ConvectiveForm::MOD_CONV, a, *v, *v, rule);
    const Norms nu = norms(u);
    ReconstructionSample s;
    s.skew = interior_skew_defect(n, *v) / std::max(1.0, sup_norm(a));
    s.divergence = max_pointwise_divergence(a) / std::sqrt(nu.l2 * nu.l2 + nu.h1_semi * nu.h1_semi);
    s.stability = norms(a).l2 / nu.l2;
    out.push_back(s);
  }
  return out;
}

double max_relative_energy_drift(const RunResult& r) {
  const double e0 = r.initial.kinetic_energy;
  double d = 0.0;
  for (const auto& rec : r.records) d = std::max(d, std::abs(rec.kinetic_energy - e0) / e0);
  return d;
}

FinalErrors final_errors(const RunResult& r, const SchemeConfig& cfg) {
  if (!cfg.exact) throw InvalidSpec("no exact solution to compare against");
  const Field& u = r.final_state.u;
  const double t = r.final_state.time;
  const Mesh& m = u.space().mesh();
  const auto& rule = triangle_rule();
  // exact gradient by central differences; its error (~1e-10) is far below
  // the discretisation errors measured with it
  const double h = 1e-6;
  double l2 = 0.0, h1 = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = g.map(rule.points[q][0], rule.points[q][1]);
      const FieldValue v = u.eval(c, g, rule.points[q][0], rule.points[q][1]);
      const Vec2 e = cfg.exact(x[0], x[1], t);
      const Vec2 exp = cfg.exact(x[0] + h, x[1], t), exm = cfg.exact(x[0] - h, x[1], t);
      const Vec2 eyp = cfg.exact(x[0], x[1] + h, t), eym = cfg.exact(x[0], x[1] - h, t);
      const double w = rule.weights[q] * g.det;
      for (int k = 0; k < 2; ++k) {
        l2 += w * (v.value[k] - e[k]) * (v.value[k] - e[k]);
        const double gx = (exp[k] - exm[k]) / (2 * h), gy = (eyp[k] - eym[k]) / (2 * h);
        h1 += w * ((v.grad[k][0] - gx) * (v.grad[k][0] - gx) + (v.grad[k][1] - gy) * (v.grad[k][1] - gy));
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

namespace {

CheckResult at_most(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

CheckResult at_least(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value >= threshold, value, threshold, std::move(detail)};
}

}  // namespace

std::vector<CheckResult> run_property_suite(const VerifyOptions& o) {
  std::vector<CheckResult> out;
  const QuadratureRule& rule = triangle_rule(o.quad_degree);
  const auto g8 = std::make_shared<const Mesh>(generate_uniform(DomainSpec::gresho(8)));
  for (ElementPair pair : {ElementPair::P2BubbleP1Disc, ElementPair::TaylorHood}) {
    double skew = 0.0, div = 0.0, stab = 0.0;
    for (const auto& s : reconstruction_samples(g8, pair, o.seed, o.samples, rule)) {
      skew = std::max(skew, s.skew);
      div = std::max(div, s.divergence);
      stab = std::max(stab, s.stability);
    }
    const std::string tag = " [" + to_string(pair) + "]";
    out.push_back(at_most("skew-symmetry of modconv" + tag, skew, 1e-12));
    out.push_back(at_most("pointwise divergence of reconstruction" + tag, div, 1e-12));
    out.push_back(at_most("reconstruction stability" + tag, stab, 2.0));
  }

  {
    // inviscid energy conservation
    RunConfig rc;
    rc.nx = 12;
    rc.t_end = 0.1;
    const BenchmarkCase c = case_gresho(rc);
    const RunResult r = run(build_mesh(c), c.scheme);
    out.push_back(at_most("energy conservation, gresho modconv", max_relative_energy_drift(r), 1e-9,
                          std::to_string(r.records.size()) + " steps"));
  }
  {
    // viscous energy identity |u1|^2 - |u0|^2 = -2 dt nu |grad u_half|^2
    RunConfig rc;
    rc.nx = 8;
    rc.nu = 0.01;
    rc.t_end = 0.05;
    const BenchmarkCase c = case_gresho(rc);
    Simulation sim(build_mesh(c), c.scheme);
    const SparseMatrix mass = assemble_mass(*sim.velocity_space());
    const SparseMatrix stiff = assemble_stiffness(*sim.velocity_space());
    State s = sim.initial_state();
    double worst = 0.0;
    for (int k = 0; k < c.scheme.num_steps(); ++k) {
      const State n = sim.step(s);
      std::vector<double> half(n.u.size());
      for (int i = 0; i < n.u.size(); ++i) half[i] = 0.5 * (n.u.coeffs()[i] + s.u.coeffs()[i]);
      const double lhs = mass.dot(n.u.coeffs(), n.u.coeffs()) - mass.dot(s.u.coeffs(), s.u.coeffs());
      const double rhs = -2.0 * c.scheme.dt * c.scheme.nu * stiff.dot(half, half);
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
      s = n;
    }
    out.push_back(at_most("viscous energy identity", worst, 1e-9));
  }
  {
    // spatial convergence slope on the manufactured solution
    std::vector<double> err;
    for (int n : {4, 8, 16}) {
      RunConfig rc;
      rc.nx = n;
      rc.dt = 1e-3;
      rc.t_end = 5e-3;
      const BenchmarkCase c = case_mms(rc);
      err.push_back(final_errors(run(build_mesh(c), c.scheme), c.scheme).l2);
    }
    out.push_back(at_least("mms L2 velocity order (p2b, modconv)", std::log2(err[1] / err[2]), 2.5));
  }
  return out;
}

std::string format_check(const CheckResult& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-4s %-48s value %-12.4g limit %-10.3g %s", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.value, c.threshold, c.detail.c_str());
  return buf;
}

}  // namespace mconv
