#include "mconv/assembly.hpp"

#include "mconv/errors.hpp"

namespace mconv {

std::string to_string(ConvectiveForm form) {
  switch (form) {
    case ConvectiveForm::CONV: return "conv";
    case ConvectiveForm::SKEW: return "skew";
    case ConvectiveForm::EMAC_LIN: return "emac";
    case ConvectiveForm::MOD_CONV: return "modconv";
  }
  return "?";
}

ConvectiveForm parse_form(const std::string& name) {
  if (name == "conv") return ConvectiveForm::CONV;
  if (name == "skew") return ConvectiveForm::SKEW;
  if (name == "emac") return ConvectiveForm::EMAC_LIN;
  if (name == "modconv") return ConvectiveForm::MOD_CONV;
  throw InvalidSpec("unknown convective form '" + name + "'");
}

bool compatible_pair(ElementKind v, ElementKind p) {
  return (v == ElementKind::VectorP2 && p == ElementKind::ScalarP1) ||
         (v == ElementKind::VectorP2Bubble && p == ElementKind::ScalarP1Disc) ||
         (v == ElementKind::VectorBernardiRaugel && p == ElementKind::ScalarP0);
}

namespace {

void require_same_mesh(const Space& a, const Space& b) {
  if (&a.mesh() != &b.mesh()) throw KindMismatch("spaces live on different meshes");
}

// Generic cell loop. kernel(test_basis, i, trial_basis, j, point_data) -> integrand.
template <class PointData, class Kernel>
SparseMatrix assemble_pair(const Space& test, const Space& trial, const QuadratureRule& rule, PointData&& point_data,
                           Kernel&& kernel) {
  require_same_mesh(test, trial);
  const Mesh& m = test.mesh();
  const int nt = test.local_count();
  const int nr = trial.local_count();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(m.num_cells()) * nt * nr);
  std::vector<double> local(static_cast<std::size_t>(nt) * nr);
  BasisValues bt, br;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q][0];
      const double eta = rule.points[q][1];
      test.eval(c, g, xi, eta, bt);
      const BasisValues* trial_values = &bt;
      if (&trial != &test) {
        trial.eval(c, g, xi, eta, br);
        trial_values = &br;
      }
      const auto pd = point_data(c, g, xi, eta);
      const double w = rule.weights[q] * g.det;
      for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nr; ++j) local[i * nr + j] += w * kernel(bt, i, *trial_values, j, pd);
    }
    const auto dt = test.cell_dofs(c);
    const auto dr = trial.cell_dofs(c);
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < nr; ++j) trip.push_back({dt[i], dr[j], local[i * nr + j]});
  }
  return assemble_finalize(test.num_dofs(), trial.num_dofs(), std::move(trip));
}

struct NoData {};
auto no_data = [](int, const CellGeometry&, double, double) { return NoData{}; };

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

}  // namespace

SparseMatrix assemble_mass(const Space& test, const Space& trial, const QuadratureRule& rule) {
  return assemble_pair(test, trial, rule, no_data, [](const BasisValues& t, int i, const BasisValues& r, int j, NoData) {
    return dot(t.value[i], r.value[j]);
  });
}

SparseMatrix assemble_mass(const Space& space, const QuadratureRule& rule) { return assemble_mass(space, space, rule); }

SparseMatrix assemble_stiffness(const Space& test, const Space& trial, const QuadratureRule& rule) {
  return assemble_pair(test, trial, rule, no_data, [](const BasisValues& t, int i, const BasisValues& r, int j, NoData) {
    return dot(t.grad[i][0], r.grad[j][0]) + dot(t.grad[i][1], r.grad[j][1]);
  });
}

SparseMatrix assemble_stiffness(const Space& space, const QuadratureRule& rule) {
  return assemble_stiffness(space, space, rule);
}

SparseMatrix assemble_div(const Space& velocity, const Space& pressure, const QuadratureRule& rule) {
  if (!compatible_pair(velocity.kind(), pressure.kind()))
    throw PairingError(to_string(velocity.kind()) + "/" + to_string(pressure.kind()) + " is not a supported pair");
  return assemble_pair(pressure, velocity, rule, no_data,
                       [](const BasisValues& t, int i, const BasisValues& r, int j, NoData) {
                         return t.value[i][0] * r.div(j);
                       });
}

SparseMatrix assemble_convection(ConvectiveForm form, const Field& a, const Space& trial, const Space& test,
                                 const QuadratureRule& rule) {
  if (trial.kind() != test.kind() || &trial.mesh() != &test.mesh())
    throw KindMismatch("convection needs identical trial and test spaces");
  if (!is_vector(trial.kind()) || is_hdiv(trial.kind())) throw KindMismatch("convection needs a velocity space");
  require_same_mesh(a.space(), trial);
  if (form == ConvectiveForm::MOD_CONV) {
    if (!is_hdiv(a.space().kind())) throw KindMismatch("modified convection needs an H(div) advecting field");
  } else if (a.space().kind() != trial.kind()) {
    throw KindMismatch(to_string(form) + " needs the advecting field in the velocity space");
  }
  auto at_point = [&a](int c, const CellGeometry& g, double xi, double eta) { return a.eval(c, g, xi, eta); };
  switch (form) {
    case ConvectiveForm::CONV:
    case ConvectiveForm::MOD_CONV:
      return assemble_pair(test, trial, rule, at_point,
                           [](const BasisValues& t, int i, const BasisValues& r, int j, const FieldValue& av) {
                             const auto& g = r.grad[j];
                             return t.value[i][0] * dot(av.value, g[0]) + t.value[i][1] * dot(av.value, g[1]);
                           });
    case ConvectiveForm::SKEW:
      return assemble_pair(test, trial, rule, at_point,
                           [](const BasisValues& t, int i, const BasisValues& r, int j, const FieldValue& av) {
                             const auto& g = r.grad[j];
                             return t.value[i][0] * dot(av.value, g[0]) + t.value[i][1] * dot(av.value, g[1]) +
                                    0.5 * av.div * dot(t.value[i], r.value[j]);
                           });
    case ConvectiveForm::EMAC_LIN:
      // c(a; v, w) = ((w . grad) v, a) - ((v . grad) w, a): skew in (v, w) by
      // construction; at a = v it is the weak EMAC term 2D(u)u + (div u)u.
      return assemble_pair(test, trial, rule, at_point,
                           [](const BasisValues& t, int i, const BasisValues& r, int j, const FieldValue& av) {
                             const auto& w = t.value[i];
                             const auto& v = r.value[j];
                             double s = 0.0;
                             for (int c = 0; c < 2; ++c) s += av.value[c] * (dot(w, r.grad[j][c]) - dot(v, t.grad[i][c]));
                             return s;
                           });
  }
  throw InvalidSpec("unknown convective form");
}

SparseMatrix assemble_vorticity_operator(const Field& a, const Space& w_space, const QuadratureRule& rule) {
  if (!is_hdiv(a.space().kind())) throw KindMismatch("vorticity transport needs an H(div) advecting field");
  if (w_space.kind() != ElementKind::ScalarP2) throw KindMismatch("vorticity lives in ScalarP2");
  require_same_mesh(a.space(), w_space);
  return assemble_pair(
      w_space, w_space, rule, [&a](int c, const CellGeometry& g, double xi, double eta) { return a.eval(c, g, xi, eta); },
      [](const BasisValues& t, int i, const BasisValues& r, int j, const FieldValue& av) {
        return t.value[i][0] * dot(av.value, r.grad[j][0]);
      });
}

std::vector<double> assemble_load(const Space& space, const CellFunction& f, const QuadratureRule& rule) {
  const Mesh& m = space.mesh();
  std::vector<double> b(space.num_dofs(), 0.0);
  BasisValues bv;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    const auto dofs = space.cell_dofs(c);
    for (int q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q][0];
      const double eta = rule.points[q][1];
      const Vec2 fv = f(c, xi, eta, g.map(xi, eta));
      space.eval(c, g, xi, eta, bv);
      const double w = rule.weights[q] * g.det;
      for (int i = 0; i < bv.n; ++i) b[dofs[i]] += w * dot(fv, bv.value[i]);
    }
  }
  return b;
}

std::vector<double> assemble_curl_load(const Field& u, const Space& scalar_space, const QuadratureRule& rule) {
  require_same_mesh(u.space(), scalar_space);
  if (is_vector(scalar_space.kind())) throw KindMismatch("curl load needs a scalar space");
  return assemble_load(
      scalar_space,
      [&u, &m = u.space().mesh()](int c, double xi, double eta, const Vec2&) {
        const FieldValue v = u.eval(c, cell_geometry(m, c), xi, eta);
        return Vec2{v.grad[1][0] - v.grad[0][1], 0.0};
      },
      rule);
}

std::vector<double> basis_integrals(const Space& space, const QuadratureRule& rule) {
  if (is_vector(space.kind())) throw KindMismatch("basis integrals need a scalar space");
  return assemble_load(space, [](int, double, double, const Vec2&) { return Vec2{1.0, 0.0}; }, rule);
}

}  // namespace mconv
