#include "mconv/spaces.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mconv/errors.hpp"

namespace mconv {

std::string to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::ScalarP1: return "ScalarP1";
    case ElementKind::ScalarP2: return "ScalarP2";
    case ElementKind::ScalarP1Disc: return "ScalarP1Disc";
    case ElementKind::ScalarP0: return "ScalarP0";
    case ElementKind::VectorP2: return "VectorP2";
    case ElementKind::VectorP2Bubble: return "VectorP2Bubble";
    case ElementKind::VectorBernardiRaugel: return "VectorBernardiRaugel";
    case ElementKind::HdivRT1: return "HdivRT1";
    case ElementKind::HdivBDM1: return "HdivBDM1";
  }
  return "?";
}

int local_dof_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::ScalarP1: return 3;
    case ElementKind::ScalarP2: return 6;
    case ElementKind::ScalarP1Disc: return 3;
    case ElementKind::ScalarP0: return 1;
    case ElementKind::VectorP2: return 12;
    case ElementKind::VectorP2Bubble: return 14;
    case ElementKind::VectorBernardiRaugel: return 9;
    case ElementKind::HdivRT1: return 8;
    case ElementKind::HdivBDM1: return 6;
  }
  return 0;
}

bool is_hdiv(ElementKind kind) { return kind == ElementKind::HdivRT1 || kind == ElementKind::HdivBDM1; }

bool is_vector(ElementKind kind) {
  return kind == ElementKind::VectorP2 || kind == ElementKind::VectorP2Bubble ||
         kind == ElementKind::VectorBernardiRaugel || is_hdiv(kind);
}

int num_components(ElementKind kind) { return is_vector(kind) ? 2 : 1; }

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  const auto& t = mesh.cell(cell);
  const Vec2& a = mesh.vertex(t[0]);
  const Vec2& b = mesh.vertex(t[1]);
  const Vec2& c = mesh.vertex(t[2]);
  CellGeometry g;
  g.origin = a;
  g.jac[0][0] = b[0] - a[0];
  g.jac[1][0] = b[1] - a[1];
  g.jac[0][1] = c[0] - a[0];
  g.jac[1][1] = c[1] - a[1];
  g.det = g.jac[0][0] * g.jac[1][1] - g.jac[0][1] * g.jac[1][0];
  const double id = 1.0 / g.det;
  g.inv[0][0] = g.jac[1][1] * id;
  g.inv[0][1] = -g.jac[0][1] * id;
  g.inv[1][0] = -g.jac[1][0] * id;
  g.inv[1][1] = g.jac[0][0] * id;
  g.grad_lambda[1] = {g.inv[0][0], g.inv[0][1]};
  g.grad_lambda[2] = {g.inv[1][0], g.inv[1][1]};
  g.grad_lambda[0] = {-g.grad_lambda[1][0] - g.grad_lambda[2][0], -g.grad_lambda[1][1] - g.grad_lambda[2][1]};
  return g;
}

namespace {

constexpr std::array<Vec2, 3> kRefVertex = {Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};

// Reference point of edge parameter s in [-1, 1], running from the lower to
// the higher global vertex of local edge l.
Vec2 edge_ref_point(const Mesh& mesh, int cell, int l, double s) {
  const int a = (l + 1) % 3;
  const int b = (l + 2) % 3;
  const bool forward = mesh.cell_edge_signs(cell)[l] > 0;
  const Vec2& lo = kRefVertex[forward ? a : b];
  const Vec2& hi = kRefVertex[forward ? b : a];
  const double wl = 0.5 * (1.0 - s);
  const double wh = 0.5 * (1.0 + s);
  return {wl * lo[0] + wh * hi[0], wl * lo[1] + wh * hi[1]};
}

// Scalar Lagrange tabulation; returns local count.
int scalar_lagrange(ElementKind kind, const CellGeometry& g, double xi, double eta, double* val, Vec2* grad) {
  const double l[3] = {1.0 - xi - eta, xi, eta};
  const auto& gl = g.grad_lambda;
  if (kind == ElementKind::ScalarP1 || kind == ElementKind::ScalarP1Disc) {
    for (int i = 0; i < 3; ++i) {
      val[i] = l[i];
      grad[i] = gl[i];
    }
    return 3;
  }
  for (int i = 0; i < 3; ++i) {
    val[i] = l[i] * (2.0 * l[i] - 1.0);
    const double f = 4.0 * l[i] - 1.0;
    grad[i] = {f * gl[i][0], f * gl[i][1]};
  }
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3;
    const int b = (i + 2) % 3;
    val[3 + i] = 4.0 * l[a] * l[b];
    grad[3 + i] = {4.0 * (l[a] * gl[b][0] + l[b] * gl[a][0]), 4.0 * (l[a] * gl[b][1] + l[b] * gl[a][1])};
  }
  if (kind == ElementKind::VectorP2Bubble) {
    val[6] = 27.0 * l[0] * l[1] * l[2];
    grad[6] = {27.0 * (l[1] * l[2] * gl[0][0] + l[0] * l[2] * gl[1][0] + l[0] * l[1] * gl[2][0]),
               27.0 * (l[1] * l[2] * gl[0][1] + l[0] * l[2] * gl[1][1] + l[0] * l[1] * gl[2][1])};
    return 7;
  }
  return 6;
}

// Piola-mapped spanning set of RT1 (8 functions) / BDM1 (first 6).
void hdiv_span(const CellGeometry& g, double xi, double eta, int n, Vec2* val, std::array<Vec2, 2>* grad) {
  // reference values and reference gradients d(psi_c)/d(xi_d)
  Vec2 rv[8];
  double rg[8][2][2] = {};
  rv[0] = {1.0, 0.0};
  rv[1] = {xi, 0.0};
  rg[1][0][0] = 1.0;
  rv[2] = {eta, 0.0};
  rg[2][0][1] = 1.0;
  rv[3] = {0.0, 1.0};
  rv[4] = {0.0, xi};
  rg[4][1][0] = 1.0;
  rv[5] = {0.0, eta};
  rg[5][1][1] = 1.0;
  if (n == 8) {
    rv[6] = {xi * xi, xi * eta};
    rg[6][0][0] = 2.0 * xi;
    rg[6][1][0] = eta;
    rg[6][1][1] = xi;
    rv[7] = {xi * eta, eta * eta};
    rg[7][0][0] = eta;
    rg[7][0][1] = xi;
    rg[7][1][1] = 2.0 * eta;
  }
  const double id = 1.0 / g.det;
  for (int j = 0; j < n; ++j) {
    for (int a = 0; a < 2; ++a) val[j][a] = id * (g.jac[a][0] * rv[j][0] + g.jac[a][1] * rv[j][1]);
    // grad = J * G_ref * Jinv / det
    double tmp[2][2];
    for (int c = 0; c < 2; ++c)
      for (int b = 0; b < 2; ++b) tmp[c][b] = rg[j][c][0] * g.inv[0][b] + rg[j][c][1] * g.inv[1][b];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) grad[j][a][b] = id * (g.jac[a][0] * tmp[0][b] + g.jac[a][1] * tmp[1][b]);
  }
}

// Degrees of freedom of an H(div) function given as a reference-point evaluator:
// per local edge the normal moments against {1, s}, scaled by 1/|e|, then (RT1)
// the cell means of both components.
template <class F>
void hdiv_dofs(const Mesh& mesh, int cell, int nloc, F&& f, double* out) {
  const auto& line = gauss_legendre(4);
  for (int l = 0; l < 3; ++l) {
    const int e = mesh.cell_edges(cell)[l];
    const Vec2 n = mesh.edge_normal(e);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t q = 0; q < line.points.size(); ++q) {
      const double s = line.points[q];
      const Vec2 r = edge_ref_point(mesh, cell, l, s);
      const Vec2 v = f(r[0], r[1]);
      const double vn = v[0] * n[0] + v[1] * n[1];
      m0 += line.weights[q] * vn;
      m1 += line.weights[q] * vn * s;
    }
    out[2 * l] = 0.5 * m0;
    out[2 * l + 1] = 0.5 * m1;
  }
  if (nloc == 8) {
    const auto& rule = triangle_rule();
    double mx = 0.0, my = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 v = f(rule.points[q][0], rule.points[q][1]);
      mx += rule.weights[q] * v[0];
      my += rule.weights[q] * v[1];
    }
    out[6] = 2.0 * mx;
    out[7] = 2.0 * my;
  }
}

}  // namespace

Space::Space(std::shared_ptr<const Mesh> mesh, ElementKind kind)
    : mesh_(std::move(mesh)), kind_(kind), nloc_(local_dof_count(kind)) {
  number_dofs();
  classify_boundary();
  if (is_hdiv(kind_)) build_hdiv_duals();
}

void Space::number_dofs() {
  const Mesh& m = *mesh_;
  const int nv = m.num_vertices();
  const int ne = m.num_edges();
  const int nt = m.num_cells();
  cell_dofs_.resize(static_cast<std::size_t>(nt) * nloc_);
  switch (kind_) {
    case ElementKind::ScalarP1: num_dofs_ = nv; break;
    case ElementKind::ScalarP2: num_dofs_ = nv + ne; break;
    case ElementKind::ScalarP1Disc: num_dofs_ = 3 * nt; break;
    case ElementKind::ScalarP0: num_dofs_ = nt; break;
    case ElementKind::VectorP2: num_dofs_ = 2 * (nv + ne); break;
    case ElementKind::VectorP2Bubble: num_dofs_ = 2 * (nv + ne + nt); break;
    case ElementKind::VectorBernardiRaugel: num_dofs_ = 2 * nv + ne; break;
    case ElementKind::HdivRT1: num_dofs_ = 2 * ne + 2 * nt; break;
    case ElementKind::HdivBDM1: num_dofs_ = 2 * ne; break;
  }
  for (int c = 0; c < nt; ++c) {
    int* d = cell_dofs_.data() + static_cast<std::size_t>(c) * nloc_;
    const auto& t = m.cell(c);
    const auto& ce = m.cell_edges(c);
    switch (kind_) {
      case ElementKind::ScalarP1:
        for (int i = 0; i < 3; ++i) d[i] = t[i];
        break;
      case ElementKind::ScalarP2:
        for (int i = 0; i < 3; ++i) {
          d[i] = t[i];
          d[3 + i] = nv + ce[i];
        }
        break;
      case ElementKind::ScalarP1Disc:
        for (int i = 0; i < 3; ++i) d[i] = 3 * c + i;
        break;
      case ElementKind::ScalarP0: d[0] = c; break;
      case ElementKind::VectorP2:
      case ElementKind::VectorP2Bubble: {
        const int ns = kind_ == ElementKind::VectorP2 ? nv + ne : nv + ne + nt;
        const int nl = nloc_ / 2;
        for (int comp = 0; comp < 2; ++comp) {
          int* dc = d + comp * nl;
          for (int i = 0; i < 3; ++i) {
            dc[i] = comp * ns + t[i];
            dc[3 + i] = comp * ns + nv + ce[i];
          }
          if (nl == 7) dc[6] = comp * ns + nv + ne + c;
        }
        break;
      }
      case ElementKind::VectorBernardiRaugel:
        for (int i = 0; i < 3; ++i) {
          d[i] = t[i];
          d[3 + i] = nv + t[i];
          d[6 + i] = 2 * nv + ce[i];
        }
        break;
      case ElementKind::HdivRT1:
      case ElementKind::HdivBDM1:
        for (int i = 0; i < 3; ++i) {
          d[2 * i] = 2 * ce[i];
          d[2 * i + 1] = 2 * ce[i] + 1;
        }
        if (nloc_ == 8) {
          d[6] = 2 * ne + 2 * c;
          d[7] = 2 * ne + 2 * c + 1;
        }
        break;
    }
  }
}

void Space::classify_boundary() {
  const Mesh& m = *mesh_;
  info_.assign(num_dofs_, DofInfo{});
  const int nv = m.num_vertices();
  const int ne = m.num_edges();
  const int nt = m.num_cells();
  // component of each dof
  if (kind_ == ElementKind::VectorP2 || kind_ == ElementKind::VectorP2Bubble) {
    const int ns = num_dofs_ / 2;
    for (int d = ns; d < num_dofs_; ++d) info_[d].component = 1;
  } else if (kind_ == ElementKind::VectorBernardiRaugel) {
    for (int d = nv; d < 2 * nv; ++d) info_[d].component = 1;
    for (int d = 2 * nv; d < num_dofs_; ++d) info_[d].component = -1;
  } else if (is_hdiv(kind_)) {
    for (auto& i : info_) i.component = -1;
  }
  (void)nt;
  for (int e = 0; e < ne; ++e) {
    if (!m.is_boundary_edge(e)) continue;
    const std::uint8_t bit = tag_bit(m.boundary_tag(e));
    const Vec2 n = m.edge_normal(e);
    const int normal_axis = std::abs(n[0]) > std::abs(n[1]) ? 0 : 1;
    const int a = m.edge(e)[0];
    const int b = m.edge(e)[1];
    auto mark = [&](int dof, bool normal) {
      info_[dof].tags |= bit;
      if (normal) info_[dof].normal_tags |= bit;
    };
    switch (kind_) {
      case ElementKind::ScalarP1:
        mark(a, false);
        mark(b, false);
        break;
      case ElementKind::ScalarP2:
        mark(a, false);
        mark(b, false);
        mark(nv + e, false);
        break;
      case ElementKind::VectorP2:
      case ElementKind::VectorP2Bubble: {
        const int ns = num_dofs_ / 2;
        for (int comp = 0; comp < 2; ++comp) {
          const bool normal = comp == normal_axis;
          mark(comp * ns + a, normal);
          mark(comp * ns + b, normal);
          mark(comp * ns + nv + e, normal);
        }
        break;
      }
      case ElementKind::VectorBernardiRaugel:
        for (int comp = 0; comp < 2; ++comp) {
          const bool normal = comp == normal_axis;
          mark(comp * nv + a, normal);
          mark(comp * nv + b, normal);
        }
        mark(2 * nv + e, true);
        break;
      case ElementKind::HdivRT1:
      case ElementKind::HdivBDM1:
        mark(2 * e, true);
        mark(2 * e + 1, true);
        break;
      case ElementKind::ScalarP1Disc:
      case ElementKind::ScalarP0: break;
    }
  }
}

void Space::build_hdiv_duals() {
  const Mesh& m = *mesh_;
  const int n = nloc_;
  hdiv_coeffs_.resize(m.num_cells());
  Eigen::MatrixXd dmat(n, n);
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    for (int j = 0; j < n; ++j) {
      auto psi = [&](double xi, double eta) {
        Vec2 val[8];
        std::array<Vec2, 2> grad[8];
        hdiv_span(g, xi, eta, n, val, grad);
        return val[j];
      };
      double col[8];
      hdiv_dofs(m, c, n, psi, col);
      for (int i = 0; i < n; ++i) dmat(i, j) = col[i];
    }
    const Eigen::MatrixXd inv = dmat.partialPivLu().inverse();
    auto& out = hdiv_coeffs_[c];
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out[j * n + k] = inv(j, k);
  }
}

std::vector<int> Space::boundary_dofs(std::uint8_t mask, bool normal_only) const {
  std::vector<int> out;
  for (int d = 0; d < num_dofs_; ++d) {
    const std::uint8_t t = normal_only ? info_[d].normal_tags : info_[d].tags;
    if (t & mask) out.push_back(d);
  }
  return out;
}

void Space::eval(int cell, const CellGeometry& g, double xi, double eta, BasisValues& out) const {
  out.n = nloc_;
  switch (kind_) {
    case ElementKind::ScalarP1:
    case ElementKind::ScalarP2:
    case ElementKind::ScalarP1Disc: {
      double v[7];
      Vec2 gr[7];
      const int n = scalar_lagrange(kind_, g, xi, eta, v, gr);
      for (int i = 0; i < n; ++i) {
        out.value[i] = {v[i], 0.0};
        out.grad[i] = {gr[i], Vec2{0.0, 0.0}};
      }
      break;
    }
    case ElementKind::ScalarP0:
      out.value[0] = {1.0, 0.0};
      out.grad[0] = {Vec2{0.0, 0.0}, Vec2{0.0, 0.0}};
      break;
    case ElementKind::VectorP2:
    case ElementKind::VectorP2Bubble: {
      double v[7];
      Vec2 gr[7];
      const int n = scalar_lagrange(kind_ == ElementKind::VectorP2 ? ElementKind::ScalarP2 : kind_, g, xi, eta, v, gr);
      for (int i = 0; i < n; ++i) {
        out.value[i] = {v[i], 0.0};
        out.grad[i] = {gr[i], Vec2{0.0, 0.0}};
        out.value[n + i] = {0.0, v[i]};
        out.grad[n + i] = {Vec2{0.0, 0.0}, gr[i]};
      }
      break;
    }
    case ElementKind::VectorBernardiRaugel: {
      const double l[3] = {1.0 - xi - eta, xi, eta};
      const auto& gl = g.grad_lambda;
      for (int i = 0; i < 3; ++i) {
        out.value[i] = {l[i], 0.0};
        out.grad[i] = {gl[i], Vec2{0.0, 0.0}};
        out.value[3 + i] = {0.0, l[i]};
        out.grad[3 + i] = {Vec2{0.0, 0.0}, gl[i]};
      }
      for (int i = 0; i < 3; ++i) {
        const int a = (i + 1) % 3;
        const int b = (i + 2) % 3;
        const Vec2 n = mesh_->edge_normal(mesh_->cell_edges(cell)[i]);
        const double bub = 4.0 * l[a] * l[b];
        const Vec2 gb = {4.0 * (l[a] * gl[b][0] + l[b] * gl[a][0]), 4.0 * (l[a] * gl[b][1] + l[b] * gl[a][1])};
        out.value[6 + i] = {bub * n[0], bub * n[1]};
        out.grad[6 + i] = {Vec2{n[0] * gb[0], n[0] * gb[1]}, Vec2{n[1] * gb[0], n[1] * gb[1]}};
      }
      break;
    }
    case ElementKind::HdivRT1:
    case ElementKind::HdivBDM1: {
      const int n = nloc_;
      Vec2 val[8];
      std::array<Vec2, 2> grad[8];
      hdiv_span(g, xi, eta, n, val, grad);
      const auto& cm = hdiv_coeffs_[cell];
      for (int k = 0; k < n; ++k) {
        Vec2 v{0.0, 0.0};
        std::array<Vec2, 2> gr{};
        for (int j = 0; j < n; ++j) {
          const double w = cm[j * n + k];
          v[0] += w * val[j][0];
          v[1] += w * val[j][1];
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) gr[a][b] += w * grad[j][a][b];
        }
        out.value[k] = v;
        out.grad[k] = gr;
      }
      break;
    }
  }
}

std::shared_ptr<const Space> build_space(std::shared_ptr<const Mesh> mesh, ElementKind kind) {
  if (!mesh) throw InvalidSpec("build_space needs a mesh");
  return std::make_shared<const Space>(std::move(mesh), kind);
}

Field::Field(std::shared_ptr<const Space> space) : space_(std::move(space)) {
  coeffs_.assign(space_->num_dofs(), 0.0);
}

Field::Field(std::shared_ptr<const Space> space, std::vector<double> coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (static_cast<int>(coeffs_.size()) != space_->num_dofs())
    throw InvalidSpec("coefficient vector length does not match the space");
}

FieldValue Field::eval(int cell, const CellGeometry& geo, double xi, double eta) const {
  BasisValues b;
  space_->eval(cell, geo, xi, eta, b);
  const auto dofs = space_->cell_dofs(cell);
  FieldValue fv;
  for (int k = 0; k < b.n; ++k) {
    const double c = coeffs_[dofs[k]];
    if (c == 0.0) continue;
    fv.value[0] += c * b.value[k][0];
    fv.value[1] += c * b.value[k][1];
    for (int a = 0; a < 2; ++a) {
      fv.grad[a][0] += c * b.grad[k][a][0];
      fv.grad[a][1] += c * b.grad[k][a][1];
    }
  }
  fv.div = fv.grad[0][0] + fv.grad[1][1];
  return fv;
}

std::vector<FieldValue> evaluate(const Field& field, int cell, std::span<const Vec2> ref_points) {
  if (cell < 0 || cell >= field.space().mesh().num_cells()) throw IndexError("cell index out of range");
  constexpr double tol = 1e-12;
  const CellGeometry g = cell_geometry(field.space().mesh(), cell);
  std::vector<FieldValue> out;
  out.reserve(ref_points.size());
  for (const Vec2& p : ref_points) {
    if (p[0] < -tol || p[1] < -tol || p[0] + p[1] > 1.0 + tol)
      throw DomainError("point outside the reference triangle");
    out.push_back(field.eval(cell, g, p[0], p[1]));
  }
  return out;
}

namespace {

void local_interpolate(const Space& space, int cell, const CellGeometry& g, const CellFunction& f, double* out) {
  const Mesh& m = space.mesh();
  auto at = [&](double xi, double eta) { return f(cell, xi, eta, g.map(xi, eta)); };
  const ElementKind kind = space.kind();
  switch (kind) {
    case ElementKind::ScalarP1:
    case ElementKind::ScalarP2:
    case ElementKind::VectorP2:
    case ElementKind::VectorP2Bubble: {
      const int comps = num_components(kind);
      const bool p2 = kind != ElementKind::ScalarP1;
      const int ns = space.local_count() / comps;
      Vec2 vals[7];
      for (int i = 0; i < 3; ++i) vals[i] = at(kRefVertex[i][0], kRefVertex[i][1]);
      if (p2) {
        for (int i = 0; i < 3; ++i) {
          const Vec2& a = kRefVertex[(i + 1) % 3];
          const Vec2& b = kRefVertex[(i + 2) % 3];
          vals[3 + i] = at(0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]));
        }
      }
      if (ns == 7) {
        const Vec2 fc = at(1.0 / 3.0, 1.0 / 3.0);
        for (int c = 0; c < 2; ++c) {
          double p2c = 0.0;
          for (int i = 0; i < 3; ++i) p2c += -vals[i][c] / 9.0 + 4.0 * vals[3 + i][c] / 9.0;
          vals[6][c] = fc[c] - p2c;
        }
      }
      for (int c = 0; c < comps; ++c)
        for (int i = 0; i < ns; ++i) out[c * ns + i] = vals[i][c];
      break;
    }
    case ElementKind::ScalarP1Disc: {
      const auto& rule = triangle_rule();
      double b[3] = {0.0, 0.0, 0.0};
      for (int q = 0; q < rule.size(); ++q) {
        const double xi = rule.points[q][0];
        const double eta = rule.points[q][1];
        const double v = at(xi, eta)[0] * rule.weights[q] * g.det;
        b[0] += v * (1.0 - xi - eta);
        b[1] += v * xi;
        b[2] += v * eta;
      }
      const double s = 3.0 / (0.5 * g.det);
      for (int i = 0; i < 3; ++i) out[i] = s * (3.0 * b[i] - b[(i + 1) % 3] - b[(i + 2) % 3]);
      break;
    }
    case ElementKind::ScalarP0: {
      const auto& rule = triangle_rule();
      double s = 0.0;
      for (int q = 0; q < rule.size(); ++q) s += rule.weights[q] * at(rule.points[q][0], rule.points[q][1])[0];
      out[0] = 2.0 * s;
      break;
    }
    case ElementKind::VectorBernardiRaugel: {
      Vec2 vv[3];
      for (int i = 0; i < 3; ++i) {
        vv[i] = at(kRefVertex[i][0], kRefVertex[i][1]);
        out[i] = vv[i][0];
        out[3 + i] = vv[i][1];
      }
      const auto& line = gauss_legendre(4);
      for (int l = 0; l < 3; ++l) {
        const int a = (l + 1) % 3;
        const int b = (l + 2) % 3;
        const Vec2 n = m.edge_normal(m.cell_edges(cell)[l]);
        double acc = 0.0;
        for (std::size_t q = 0; q < line.points.size(); ++q) {
          const double wa = 0.5 * (1.0 - line.points[q]);
          const double wb = 0.5 * (1.0 + line.points[q]);
          const Vec2 r = {wa * kRefVertex[a][0] + wb * kRefVertex[b][0], wa * kRefVertex[a][1] + wb * kRefVertex[b][1]};
          const Vec2 v = at(r[0], r[1]);
          const double dx = v[0] - (wa * vv[a][0] + wb * vv[b][0]);
          const double dy = v[1] - (wa * vv[a][1] + wb * vv[b][1]);
          acc += line.weights[q] * (dx * n[0] + dy * n[1]);
        }
        out[6 + l] = 0.75 * acc;
      }
      break;
    }
    case ElementKind::HdivRT1:
    case ElementKind::HdivBDM1:
      hdiv_dofs(m, cell, space.local_count(), at, out);
      break;
  }
}

}  // namespace

Field interpolate_cellwise(std::shared_ptr<const Space> space, const CellFunction& f) {
  Field out(space);
  const Mesh& m = space->mesh();
  double local[kMaxLocalDofs];
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    local_interpolate(*space, c, g, f, local);
    const auto dofs = space->cell_dofs(c);
    for (int k = 0; k < space->local_count(); ++k) out.coeffs()[dofs[k]] = local[k];
  }
  return out;
}

Field interpolate(std::shared_ptr<const Space> space, const VectorFunction& f) {
  return interpolate_cellwise(std::move(space), [&f](int, double, double, const Vec2& x) { return f(x[0], x[1]); });
}

Field interpolate(std::shared_ptr<const Space> space, const ScalarFunction& f) {
  return interpolate_cellwise(std::move(space),
                              [&f](int, double, double, const Vec2& x) { return Vec2{f(x[0], x[1]), 0.0}; });
}

Field interpolate_field(std::shared_ptr<const Space> space, const Field& source) {
  if (&space->mesh() != &source.space().mesh()) throw KindMismatch("interpolate_field needs a shared mesh");
  const Mesh& m = source.space().mesh();
  int cached = -1;
  CellGeometry g;
  return interpolate_cellwise(std::move(space), [&](int cell, double xi, double eta, const Vec2&) {
    if (cell != cached) {
      g = cell_geometry(m, cell);
      cached = cell;
    }
    return source.eval(cell, g, xi, eta).value;
  });
}

Norms norms(const Field& field, const QuadratureRule& rule) {
  const Mesh& m = field.space().mesh();
  double l2 = 0.0, h1 = 0.0, dv = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    for (int q = 0; q < rule.size(); ++q) {
      const FieldValue v = field.eval(c, g, rule.points[q][0], rule.points[q][1]);
      const double w = rule.weights[q] * g.det;
      l2 += w * (v.value[0] * v.value[0] + v.value[1] * v.value[1]);
      for (int a = 0; a < 2; ++a) h1 += w * (v.grad[a][0] * v.grad[a][0] + v.grad[a][1] * v.grad[a][1]);
      dv += w * v.div * v.div;
    }
  }
  return {std::sqrt(l2), std::sqrt(h1), std::sqrt(dv)};
}

double max_pointwise_divergence(const Field& field, const QuadratureRule& rule) {
  const Mesh& m = field.space().mesh();
  double mx = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    for (int q = 0; q < rule.size(); ++q)
      mx = std::max(mx, std::abs(field.eval(c, g, rule.points[q][0], rule.points[q][1]).div));
  }
  return mx;
}

}  // namespace mconv
