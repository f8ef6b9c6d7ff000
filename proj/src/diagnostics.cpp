#include "mconv/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mconv/errors.hpp"

namespace mconv {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "step",      "time",           "kinetic_energy", "momentum_x", "momentum_y", "momentum_sum",   "angular_momentum",
      "enstrophy", "total_vorticity", "l2_error",       "div_l2",     "div_rec_max", "solver_residual"};
  return cols;
}

DiagnosticsRecord conserved_quantities(const Field& u, const Field* w, const QuadratureRule& rule) {
  if (!is_vector(u.space().kind())) throw KindMismatch("conserved quantities need a velocity field");
  if (w && (is_vector(w->space().kind()) || &w->space().mesh() != &u.space().mesh()))
    throw KindMismatch("vorticity must be a scalar field on the velocity mesh");
  const Mesh& m = u.space().mesh();
  DiagnosticsRecord r;
  double e = 0.0, mx = 0.0, my = 0.0, am = 0.0, ens = 0.0, tv = 0.0, dv = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    for (int q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q][0], eta = rule.points[q][1];
      const double wq = rule.weights[q] * g.det;
      const Vec2 x = g.map(xi, eta);
      const FieldValue v = u.eval(c, g, xi, eta);
      const double vort = w ? w->eval(c, g, xi, eta).value[0] : v.grad[1][0] - v.grad[0][1];
      e += wq * (v.value[0] * v.value[0] + v.value[1] * v.value[1]);
      mx += wq * v.value[0];
      my += wq * v.value[1];
      am += wq * (v.value[0] * x[1] - v.value[1] * x[0]);
      ens += wq * vort * vort;
      tv += wq * vort;
      dv += wq * v.div * v.div;
    }
  }
  r.kinetic_energy = 0.5 * e;
  r.momentum_x = mx;
  r.momentum_y = my;
  r.momentum_sum = mx + my;
  r.angular_momentum = am;
  r.enstrophy = 0.5 * ens;
  r.total_vorticity = tv;
  r.div_l2 = std::sqrt(dv);
  return r;
}

double l2_error(const Field& u, const VectorFunction& exact, const QuadratureRule& rule) {
  const Mesh& m = u.space().mesh();
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    for (int q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q][0], eta = rule.points[q][1];
      const Vec2 x = g.map(xi, eta);
      const Vec2 e = exact(x[0], x[1]);
      const Vec2 v = u.eval(c, g, xi, eta).value;
      const int comps = u.space().components();
      double d = 0.0;
      for (int k = 0; k < comps; ++k) d += (v[k] - e[k]) * (v[k] - e[k]);
      s += rule.weights[q] * g.det * d;
    }
  }
  return std::sqrt(s);
}

namespace {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path,
               const std::optional<BlowupMarker>& blowup) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : records) {
    out << r.step;
    for (double v : {r.time, r.kinetic_energy, r.momentum_x, r.momentum_y, r.momentum_sum, r.angular_momentum,
                     r.enstrophy, r.total_vorticity, r.l2_error, r.div_l2, r.div_rec_max, r.solver_residual})
      out << ',' << format17(v);
    out << '\n';
  }
  if (blowup) out << "# blowup at step " << blowup->step << " t=" << format17(blowup->time) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::vector<DiagnosticsRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<DiagnosticsRecord> out;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != csv_columns().size()) throw std::runtime_error("malformed row in " + path + ": " + line);
    // strtod, unlike stod, accepts subnormals and nan
    auto num = [&](int i) { return std::strtod(cells[i].c_str(), nullptr); };
    DiagnosticsRecord r;
    r.step = std::stoi(cells[0]);
    r.time = num(1);
    r.kinetic_energy = num(2);
    r.momentum_x = num(3);
    r.momentum_y = num(4);
    r.momentum_sum = num(5);
    r.angular_momentum = num(6);
    r.enstrophy = num(7);
    r.total_vorticity = num(8);
    r.l2_error = num(9);
    r.div_l2 = num(10);
    r.div_rec_max = num(11);
    r.solver_residual = num(12);
    out.push_back(r);
  }
  return out;
}

void export_vtk(const Field& u, const Field& p, const std::string& path) {
  const Mesh& m = u.space().mesh();
  if (&p.space().mesh() != &m) throw KindMismatch("velocity and pressure must share a mesh");
  const int nv = m.num_vertices();
  const int nt = m.num_cells();
  // vertex values, taken from the first cell that owns the vertex
  std::vector<Vec2> vel(nv, Vec2{0.0, 0.0});
  std::vector<char> done(nv, 0);
  const Vec2 corner[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (int c = 0; c < nt; ++c) {
    const CellGeometry g = cell_geometry(m, c);
    for (int i = 0; i < 3; ++i) {
      const int v = m.cell(c)[i];
      if (done[v]) continue;
      vel[v] = u.eval(c, g, corner[i][0], corner[i][1]).value;
      done[v] = 1;
    }
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  out << "# vtk DataFile Version 3.0\nvelocity and pressure\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const Vec2& x : m.vertices()) out << x[0] << ' ' << x[1] << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (int c = 0; c < nt; ++c) out << "3 " << m.cell(c)[0] << ' ' << m.cell(c)[1] << ' ' << m.cell(c)[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (int c = 0; c < nt; ++c) out << "5\n";
  out << "POINT_DATA " << nv << "\nVECTORS velocity double\n";
  for (const Vec2& v : vel) out << v[0] << ' ' << v[1] << " 0\n";
  out << "SCALARS speed double 1\nLOOKUP_TABLE default\n";
  for (const Vec2& v : vel) out << std::hypot(v[0], v[1]) << '\n';
  out << "CELL_DATA " << nt << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < nt; ++c) out << p.eval(c, cell_geometry(m, c), 1.0 / 3.0, 1.0 / 3.0).value[0] << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace mconv
