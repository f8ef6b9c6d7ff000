#include "mconv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "mconv/errors.hpp"

namespace mconv {

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::none: return "none";
    case BoundaryTag::generic: return "generic";
    case BoundaryTag::wall: return "wall";
    case BoundaryTag::inflow: return "inflow";
    case BoundaryTag::outflow: return "outflow";
  }
  return "?";
}

DomainSpec DomainSpec::unit_square(int nx, int ny) {
  DomainSpec s;
  s.kind = DomainKind::rect;
  s.nx = nx;
  s.ny = ny;
  return s;
}

DomainSpec DomainSpec::gresho(int n) {
  DomainSpec s;
  s.kind = DomainKind::gresho_square;
  s.xmin = -0.5;
  s.xmax = 0.5;
  s.ymin = -0.5;
  s.ymax = 0.5;
  s.nx = n;
  s.ny = n;
  return s;
}

DomainSpec DomainSpec::step_channel() {
  DomainSpec s;
  s.kind = DomainKind::step_channel;
  s.xmin = 0.0;
  s.xmax = 40.0;
  s.ymin = 0.0;
  s.ymax = 10.0;
  return s;
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells, const Tagger& tagger)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const auto nv = static_cast<std::int64_t>(vertices_.size());
  std::unordered_map<std::int64_t, int> lookup;
  lookup.reserve(cells_.size() * 2);
  cell_edges_.resize(cells_.size());
  cell_edge_signs_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& tri = cells_[c];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      if (a < 0 || b < 0 || a >= nv || b >= nv) throw IndexError("cell references a missing vertex");
      const int lo = std::min(a, b);
      const int hi = std::max(a, b);
      const std::int64_t key = lo * nv + hi;
      auto [it, inserted] = lookup.try_emplace(key, static_cast<int>(edges_.size()));
      if (inserted) {
        edges_.push_back({lo, hi});
        edge_cells_.push_back({static_cast<int>(c), -1});
      } else {
        auto& ec = edge_cells_[it->second];
        if (ec[1] >= 0) throw InvalidSpec("edge shared by more than two cells");
        ec[1] = static_cast<int>(c);
      }
      cell_edges_[c][i] = it->second;
      cell_edge_signs_[c][i] = a < b ? 1 : -1;
    }
  }
  edge_tags_.assign(edges_.size(), BoundaryTag::none);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edge_cells_[e][1] < 0) {
      edge_tags_[e] = tagger ? tagger(edges_[e][0], edges_[e][1]) : BoundaryTag::generic;
      if (edge_tags_[e] == BoundaryTag::none) edge_tags_[e] = BoundaryTag::generic;
    }
  }
}

double Mesh::cell_area(int c) const {
  const auto& t = cells_[c];
  const Vec2& a = vertices_[t[0]];
  const Vec2& b = vertices_[t[1]];
  const Vec2& d = vertices_[t[2]];
  return 0.5 * ((b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]));
}

double Mesh::edge_length(int e) const {
  const Vec2& a = vertices_[edges_[e][0]];
  const Vec2& b = vertices_[edges_[e][1]];
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

Vec2 Mesh::edge_normal(int e) const {
  const Vec2& a = vertices_[edges_[e][0]];
  const Vec2& b = vertices_[edges_[e][1]];
  const double tx = b[0] - a[0];
  const double ty = b[1] - a[1];
  const double len = std::hypot(tx, ty);
  return {ty / len, -tx / len};
}

Vec2 Mesh::edge_midpoint(int e) const {
  const Vec2& a = vertices_[edges_[e][0]];
  const Vec2& b = vertices_[edges_[e][1]];
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

double Mesh::total_area() const {
  double s = 0.0;
  for (int c = 0; c < num_cells(); ++c) s += cell_area(c);
  return s;
}

void Mesh::validate() const {
  for (int c = 0; c < num_cells(); ++c) {
    if (!(cell_area(c) > 0.0)) throw InvalidSpec("cell " + std::to_string(c) + " is not counter-clockwise");
    for (int i = 0; i < 3; ++i) {
      const auto& ec = edge_cells_[cell_edges_[c][i]];
      if (ec[0] != c && ec[1] != c) throw InvalidSpec("edge/cell connectivity mismatch");
    }
  }
  for (int e = 0; e < num_edges(); ++e) {
    const auto& ec = edge_cells_[e];
    const bool boundary = ec[1] < 0;
    if (boundary != (edge_tags_[e] != BoundaryTag::none))
      throw InvalidSpec("boundary tags do not match the single-cell edges");
    if (!boundary) {
      int sum = 0;
      for (int side = 0; side < 2; ++side) {
        const int c = ec[side];
        for (int i = 0; i < 3; ++i)
          if (cell_edges_[c][i] == e) sum += cell_edge_signs_[c][i];
      }
      if (sum != 0) throw InvalidSpec("inconsistent edge orientation signs");
    }
  }
}

Mesh generate_uniform(const DomainSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1) throw InvalidSpec("nx and ny must be positive");
  if (!(spec.xmax > spec.xmin) || !(spec.ymax > spec.ymin)) throw InvalidSpec("degenerate bounds");
  if (spec.kind == DomainKind::step_channel) throw InvalidSpec("generate_uniform needs a rectangle");
  const int nx = spec.nx;
  const int ny = spec.ny;
  std::vector<Vec2> verts;
  verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = j == ny ? spec.ymax : spec.ymin + (spec.ymax - spec.ymin) * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? spec.xmax : spec.xmin + (spec.xmax - spec.xmin) * i / nx;
      verts.push_back({x, y});
    }
  }
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = j * (nx + 1) + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + nx + 1;
      const int v11 = v01 + 1;
      cells.push_back({v00, v10, v11});
      cells.push_back({v00, v11, v01});
    }
  }
  return Mesh(std::move(verts), std::move(cells), [](int, int) { return BoundaryTag::wall; });
}

namespace {

// Break points of [a, b]: three geometrically shrinking layers (factor 0.8)
// next to each graded end, uniform spacing of about h in between. Segments too
// short for the layers get uniform spacing at the finest layer size.
std::vector<double> graded_breaks(double a, double b, double h, bool grade_a, bool grade_b) {
  constexpr double kFactor = 0.8;
  const std::array<double, 3> layers = {h * kFactor * kFactor * kFactor, h * kFactor * kFactor, h * kFactor};
  const double graded = layers[0] + layers[1] + layers[2];
  const double len = b - a;
  const double needed = (grade_a ? graded : 0.0) + (grade_b ? graded : 0.0);
  std::vector<double> pts;
  if ((grade_a || grade_b) && needed > len - h) {
    const int n = static_cast<int>(std::ceil(len / layers[0] - 1e-12));
    for (int k = 0; k <= n; ++k) pts.push_back(k == n ? b : a + len * k / n);
    return pts;
  }
  pts.push_back(a);
  double lo = a;
  if (grade_a) {
    for (double l : layers) {
      lo += l;
      pts.push_back(lo);
    }
  }
  double hi = b;
  std::vector<double> tail;
  if (grade_b) {
    for (double l : layers) {
      tail.push_back(hi);
      hi -= l;
    }
  }
  const double rem = hi - lo;
  const int n = std::max(1, static_cast<int>(std::ceil(rem / h - 1e-12)));
  for (int k = 1; k < n; ++k) pts.push_back(lo + rem * k / n);
  if (grade_b) {
    pts.push_back(hi);
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) pts.push_back(*it);
  } else {
    pts.push_back(b);
  }
  return pts;
}

std::vector<double> concat(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin() + 1, b.end());
  return a;
}

}  // namespace

Mesh generate_step_channel(const DomainSpec& spec, double target_h) {
  if (spec.kind != DomainKind::step_channel) throw InvalidSpec("generate_step_channel needs a step_channel spec");
  if (!(target_h > 0.0)) throw InvalidSpec("target_h must be positive");
  if (target_h > spec.step_size) throw InvalidSpec("target_h larger than the step");
  const double s0 = spec.step_x;
  const double s1 = spec.step_x + spec.step_size;
  const double top = spec.ymin + spec.step_size;

  const auto xs = concat(concat(graded_breaks(spec.xmin, s0, target_h, false, true),
                                graded_breaks(s0, s1, target_h, true, true)),
                         graded_breaks(s1, spec.xmax, target_h, true, false));
  const auto ys = concat(graded_breaks(spec.ymin, top, target_h, false, true),
                         graded_breaks(top, spec.ymax, target_h, true, false));
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;
  auto in_notch = [&](double x, double y) { return x > s0 && x < s1 && y < top; };

  std::vector<int> index(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
  std::vector<Vec2> verts;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (in_notch(xs[i], ys[j])) continue;
      index[j * (nx + 1) + i] = static_cast<int>(verts.size());
      verts.push_back({xs[i], ys[j]});
    }
  }
  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (in_notch(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]))) continue;
      const int v00 = index[j * (nx + 1) + i];
      const int v10 = index[j * (nx + 1) + i + 1];
      const int v01 = index[(j + 1) * (nx + 1) + i];
      const int v11 = index[(j + 1) * (nx + 1) + i + 1];
      cells.push_back({v00, v10, v11});
      cells.push_back({v00, v11, v01});
    }
  }
  const double x_in = spec.xmin;
  const double x_out = spec.xmax;
  auto tagger = [vref = verts, x_in, x_out](int a, int b) {
    if (vref[a][0] == x_in && vref[b][0] == x_in) return BoundaryTag::inflow;
    if (vref[a][0] == x_out && vref[b][0] == x_out) return BoundaryTag::outflow;
    return BoundaryTag::wall;
  };
  return Mesh(std::move(verts), std::move(cells), tagger);
}

Mesh refine_uniform(const Mesh& mesh) {
  const int nv = mesh.num_vertices();
  std::vector<Vec2> verts = mesh.vertices();
  verts.reserve(nv + mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) verts.push_back(mesh.edge_midpoint(e));
  std::vector<std::array<int, 3>> cells;
  cells.reserve(4 * static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cell(c);
    const auto& ce = mesh.cell_edges(c);
    const int m0 = nv + ce[0];
    const int m1 = nv + ce[1];
    const int m2 = nv + ce[2];
    cells.push_back({t[0], m2, m1});
    cells.push_back({m2, t[1], m0});
    cells.push_back({m1, m0, t[2]});
    cells.push_back({m0, m1, m2});
  }
  auto tagger = [&mesh, nv](int a, int b) {
    const int mid = std::max(a, b);
    return mid >= nv ? mesh.boundary_tag(mid - nv) : BoundaryTag::generic;
  };
  return Mesh(std::move(verts), std::move(cells), tagger);
}

Mesh renumber_vertices(const Mesh& mesh, const std::vector<int>& new_index) {
  const int nv = mesh.num_vertices();
  if (static_cast<int>(new_index.size()) != nv) throw InvalidSpec("permutation size mismatch");
  std::vector<Vec2> verts(nv);
  std::vector<int> old_index(nv, -1);
  for (int v = 0; v < nv; ++v) {
    const int nvtx = new_index[v];
    if (nvtx < 0 || nvtx >= nv || old_index[nvtx] >= 0) throw InvalidSpec("not a permutation");
    verts[nvtx] = mesh.vertex(v);
    old_index[nvtx] = v;
  }
  std::vector<std::array<int, 3>> cells(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int i = 0; i < 3; ++i) cells[c][i] = new_index[mesh.cell(c)[i]];
  std::map<std::pair<int, int>, BoundaryTag> tags;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.is_boundary_edge(e)) tags[{mesh.edge(e)[0], mesh.edge(e)[1]}] = mesh.boundary_tag(e);
  auto tagger = [&](int a, int b) {
    const int oa = old_index[a];
    const int ob = old_index[b];
    return tags.at({std::min(oa, ob), std::max(oa, ob)});
  };
  return Mesh(std::move(verts), std::move(cells), tagger);
}

}  // namespace mconv
