#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mconv {

using Vec2 = std::array<double, 2>;

enum class BoundaryTag : std::uint8_t { none, generic, wall, inflow, outflow };

std::string to_string(BoundaryTag tag);

enum class DomainKind { rect, gresho_square, step_channel };

struct DomainSpec {
  DomainKind kind = DomainKind::rect;
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  int nx = 1, ny = 1;
  // step_channel only: the unit notch [step_x, step_x + step_size] x [ymin, ymin + step_size]
  double step_x = 5.0;
  double step_size = 1.0;

  static DomainSpec unit_square(int nx, int ny);
  static DomainSpec gresho(int n);
  static DomainSpec step_channel();
};

/// Conforming triangulation with full edge connectivity.
///
/// Local edge i of a cell is opposite local vertex i and runs from
/// vertex (i+1)%3 to vertex (i+2)%3. Global edges are oriented from the
/// lower to the higher vertex index; the sign stored per cell edge is +1 when
/// the counter-clockwise traversal of the cell agrees with that orientation.
/// The global unit normal of an edge is its tangent rotated clockwise, so
/// sign * normal is the outward normal of the cell.
class Mesh {
 public:
  using Tagger = std::function<BoundaryTag(int, int)>;

  Mesh() = default;
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells, const Tagger& tagger);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& cell(int c) const { return cells_[c]; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  const std::array<int, 3>& cell_edges(int c) const { return cell_edges_[c]; }
  const std::array<int, 3>& cell_edge_signs(int c) const { return cell_edge_signs_[c]; }
  // Second entry is -1 for boundary edges.
  const std::array<int, 2>& edge_cells(int e) const { return edge_cells_[e]; }
  BoundaryTag boundary_tag(int e) const { return edge_tags_[e]; }
  bool is_boundary_edge(int e) const { return edge_cells_[e][1] < 0; }

  double cell_area(int c) const;
  double edge_length(int e) const;
  Vec2 edge_normal(int e) const;
  Vec2 edge_midpoint(int e) const;
  double total_area() const;
  int euler_characteristic() const { return num_vertices() - num_edges() + num_cells(); }

  /// Throws InvalidSpec when an invariant is broken.
  void validate() const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<std::array<int, 3>> cell_edge_signs_;
  std::vector<std::array<int, 2>> edge_cells_;
  std::vector<BoundaryTag> edge_tags_;
};

/// nx*ny quads, each split along the lower-left to upper-right diagonal.
/// All boundary edges are tagged wall.
Mesh generate_uniform(const DomainSpec& spec);

/// 40x10 channel with the unit step removed, graded towards the step corners.
Mesh generate_step_channel(const DomainSpec& spec, double target_h);

/// Red refinement: every triangle split into four through its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

/// Same mesh with vertex numbering permuted; cell order kept.
Mesh renumber_vertices(const Mesh& mesh, const std::vector<int>& new_index);

}  // namespace mconv
