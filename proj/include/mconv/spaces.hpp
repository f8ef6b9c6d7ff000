#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mconv/mesh.hpp"
#include "mconv/quadrature.hpp"

namespace mconv {

enum class ElementKind {
  ScalarP1,
  ScalarP2,
  ScalarP1Disc,
  ScalarP0,
  VectorP2,
  VectorP2Bubble,  // P2 plus the cubic bubble, per component
  VectorBernardiRaugel,
  HdivRT1,
  HdivBDM1,
};

std::string to_string(ElementKind kind);
int local_dof_count(ElementKind kind);
int num_components(ElementKind kind);
bool is_hdiv(ElementKind kind);
bool is_vector(ElementKind kind);

/// Affine map from the reference triangle (0,0),(1,0),(0,1).
struct CellGeometry {
  Vec2 origin{};
  double jac[2][2]{};  // columns are x1 - x0 and x2 - x0
  double inv[2][2]{};
  double det = 0.0;
  std::array<Vec2, 3> grad_lambda{};

  Vec2 map(double xi, double eta) const {
    return {origin[0] + jac[0][0] * xi + jac[0][1] * eta, origin[1] + jac[1][0] * xi + jac[1][1] * eta};
  }
};

CellGeometry cell_geometry(const Mesh& mesh, int cell);

inline constexpr int kMaxLocalDofs = 14;

/// Local basis tabulated at one physical point of a cell.
/// Scalar kinds fill component 0 only. grad[k][c] is the gradient of
/// component c of basis function k.
struct BasisValues {
  int n = 0;
  std::array<Vec2, kMaxLocalDofs> value{};
  std::array<std::array<Vec2, 2>, kMaxLocalDofs> grad{};

  double div(int k) const { return grad[k][0][0] + grad[k][1][1]; }
};

/// Boundary classification of one global dof.
struct DofInfo {
  std::uint8_t tags = 0;         // bit per BoundaryTag the dof touches
  std::uint8_t normal_tags = 0;  // bit per BoundaryTag where the dof is a normal component
  std::int8_t component = 0;     // -1 for normal-direction (edge) dofs

  bool on_boundary() const { return tags != 0; }
};

inline constexpr std::uint8_t tag_bit(BoundaryTag t) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t)); }

class Space {
 public:
  Space(std::shared_ptr<const Mesh> mesh, ElementKind kind);

  ElementKind kind() const { return kind_; }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int num_dofs() const { return num_dofs_; }
  int local_count() const { return nloc_; }
  int components() const { return num_components(kind_); }

  std::span<const int> cell_dofs(int cell) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(cell) * nloc_, static_cast<std::size_t>(nloc_)};
  }
  const DofInfo& dof_info(int dof) const { return info_[dof]; }

  /// Sorted dofs touching a boundary with one of the tags in `mask`.
  /// With normal_only set, only normal-component dofs are returned.
  std::vector<int> boundary_dofs(std::uint8_t mask, bool normal_only) const;

  /// Tabulates the local basis at reference point (xi, eta) of `cell`.
  void eval(int cell, const CellGeometry& geo, double xi, double eta, BasisValues& out) const;

 private:
  void number_dofs();
  void classify_boundary();
  void build_hdiv_duals();

  std::shared_ptr<const Mesh> mesh_;
  ElementKind kind_;
  int nloc_ = 0;
  int num_dofs_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<DofInfo> info_;
  std::vector<std::array<double, 64>> hdiv_coeffs_;
};

std::shared_ptr<const Space> build_space(std::shared_ptr<const Mesh> mesh, ElementKind kind);

struct FieldValue {
  Vec2 value{};
  std::array<Vec2, 2> grad{};
  double div = 0.0;
};

/// Coefficient vector bound to a space.
class Field {
 public:
  Field() = default;
  explicit Field(std::shared_ptr<const Space> space);
  Field(std::shared_ptr<const Space> space, std::vector<double> coeffs);

  const Space& space() const { return *space_; }
  const std::shared_ptr<const Space>& space_ptr() const { return space_; }
  std::vector<double>& coeffs() { return coeffs_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  int size() const { return static_cast<int>(coeffs_.size()); }

  /// Value, gradient and divergence at a reference point; no bounds check.
  FieldValue eval(int cell, const CellGeometry& geo, double xi, double eta) const;

 private:
  std::shared_ptr<const Space> space_;
  std::vector<double> coeffs_;
};

/// Checked evaluation at a batch of reference points.
std::vector<FieldValue> evaluate(const Field& field, int cell, std::span<const Vec2> ref_points);

using VectorFunction = std::function<Vec2(double x, double y)>;
using ScalarFunction = std::function<double(double x, double y)>;
// (cell, xi, eta, physical point) -> value; lets interpolation read other fields cellwise
using CellFunction = std::function<Vec2(int cell, double xi, double eta, const Vec2& x)>;

Field interpolate(std::shared_ptr<const Space> space, const VectorFunction& f);
Field interpolate(std::shared_ptr<const Space> space, const ScalarFunction& f);
Field interpolate_cellwise(std::shared_ptr<const Space> space, const CellFunction& f);
/// Interpolates another field on the same mesh, evaluating it cell by cell.
Field interpolate_field(std::shared_ptr<const Space> space, const Field& source);

struct Norms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double div_l2 = 0.0;
};

Norms norms(const Field& field, const QuadratureRule& rule = triangle_rule());

/// Maximum of |div u| over all quadrature points of the rule.
double max_pointwise_divergence(const Field& field, const QuadratureRule& rule = triangle_rule());

}  // namespace mconv
