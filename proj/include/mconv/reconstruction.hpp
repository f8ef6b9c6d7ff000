#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mconv/linalg.hpp"
#include "mconv/spaces.hpp"

namespace mconv {

enum class ElementPair { TaylorHood, P2BubbleP1Disc };
enum class ProjectionFlavor { L2, Stokes };

std::string to_string(ElementPair pair);
ElementPair parse_pair(const std::string& name);  // "th" or "p2b"
std::string to_string(ProjectionFlavor flavor);
ProjectionFlavor parse_flavor(const std::string& name);  // "l2" or "stokes"

ElementKind velocity_kind(ElementPair pair);
ElementKind pressure_kind(ElementPair pair);

/// Which boundary tags fix every velocity component and which fix only the
/// normal one. Tags in neither mask are natural (do-nothing) boundaries.
struct ConstraintMasks {
  std::uint8_t full = 0;
  std::uint8_t normal = 0;
  std::uint8_t zero = 0;  // constrained tags whose boundary data vanishes

  std::uint8_t any() const { return full | normal; }
};

/// Sorted constrained dofs of a velocity space under the masks.
std::vector<int> constrained_dofs(const Space& space, const ConstraintMasks& masks);

/// True when no boundary edge is natural, so the pressure is fixed only up to a constant.
bool needs_mean_constraint(const Mesh& mesh, const ConstraintMasks& masks);

struct ReconstructionPlan {
  ElementPair pair = ElementPair::P2BubbleP1Disc;
  ProjectionFlavor flavor = ProjectionFlavor::L2;
};

/// Canonical RT1 interpolant of a VectorP2Bubble field.
Field rt1_interpolate(const Field& u, std::shared_ptr<const Space> rt1 = nullptr);

/// Canonical BDM1 interpolant of a Bernardi-Raugel field.
Field bdm1_interpolate(const Field& u, std::shared_ptr<const Space> bdm1 = nullptr);

/// Projection of a Taylor-Hood velocity onto the Bernardi-Raugel fields that are
/// discretely divergence-free against P0. The saddle matrix is factored once.
class DivFreeProjector {
 public:
  DivFreeProjector(std::shared_ptr<const Space> p2, ProjectionFlavor flavor, ConstraintMasks masks);

  /// Constrained boundary dofs take the Bernardi-Raugel interpolant of u.
  Field project(const Field& u);

  const std::shared_ptr<const Space>& br_space() const { return br_; }
  const std::shared_ptr<const Space>& p0_space() const { return p0_; }
  double last_residual() const { return lu_.last_residual(); }

 private:
  std::shared_ptr<const Space> p2_, br_, p0_;
  ProjectionFlavor flavor_;
  std::vector<int> constrained_;
  SaddleSystem system_;
  SparseMatrix coupling_;  // BR x P2
  LuSolver lu_;
  bool factored_ = false;
};

/// One-shot convenience wrapper (builds and factors a projector).
Field th_project_divfree(const Field& u, ProjectionFlavor flavor, ConstraintMasks masks);

/// Dispatches to the pair's reconstruction operator and keeps its state.
class Reconstructor {
 public:
  Reconstructor(std::shared_ptr<const Space> velocity, ReconstructionPlan plan, ConstraintMasks masks);

  Field reconstruct(const Field& u);
  const std::shared_ptr<const Space>& target_space() const { return target_; }
  const ReconstructionPlan& plan() const { return plan_; }

 private:
  std::shared_ptr<const Space> velocity_;
  std::shared_ptr<const Space> target_;
  ReconstructionPlan plan_;
  ConstraintMasks masks_;
  std::unique_ptr<DivFreeProjector> projector_;
};

Field reconstruct(const Field& u, const ReconstructionPlan& plan, ConstraintMasks masks);

/// Seeded member of the discretely divergence-free subspace with homogeneous
/// boundary values: the velocity of a Stokes problem with random smooth forcing,
/// scaled to unit L2 norm.
Field random_discrete_divfree(std::shared_ptr<const Space> velocity, std::shared_ptr<const Space> pressure,
                              std::uint64_t seed);

}  // namespace mconv
