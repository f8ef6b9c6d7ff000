#include "mconv/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mconv/assembly.hpp"
#include "mconv/errors.hpp"

namespace mconv {

std::string to_string(ElementPair pair) { return pair == ElementPair::TaylorHood ? "th" : "p2b"; }

ElementPair parse_pair(const std::string& name) {
  if (name == "th") return ElementPair::TaylorHood;
  if (name == "p2b") return ElementPair::P2BubbleP1Disc;
  throw InvalidSpec("unknown element pair '" + name + "'");
}

std::string to_string(ProjectionFlavor flavor) { return flavor == ProjectionFlavor::L2 ? "l2" : "stokes"; }

ProjectionFlavor parse_flavor(const std::string& name) {
  if (name == "l2") return ProjectionFlavor::L2;
  if (name == "stokes") return ProjectionFlavor::Stokes;
  throw InvalidSpec("unknown projection flavor '" + name + "'");
}

ElementKind velocity_kind(ElementPair pair) {
  return pair == ElementPair::TaylorHood ? ElementKind::VectorP2 : ElementKind::VectorP2Bubble;
}

ElementKind pressure_kind(ElementPair pair) {
  return pair == ElementPair::TaylorHood ? ElementKind::ScalarP1 : ElementKind::ScalarP1Disc;
}

std::vector<int> constrained_dofs(const Space& space, const ConstraintMasks& masks) {
  std::vector<int> out = space.boundary_dofs(masks.full, false);
  const std::vector<int> normal = space.boundary_dofs(masks.normal, true);
  out.insert(out.end(), normal.begin(), normal.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool needs_mean_constraint(const Mesh& mesh, const ConstraintMasks& masks) {
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.is_boundary_edge(e) && !(tag_bit(mesh.boundary_tag(e)) & masks.any())) return false;
  return true;
}

Field rt1_interpolate(const Field& u, std::shared_ptr<const Space> rt1) {
  if (u.space().kind() != ElementKind::VectorP2Bubble) throw KindMismatch("RT1 reconstruction expects VectorP2Bubble");
  if (!rt1) rt1 = build_space(u.space().mesh_ptr(), ElementKind::HdivRT1);
  if (rt1->kind() != ElementKind::HdivRT1) throw KindMismatch("target space must be RT1");
  return interpolate_field(rt1, u);
}

Field bdm1_interpolate(const Field& u, std::shared_ptr<const Space> bdm1) {
  if (u.space().kind() != ElementKind::VectorBernardiRaugel)
    throw KindMismatch("BDM1 reconstruction expects a Bernardi-Raugel field");
  if (!bdm1) bdm1 = build_space(u.space().mesh_ptr(), ElementKind::HdivBDM1);
  if (bdm1->kind() != ElementKind::HdivBDM1) throw KindMismatch("target space must be BDM1");
  return interpolate_field(bdm1, u);
}

DivFreeProjector::DivFreeProjector(std::shared_ptr<const Space> p2, ProjectionFlavor flavor, ConstraintMasks masks)
    : p2_(std::move(p2)), flavor_(flavor) {
  if (p2_->kind() != ElementKind::VectorP2) throw KindMismatch("projection expects a Taylor-Hood velocity");
  br_ = build_space(p2_->mesh_ptr(), ElementKind::VectorBernardiRaugel);
  p0_ = build_space(p2_->mesh_ptr(), ElementKind::ScalarP0);
  constrained_ = constrained_dofs(*br_, masks);
  if (flavor_ == ProjectionFlavor::L2) {
    system_.A = assemble_mass(*br_);
    coupling_ = assemble_mass(*br_, *p2_);
  } else {
    system_.A = assemble_stiffness(*br_);
    coupling_ = assemble_stiffness(*br_, *p2_);
  }
  system_.B = assemble_div(*br_, *p0_);
  if (needs_mean_constraint(p2_->mesh(), masks)) system_.mean = basis_integrals(*p0_);
}

Field DivFreeProjector::project(const Field& u) {
  if (&u.space().mesh() != &p2_->mesh() || u.space().kind() != ElementKind::VectorP2)
    throw KindMismatch("projection input must live in the projector's Taylor-Hood space");
  system_.rhs_u = coupling_.multiply(u.coeffs());
  system_.constraints.clear();
  if (!constrained_.empty()) {
    const Field trace = interpolate_field(br_, u);
    for (int d : constrained_) system_.constraints.emplace_back(d, trace.coeffs()[d]);
  }
  Monolithic mono = apply_dirichlet(system_);
  if (!factored_) {
    try {
      lu_.factor(mono.matrix);
    } catch (const SingularSystem& e) {
      throw SolverFailure(std::string("divergence-free projection system is singular: ") + e.what());
    }
    factored_ = true;
  }
  const std::vector<double> x = lu_.solve(mono.rhs);
  return Field(br_, std::vector<double>(x.begin(), x.begin() + br_->num_dofs()));
}

Field th_project_divfree(const Field& u, ProjectionFlavor flavor, ConstraintMasks masks) {
  DivFreeProjector p(u.space_ptr(), flavor, masks);
  return p.project(u);
}

namespace {

// Zero the normal moments on edges whose tags carry a normal constraint.
void clear_boundary_normals(Field& f, const ConstraintMasks& masks) {
  const std::vector<int> dofs = f.space().boundary_dofs(masks.any(), true);
  for (int d : dofs) f.coeffs()[d] = 0.0;
}

}  // namespace

Reconstructor::Reconstructor(std::shared_ptr<const Space> velocity, ReconstructionPlan plan, ConstraintMasks masks)
    : velocity_(std::move(velocity)), plan_(plan), masks_(masks) {
  if (velocity_->kind() != velocity_kind(plan_.pair)) throw KindMismatch("velocity space does not match the plan");
  if (plan_.pair == ElementPair::P2BubbleP1Disc) {
    target_ = build_space(velocity_->mesh_ptr(), ElementKind::HdivRT1);
  } else {
    projector_ = std::make_unique<DivFreeProjector>(velocity_, plan_.flavor, masks_);
    target_ = build_space(velocity_->mesh_ptr(), ElementKind::HdivBDM1);
  }
}

Field Reconstructor::reconstruct(const Field& u) {
  if (u.space().kind() != velocity_->kind() || &u.space().mesh() != &velocity_->mesh())
    throw KindMismatch("field does not belong to the reconstructor's velocity space");
  // Only homogeneous normal data is cleared; inhomogeneous inflow keeps its moments.
  const ConstraintMasks homogeneous{0, static_cast<std::uint8_t>(masks_.any() & masks_.zero), 0};
  if (plan_.pair == ElementPair::P2BubbleP1Disc) {
    Field r = rt1_interpolate(u, target_);
    clear_boundary_normals(r, homogeneous);
    return r;
  }
  Field r = bdm1_interpolate(projector_->project(u), target_);
  clear_boundary_normals(r, homogeneous);
  return r;
}

Field reconstruct(const Field& u, const ReconstructionPlan& plan, ConstraintMasks masks) {
  Reconstructor r(u.space_ptr(), plan, masks);
  return r.reconstruct(u);
}

Field random_discrete_divfree(std::shared_ptr<const Space> velocity, std::shared_ptr<const Space> pressure,
                              std::uint64_t seed) {
  const Mesh& m = velocity->mesh();
  double xmin = m.vertex(0)[0], xmax = xmin, ymin = m.vertex(0)[1], ymax = ymin;
  for (const Vec2& v : m.vertices()) {
    xmin = std::min(xmin, v[0]);
    xmax = std::max(xmax, v[0]);
    ymin = std::min(ymin, v[1]);
    ymax = std::max(ymax, v[1]);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  struct Mode {
    int kx, ky;
    double ax, ay, px, py;
  };
  std::vector<Mode> modes;
  for (int kx = 1; kx <= 3; ++kx)
    for (int ky = 1; ky <= 3; ++ky) {
      Mode md{kx, ky, coef(rng), coef(rng), phase(rng), phase(rng)};
      modes.push_back(md);
    }
  const double lx = xmax - xmin, ly = ymax - ymin;
  auto forcing = [&](int, double, double, const Vec2& x) {
    Vec2 f{0.0, 0.0};
    for (const Mode& md : modes) {
      const double sx = M_PI * md.kx * (x[0] - xmin) / lx;
      const double sy = M_PI * md.ky * (x[1] - ymin) / ly;
      f[0] += md.ax * std::sin(sx + md.px) * std::cos(sy + md.py);
      f[1] += md.ay * std::cos(sx + md.py) * std::sin(sy + md.px);
    }
    return f;
  };
  SaddleSystem s;
  s.A = assemble_stiffness(*velocity);
  s.B = assemble_div(*velocity, *pressure);
  s.mean = basis_integrals(*pressure);
  s.rhs_u = assemble_load(*velocity, forcing);
  const ConstraintMasks all{0xff, 0};
  for (int d : constrained_dofs(*velocity, all)) s.constraints.emplace_back(d, 0.0);
  const Monolithic mono = apply_dirichlet(s);
  const std::vector<double> x = lu_solve(mono.matrix, mono.rhs);
  Field u(velocity, std::vector<double>(x.begin(), x.begin() + velocity->num_dofs()));
  const double l2 = norms(u).l2;
  if (l2 > 0.0)
    for (double& c : u.coeffs()) c /= l2;
  return u;
}

}  // namespace mconv
