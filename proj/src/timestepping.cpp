#include "mconv/timestepping.hpp"

#include <cmath>

#include "mconv/errors.hpp"

namespace mconv {

std::string to_string(Stepper s) {
  switch (s) {
    case Stepper::CN_PICARD1: return "cn1";
    case Stepper::CN_PICARD2: return "cn2";
    case Stepper::BDF2: return "bdf2";
  }
  return "?";
}

Stepper parse_stepper(const std::string& name) {
  if (name == "cn1") return Stepper::CN_PICARD1;
  if (name == "cn2") return Stepper::CN_PICARD2;
  if (name == "bdf2") return Stepper::BDF2;
  throw InvalidSpec("unknown stepper '" + name + "'");
}

ConstraintMasks BoundaryRecipe::masks() const {
  ConstraintMasks m;
  m.full = dirichlet;
  m.normal = static_cast<std::uint8_t>(no_penetration & ~dirichlet);
  m.zero = static_cast<std::uint8_t>((dirichlet | no_penetration) & ~inhomogeneous);
  return m;
}

int SchemeConfig::num_steps() const { return static_cast<int>(std::llround(t_end / dt)); }

void SchemeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidSpec("time step must be positive");
  if (!(t_end >= dt * (1.0 - 1e-12))) throw InvalidSpec("end time must be at least one time step");
  if (std::abs(num_steps() * dt - t_end) > 1e-9 * t_end) throw InvalidSpec("end time is not a multiple of the time step");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw InvalidSpec("viscosity must be non-negative");
  if (bc.inhomogeneous && !dirichlet) throw InvalidSpec("inhomogeneous boundary data needs a Dirichlet function");
  if (vorticity && form != ConvectiveForm::MOD_CONV)
    throw InvalidSpec("the vorticity co-solve needs the reconstructed (modconv) advection");
  if (vorticity && stepper == Stepper::BDF2) throw InvalidSpec("the vorticity co-solve is Crank-Nicolson only");
  if (!(blowup_factor > 1.0)) throw InvalidSpec("blow-up factor must exceed 1");
}

namespace {

CellFunction at_time(const TimeVectorFunction& f, double t) {
  return [&f, t](int, double, double, const Vec2& x) { return f(x[0], x[1], t); };
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// alpha*a + beta*b on a shared pattern
SparseMatrix lin(const SparseMatrix& a, double alpha, const SparseMatrix& b, double beta) {
  SparseMatrix out = a;
  out.combine(alpha, b, beta);
  return out;
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// (grad u0, grad v) with the gradient of u0 by central differences
std::vector<double> gradient_load(const Space& space, const TimeVectorFunction& u0) {
  const Mesh& m = space.mesh();
  const QuadratureRule& rule = triangle_rule();
  std::vector<double> b(space.num_dofs(), 0.0);
  BasisValues bv;
  const double h = 1e-6;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    const auto dofs = space.cell_dofs(c);
    for (int q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q][0], eta = rule.points[q][1];
      const Vec2 x = g.map(xi, eta);
      const Vec2 xp = u0(x[0] + h, x[1], 0.0), xm = u0(x[0] - h, x[1], 0.0);
      const Vec2 yp = u0(x[0], x[1] + h, 0.0), ym = u0(x[0], x[1] - h, 0.0);
      space.eval(c, g, xi, eta, bv);
      const double w = rule.weights[q] * g.det;
      for (int i = 0; i < bv.n; ++i) {
        double s = 0.0;
        for (int k = 0; k < 2; ++k)
          s += (xp[k] - xm[k]) / (2 * h) * bv.grad[i][k][0] + (yp[k] - ym[k]) / (2 * h) * bv.grad[i][k][1];
        b[dofs[i]] += w * s;
      }
    }
  }
  return b;
}

}  // namespace

Simulation::Simulation(std::shared_ptr<const Mesh> mesh, SchemeConfig config)
    : mesh_(std::move(mesh)), cfg_(std::move(config)) {
  cfg_.validate();
  masks_ = cfg_.bc.masks();
  vel_ = build_space(mesh_, velocity_kind(cfg_.pair));
  pres_ = build_space(mesh_, pressure_kind(cfg_.pair));
  mass_ = assemble_mass(*vel_);
  stiff_ = assemble_stiffness(*vel_);
  div_ = assemble_div(*vel_, *pres_);
  if (needs_mean_constraint(*mesh_, masks_)) mean_ = basis_integrals(*pres_);
  constrained_ = constrained_dofs(*vel_, masks_);
  if (cfg_.form == ConvectiveForm::MOD_CONV)
    rec_ = std::make_unique<Reconstructor>(vel_, ReconstructionPlan{cfg_.pair, cfg_.flavor}, masks_);
  if (cfg_.vorticity) {
    wsp_ = build_space(mesh_, ElementKind::ScalarP2);
    wmass_ = assemble_mass(*wsp_);
    wstiff_ = assemble_stiffness(*wsp_);
  }
}

std::vector<std::pair<int, double>> Simulation::constraints_at(double t) const {
  std::vector<std::pair<int, double>> out;
  out.reserve(constrained_.size());
  std::optional<Field> g;
  if (cfg_.bc.inhomogeneous) {
    const TimeVectorFunction& f = cfg_.dirichlet;
    g = interpolate(vel_, VectorFunction([&f, t](double x, double y) { return f(x, y, t); }));
  }
  for (int d : constrained_) {
    const bool data = g && (vel_->dof_info(d).tags & cfg_.bc.inhomogeneous);
    out.emplace_back(d, data ? g->coeffs()[d] : 0.0);
  }
  return out;
}

std::vector<double> Simulation::load_at(double t) const {
  if (!cfg_.force) return std::vector<double>(vel_->num_dofs(), 0.0);
  return assemble_load(*vel_, at_time(cfg_.force, t));
}

Field Simulation::advecting_field(const Field& u_pre) {
  if (rec_) return rec_->reconstruct(u_pre);
  return u_pre;
}

void Simulation::solve_velocity(const SparseMatrix& k, std::vector<double> rhs, double t_new, State& out, int step) {
  if (!all_finite(k.values()) || !all_finite(rhs)) throw BlowUp("non-finite system", step, t_new);
  SaddleSystem sys;
  sys.A = k;
  sys.B = div_;
  sys.mean = mean_;
  sys.rhs_u = std::move(rhs);
  sys.constraints = constraints_at(t_new);
  const Monolithic mono = apply_dirichlet(sys);
  try {
    lu_.factor(mono.matrix);
  } catch (const SingularSystem& e) {
    throw SolverFailure(std::string("step system: ") + e.what());
  }
  std::vector<double> x = lu_.solve(mono.rhs, false);
  if (!all_finite(x)) throw BlowUp("non-finite solution", step, t_new);
  last_residual_ = lu_.last_residual();
  if (!(last_residual_ <= lu_.tolerance()))
    throw SolverFailure("step " + std::to_string(step) + ": relative residual " + std::to_string(last_residual_));
  normalize_pressure(sys, mono, x);
  const int nu = vel_->num_dofs();
  out.u = Field(vel_, std::vector<double>(x.begin(), x.begin() + nu));
  out.p = Field(pres_, std::vector<double>(x.begin() + nu, x.begin() + nu + pres_->num_dofs()));
}

State Simulation::initial_state() {
  State s;
  const bool stokes = cfg_.initial == InitialProjection::Stokes;
  std::vector<double> rhs(vel_->num_dofs(), 0.0);
  if (cfg_.u0) rhs = stokes ? gradient_load(*vel_, cfg_.u0) : assemble_load(*vel_, at_time(cfg_.u0, 0.0));
  // the projection's multiplier is not a pressure; p^0 is reported as zero
  solve_velocity(stokes ? stiff_ : mass_, std::move(rhs), 0.0, s, 0);
  s.p = Field(pres_);
  s.u_prev = s.u;
  if (cfg_.vorticity) {
    wlu_.factor(wmass_);
    s.w = Field(wsp_, wlu_.solve(assemble_curl_load(s.u, *wsp_)));
  }
  e0_ = 0.5 * mass_.dot(s.u.coeffs(), s.u.coeffs());
  last_residual_ = 0.0;
  last_adv_.reset();
  return s;
}

State Simulation::cn_picard_step(const State& s, int passes) {
  const double dt = cfg_.dt, nu = cfg_.nu;
  const double t_new = (s.step + 1) * dt;
  const std::vector<double> f = load_at(s.time + 0.5 * dt);
  // u_pre = u^0 at the first step, the linear extrapolation afterwards
  Field u_pre = s.u;
  if (s.step > 0)
    for (int i = 0; i < u_pre.size(); ++i) u_pre.coeffs()[i] = 1.5 * s.u.coeffs()[i] - 0.5 * s.u_prev.coeffs()[i];
  const SparseMatrix base_lhs = lin(mass_, 1.0 / dt, stiff_, 0.5 * nu);
  const SparseMatrix base_rhs = lin(mass_, 1.0 / dt, stiff_, -0.5 * nu);
  State out;
  for (int pass = 0; pass < passes; ++pass) {
    Field a = advecting_field(u_pre);
    const SparseMatrix n = assemble_convection(cfg_.form, a, *vel_, *vel_);
    const SparseMatrix k = lin(base_lhs, 1.0, n, 0.5);
    const SparseMatrix e = lin(base_rhs, 1.0, n, -0.5);
    std::vector<double> rhs = e.multiply(s.u.coeffs());
    axpy(rhs, 1.0, f);
    solve_velocity(k, std::move(rhs), t_new, out, s.step + 1);
    last_adv_ = std::move(a);
    if (pass + 1 < passes)
      for (int i = 0; i < u_pre.size(); ++i) u_pre.coeffs()[i] = 0.5 * (out.u.coeffs()[i] + s.u.coeffs()[i]);
  }
  out.u_prev = s.u;
  out.step = s.step + 1;
  out.time = t_new;
  return out;
}

State Simulation::bdf2_step(const State& s) {
  if (s.step == 0) return cn_picard_step(s, 1);
  const double dt = cfg_.dt;
  const double t_new = (s.step + 1) * dt;
  Field u_ext = s.u;
  for (int i = 0; i < u_ext.size(); ++i) u_ext.coeffs()[i] = 2.0 * s.u.coeffs()[i] - s.u_prev.coeffs()[i];
  Field a = advecting_field(u_ext);
  const SparseMatrix n = assemble_convection(cfg_.form, a, *vel_, *vel_);
  const SparseMatrix k = lin(lin(mass_, 1.5 / dt, stiff_, cfg_.nu), 1.0, n, 1.0);
  std::vector<double> hist(s.u.size());
  for (int i = 0; i < s.u.size(); ++i) hist[i] = (2.0 * s.u.coeffs()[i] - 0.5 * s.u_prev.coeffs()[i]) / dt;
  std::vector<double> rhs = mass_.multiply(hist);
  axpy(rhs, 1.0, load_at(t_new));
  State out;
  solve_velocity(k, std::move(rhs), t_new, out, s.step + 1);
  last_adv_ = std::move(a);
  out.u_prev = s.u;
  out.step = s.step + 1;
  out.time = t_new;
  return out;
}

Field Simulation::vorticity_costep(const State& s_old, const State& s_new) {
  if (!cfg_.vorticity || !s_old.w) throw InvalidSpec("vorticity co-solve is not enabled");
  if (!last_adv_) throw InvalidSpec("vorticity co-step needs a preceding velocity step");
  const double dt = cfg_.dt, nu = cfg_.nu;
  const SparseMatrix n = assemble_vorticity_operator(*last_adv_, *wsp_);
  const SparseMatrix k = lin(lin(wmass_, 1.0 / dt, wstiff_, 0.5 * nu), 1.0, n, 0.5);
  const SparseMatrix e = lin(lin(wmass_, 1.0 / dt, wstiff_, -0.5 * nu), 1.0, n, -0.5);
  std::vector<double> rhs = e.multiply(s_old.w->coeffs());
  if (cfg_.curl_force) {
    const TimeScalarFunction& cf = cfg_.curl_force;
    const double t = s_old.time + 0.5 * dt;
    axpy(rhs, 1.0, assemble_load(*wsp_, [&cf, t](int, double, double, const Vec2& x) {
           return Vec2{cf(x[0], x[1], t), 0.0};
         }));
  }
  if (!all_finite(k.values()) || !all_finite(rhs)) throw BlowUp("non-finite vorticity system", s_new.step, s_new.time);
  try {
    wlu_.factor(k);
  } catch (const SingularSystem& e) {
    throw SolverFailure(std::string("vorticity system: ") + e.what());
  }
  std::vector<double> w = wlu_.solve(rhs, false);
  if (!all_finite(w)) throw BlowUp("non-finite vorticity", s_new.step, s_new.time);
  if (!(wlu_.last_residual() <= wlu_.tolerance())) throw SolverFailure("vorticity solve residual too large");
  return Field(wsp_, std::move(w));
}

void Simulation::check_state(const State& s) const {
  const double e = 0.5 * mass_.dot(s.u.coeffs(), s.u.coeffs());
  if (!std::isfinite(e) || (e0_ > 0.0 && e > cfg_.blowup_factor * e0_))
    throw BlowUp("kinetic energy " + std::to_string(e) + " left the admissible range", s.step, s.time);
}

State Simulation::step(const State& s) {
  State out;
  switch (cfg_.stepper) {
    case Stepper::CN_PICARD1: out = cn_picard_step(s, 1); break;
    case Stepper::CN_PICARD2: out = cn_picard_step(s, 2); break;
    case Stepper::BDF2: out = bdf2_step(s); break;
  }
  if (cfg_.vorticity) out.w = vorticity_costep(s, out);
  check_state(out);
  return out;
}

DiagnosticsRecord Simulation::diagnose(const State& s) const {
  DiagnosticsRecord r = conserved_quantities(s.u, s.w ? &*s.w : nullptr);
  r.step = s.step;
  r.time = s.time;
  if (cfg_.exact) {
    const TimeVectorFunction& ex = cfg_.exact;
    const double t = s.time;
    r.l2_error = l2_error(s.u, [&ex, t](double x, double y) { return ex(x, y, t); });
  } else {
    r.l2_error = std::nan("");
  }
  r.div_rec_max = last_adv_ ? max_pointwise_divergence(*last_adv_) : 0.0;
  r.solver_residual = last_residual_;
  return r;
}

RunResult Simulation::run(const std::function<void(const State&, const DiagnosticsRecord&)>& observer) {
  RunResult res;
  State s = initial_state();
  res.initial = diagnose(s);
  if (observer) observer(s, res.initial);
  const int n = cfg_.num_steps();
  res.records.reserve(n);
  for (int k = 0; k < n; ++k) {
    try {
      s = step(s);
    } catch (const BlowUp& e) {
      res.blowup = BlowupMarker{e.step, e.time};
      break;
    }
    res.records.push_back(diagnose(s));
    if (observer) observer(s, res.records.back());
  }
  res.final_state = std::move(s);
  return res;
}

RunResult run(std::shared_ptr<const Mesh> mesh, const SchemeConfig& config,
              const std::function<void(const State&, const DiagnosticsRecord&)>& observer) {
  Simulation sim(std::move(mesh), config);
  return sim.run(observer);
}

}  // namespace mconv
