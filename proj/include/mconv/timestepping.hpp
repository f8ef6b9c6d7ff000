#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mconv/assembly.hpp"
#include "mconv/diagnostics.hpp"
#include "mconv/reconstruction.hpp"

namespace mconv {

enum class Stepper { CN_PICARD1, CN_PICARD2, BDF2 };

std::string to_string(Stepper s);
/// Accepts cn1, cn2, bdf2.
Stepper parse_stepper(const std::string& name);

/// (x, y, t) -> vector
using TimeVectorFunction = std::function<Vec2(double x, double y, double t)>;
using TimeScalarFunction = std::function<double(double x, double y, double t)>;

/// Per-tag boundary treatment. Tags in neither mask are do-nothing boundaries.
struct BoundaryRecipe {
  std::uint8_t dirichlet = 0;       // all components prescribed by SchemeConfig::dirichlet
  std::uint8_t no_penetration = 0;  // u.n = 0 on axis-aligned edges, tangential part free
  std::uint8_t inhomogeneous = 0;   // constrained tags with nonzero data (e.g. inflow)

  ConstraintMasks masks() const;
};

/// How u0 is brought into the discretely divergence-free space. The Stokes
/// (H1) variant is consistent with the discrete viscous operator and keeps
/// Crank-Nicolson from carrying undamped stiff-mode start-up errors.
enum class InitialProjection { L2, Stokes };

struct SchemeConfig {
  ConvectiveForm form = ConvectiveForm::MOD_CONV;
  ElementPair pair = ElementPair::P2BubbleP1Disc;
  ProjectionFlavor flavor = ProjectionFlavor::L2;  // Taylor-Hood reconstruction only
  Stepper stepper = Stepper::CN_PICARD1;
  double dt = 0.01;
  double t_end = 1.0;
  double nu = 0.0;
  BoundaryRecipe bc;
  TimeVectorFunction dirichlet;   // required when bc.inhomogeneous is set
  TimeVectorFunction force;       // empty means f = 0
  TimeScalarFunction curl_force;  // curl f for the vorticity co-step; empty means 0
  TimeVectorFunction u0;          // empty means zero initial data
  TimeVectorFunction exact;       // optional; fills l2_error
  bool vorticity = false;
  InitialProjection initial = InitialProjection::L2;
  double blowup_factor = 1e6;     // energy growth over E(0) treated as blow-up

  int num_steps() const;
  /// Throws InvalidSpec on inconsistent settings.
  void validate() const;
};

struct State {
  Field u, u_prev, p;
  std::optional<Field> w;
  int step = 0;
  double time = 0.0;
};

struct RunResult {
  DiagnosticsRecord initial;               // the t = 0 state (not written to CSV)
  std::vector<DiagnosticsRecord> records;  // one per completed step
  std::optional<BlowupMarker> blowup;
  State final_state;
};

/// Owns the spaces, the time-independent matrices and the factorization
/// caches of one run. Not shareable between threads.
class Simulation {
 public:
  Simulation(std::shared_ptr<const Mesh> mesh, SchemeConfig config);

  const SchemeConfig& config() const { return cfg_; }
  const std::shared_ptr<const Space>& velocity_space() const { return vel_; }
  const std::shared_ptr<const Space>& pressure_space() const { return pres_; }
  const std::shared_ptr<const Space>& vorticity_space() const { return wsp_; }

  /// u_h^0: discretely divergence-free projection (L2 or Stokes) of u0 with
  /// the boundary data at t = 0.
  State initial_state();

  /// One step of the configured scheme (BDF2 bootstraps with a CN step at n = 0).
  /// Throws BlowUp on non-finite or runaway states, SolverFailure otherwise.
  State step(const State& s);

  State cn_picard_step(const State& s, int passes);
  State bdf2_step(const State& s);
  /// Advances w with the advecting field used by the last velocity step.
  Field vorticity_costep(const State& s_old, const State& s_new);

  DiagnosticsRecord diagnose(const State& s) const;

  /// Steps to t_end. Blow-up is reported through the marker, not thrown.
  /// The observer also sees the initial state (step 0), which is not recorded.
  RunResult run(const std::function<void(const State&, const DiagnosticsRecord&)>& observer = {});

 private:
  Field advecting_field(const Field& u_pre);
  std::vector<std::pair<int, double>> constraints_at(double t) const;
  std::vector<double> load_at(double t) const;
  void solve_velocity(const SparseMatrix& k, std::vector<double> rhs, double t_new, State& out, int step);
  void check_state(const State& s) const;

  std::shared_ptr<const Mesh> mesh_;
  SchemeConfig cfg_;
  ConstraintMasks masks_;
  std::shared_ptr<const Space> vel_, pres_, wsp_;
  std::unique_ptr<Reconstructor> rec_;
  SparseMatrix mass_, stiff_, div_;
  std::optional<std::vector<double>> mean_;
  std::vector<int> constrained_;
  LuSolver lu_, wlu_;
  SparseMatrix wmass_, wstiff_;
  std::optional<Field> last_adv_;  // advecting field of the last velocity solve
  double last_residual_ = 0.0;
  double e0_ = 0.0;
};

/// Convenience: build, initialise and run.
RunResult run(std::shared_ptr<const Mesh> mesh, const SchemeConfig& config,
              const std::function<void(const State&, const DiagnosticsRecord&)>& observer = {});

}  // namespace mconv
