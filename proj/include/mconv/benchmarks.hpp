#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "mconv/timestepping.hpp"

namespace mconv {

/// Analytic reference fields used by the cases.
namespace exact {
/// Stationary Gresho vortex: three-branch radial speed profile.
Vec2 gresho(double x, double y);
double gresho_speed(double r);
/// Decaying lattice vortex u0 * exp(-8 nu pi^2 t).
Vec2 lattice(double x, double y, double t, double nu);
/// Manufactured solution on the unit square and the matching data.
Vec2 mms_velocity(double x, double y, double t);
double mms_pressure(double x, double y, double t);
Vec2 mms_force(double x, double y, double t, double nu);
double mms_curl_force(double x, double y, double t, double nu);
/// Parabolic step-channel inflow (y(10-y)/25, 0).
Vec2 step_inflow(double x, double y);
}  // namespace exact

/// Flat run description; field names mirror the CLI flags. Unset optionals take
/// the case defaults in resolve().
struct RunConfig {
  std::string case_name = "gresho";
  std::string pair = "p2b";
  std::string form = "modconv";
  std::optional<int> nx;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<double> nu;
  std::optional<std::string> stepper;
  std::string flavor = "l2";
  bool vorticity = false;
  std::optional<double> target_h;  // step channel only
  std::uint64_t seed = 1;
  int vtk_every = 0;
  std::string out = "out";

  bool operator==(const RunConfig&) const = default;
};

/// Fills every optional with the case default; validates names and ranges.
RunConfig resolve(const RunConfig& cfg);

/// key = value lines, one per set field, values at full precision.
std::string to_config_text(const RunConfig& cfg);
/// Parses the config format: '#' comments, blank lines, key = value. Unknown
/// keys and malformed values throw InvalidSpec naming the key.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
/// Applies one key/value pair (the CLI reuses this for flags).
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
/// All keys accepted in config files.
const std::vector<std::string>& config_keys();

struct BenchmarkCase {
  std::string name;
  DomainSpec domain;
  double target_h = 0.0;  // > 0 selects the step-channel generator
  SchemeConfig scheme;
  bool has_exact = false;
};

std::shared_ptr<const Mesh> build_mesh(const BenchmarkCase& c);

/// Cases with their defaults, then the overrides of `cfg` applied.
BenchmarkCase case_gresho(const RunConfig& overrides = {});
BenchmarkCase case_lattice(const RunConfig& overrides = {});
BenchmarkCase case_step(const RunConfig& overrides = {});
BenchmarkCase case_mms(const RunConfig& overrides = {});
/// Dispatches on cfg.case_name.
BenchmarkCase make_case(const RunConfig& cfg);

}  // namespace mconv
