#include "mconv/benchmarks.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "mconv/errors.hpp"

namespace mconv {

namespace exact {

double gresho_speed(double r) {
  if (r <= 0.2) return 5.0 * r;
  if (r <= 0.4) return 2.0 - 5.0 * r;
  return 0.0;
}

Vec2 gresho(double x, double y) {
  const double r = std::hypot(x, y);
  if (r == 0.0) return {0.0, 0.0};
  const double s = gresho_speed(r) / r;
  return {-s * y, s * x};
}

Vec2 lattice(double x, double y, double t, double nu) {
  const double d = std::exp(-8.0 * nu * M_PI * M_PI * t);
  return {d * std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y), d * std::cos(2 * M_PI * x) * std::cos(2 * M_PI * y)};
}

Vec2 mms_velocity(double x, double y, double t) {
  return {std::sin(M_PI * x) * std::sin(M_PI * y + t), std::cos(M_PI * x) * std::cos(M_PI * y + t)};
}

double mms_pressure(double x, double y, double t) {
  const double mean = 2.0 * std::sin(1.0 + t) - std::sin(t) - std::sin(2.0 + t);
  return std::sin(x + y + t) - mean;
}

// f = u_t - nu lap u + (u.grad)u + grad p, worked out by hand:
// lap u = -2 pi^2 u, (u.grad)u = (pi sx cx, -pi S C).
Vec2 mms_force(double x, double y, double t, double nu) {
  const double sx = std::sin(M_PI * x), cx = std::cos(M_PI * x);
  const double s = std::sin(M_PI * y + t), c = std::cos(M_PI * y + t);
  const double gp = std::cos(x + y + t);
  const double k = 2.0 * nu * M_PI * M_PI;
  return {sx * c + k * sx * s + M_PI * sx * cx + gp, -cx * s + k * cx * c - M_PI * s * c + gp};
}

double mms_curl_force(double x, double y, double t, double nu) {
  const double sx = std::sin(M_PI * x);
  return 2.0 * M_PI * sx * std::sin(M_PI * y + t) - 4.0 * nu * M_PI * M_PI * M_PI * sx * std::cos(M_PI * y + t);
}

Vec2 step_inflow(double, double y) { return {y * (10.0 - y) / 25.0, 0.0}; }

}  // namespace exact

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(d)) throw InvalidSpec("--" + key + ": '" + v + "' is not a number");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') throw InvalidSpec("--" + key + ": '" + v + "' is not an integer");
  return i;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidSpec("--" + key + ": '" + v + "' is not a boolean");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Defaults {
  std::optional<int> nx;
  double dt, t_end, nu;
  const char* stepper;
  std::optional<double> target_h;
};

// Chosen so the default p2b step mesh has about 23k velocity+pressure dofs (22738 in the reference setup).
constexpr double kStepTargetH = 0.65;

Defaults defaults_for(const std::string& name) {
  if (name == "gresho") return {48, 0.01, 10.0, 0.0, "cn1", std::nullopt};
  if (name == "lattice") return {64, 0.001, 10.0, 1e-5, "cn1", std::nullopt};
  if (name == "step") return {std::nullopt, 0.01, 80.0, 0.001, "bdf2", kStepTargetH};
  if (name == "mms") return {16, 0.01, 1.0, 1.0, "cn1", std::nullopt};
  throw InvalidSpec("--case: unknown case '" + name + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"case", "pair",      "form",     "nx",   "dt",        "t-end", "nu",
                                                "stepper", "flavor", "vorticity", "target-h", "seed", "vtk-every", "out"};
  return keys;
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& v) {
  if (key == "case") {
    defaults_for(v);
    c.case_name = v;
  } else if (key == "pair") {
    parse_pair(v);
    c.pair = v;
  } else if (key == "form") {
    parse_form(v);
    c.form = v;
  } else if (key == "nx") {
    const long long n = to_int(key, v);
    if (n < 1 || n > 4096) throw InvalidSpec("--nx must be in [1, 4096]");
    c.nx = static_cast<int>(n);
  } else if (key == "dt") {
    c.dt = to_double(key, v);
    if (!(*c.dt > 0.0)) throw InvalidSpec("--dt must be positive");
  } else if (key == "t-end") {
    c.t_end = to_double(key, v);
    if (!(*c.t_end > 0.0)) throw InvalidSpec("--t-end must be positive");
  } else if (key == "nu") {
    c.nu = to_double(key, v);
    if (!(*c.nu >= 0.0)) throw InvalidSpec("--nu must be non-negative");
  } else if (key == "stepper") {
    parse_stepper(v);
    c.stepper = v;
  } else if (key == "flavor") {
    parse_flavor(v);
    c.flavor = v;
  } else if (key == "vorticity") {
    c.vorticity = to_bool(key, v);
  } else if (key == "target-h") {
    c.target_h = to_double(key, v);
    if (!(*c.target_h > 0.0)) throw InvalidSpec("--target-h must be positive");
  } else if (key == "seed") {
    const long long s = to_int(key, v);
    if (s < 0) throw InvalidSpec("--seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "vtk-every") {
    const long long k = to_int(key, v);
    if (k < 0) throw InvalidSpec("--vtk-every must be non-negative");
    c.vtk_every = static_cast<int>(k);
  } else if (key == "out") {
    if (v.empty()) throw InvalidSpec("--out must not be empty");
    c.out = v;
  } else {
    throw InvalidSpec("unknown config key '" + key + "'");
  }
}

RunConfig resolve(const RunConfig& cfg) {
  RunConfig r = cfg;
  const Defaults d = defaults_for(r.case_name);
  if (!r.nx && d.nx) r.nx = d.nx;
  if (!r.dt) r.dt = d.dt;
  if (!r.t_end) r.t_end = d.t_end;
  if (!r.nu) r.nu = d.nu;
  if (!r.stepper) r.stepper = d.stepper;
  if (!r.target_h && d.target_h) r.target_h = d.target_h;
  if (r.case_name == "step") r.nx.reset();
  else r.target_h.reset();
  parse_pair(r.pair);
  parse_form(r.form);
  parse_flavor(r.flavor);
  parse_stepper(*r.stepper);
  return r;
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream o;
  o << "case = " << c.case_name << '\n';
  o << "pair = " << c.pair << '\n';
  o << "form = " << c.form << '\n';
  if (c.nx) o << "nx = " << *c.nx << '\n';
  if (c.dt) o << "dt = " << fmt(*c.dt) << '\n';
  if (c.t_end) o << "t-end = " << fmt(*c.t_end) << '\n';
  if (c.nu) o << "nu = " << fmt(*c.nu) << '\n';
  if (c.stepper) o << "stepper = " << *c.stepper << '\n';
  o << "flavor = " << c.flavor << '\n';
  o << "vorticity = " << (c.vorticity ? "true" : "false") << '\n';
  if (c.target_h) o << "target-h = " << fmt(*c.target_h) << '\n';
  o << "seed = " << c.seed << '\n';
  o << "vtk-every = " << c.vtk_every << '\n';
  o << "out = " << c.out << '\n';
  return o.str();
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidSpec("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

std::shared_ptr<const Mesh> build_mesh(const BenchmarkCase& c) {
  if (c.target_h > 0.0) return std::make_shared<const Mesh>(generate_step_channel(c.domain, c.target_h));
  return std::make_shared<const Mesh>(generate_uniform(c.domain));
}

namespace {

SchemeConfig base_scheme(const RunConfig& r) {
  SchemeConfig s;
  s.form = parse_form(r.form);
  s.pair = parse_pair(r.pair);
  s.flavor = parse_flavor(r.flavor);
  s.stepper = parse_stepper(*r.stepper);
  s.dt = *r.dt;
  s.t_end = *r.t_end;
  s.nu = *r.nu;
  s.vorticity = r.vorticity;
  return s;
}

RunConfig with_case(RunConfig c, const char* name) {
  c.case_name = name;
  return resolve(c);
}

}  // namespace

BenchmarkCase case_gresho(const RunConfig& overrides) {
  const RunConfig r = with_case(overrides, "gresho");
  BenchmarkCase c{"gresho", DomainSpec::gresho(*r.nx), 0.0, base_scheme(r), false};
  c.scheme.bc.no_penetration = tag_bit(BoundaryTag::wall);
  c.scheme.u0 = [](double x, double y, double) { return exact::gresho(x, y); };
  // stationary Euler solution; with viscosity there is no closed form
  if (c.scheme.nu == 0.0) {
    c.scheme.exact = [](double x, double y, double) { return exact::gresho(x, y); };
    c.has_exact = true;
  }
  return c;
}

BenchmarkCase case_lattice(const RunConfig& overrides) {
  const RunConfig r = with_case(overrides, "lattice");
  BenchmarkCase c{"lattice", DomainSpec::unit_square(*r.nx, *r.nx), 0.0, base_scheme(r), true};
  const double nu = c.scheme.nu;
  auto u = [nu](double x, double y, double t) { return exact::lattice(x, y, t, nu); };
  c.scheme.bc.dirichlet = tag_bit(BoundaryTag::wall);
  c.scheme.bc.inhomogeneous = tag_bit(BoundaryTag::wall);
  c.scheme.dirichlet = u;
  c.scheme.u0 = u;
  c.scheme.exact = u;
  c.scheme.initial = InitialProjection::Stokes;
  return c;
}

BenchmarkCase case_step(const RunConfig& overrides) {
  const RunConfig r = with_case(overrides, "step");
  BenchmarkCase c{"step", DomainSpec::step_channel(), *r.target_h, base_scheme(r), false};
  c.scheme.bc.dirichlet = tag_bit(BoundaryTag::wall) | tag_bit(BoundaryTag::inflow);
  c.scheme.bc.inhomogeneous = tag_bit(BoundaryTag::inflow);
  // the profile vanishes at y = 0 and y = 10, so inflow/wall corners agree
  c.scheme.dirichlet = [](double x, double y, double) { return exact::step_inflow(x, y); };
  c.scheme.u0 = c.scheme.dirichlet;
  return c;
}

BenchmarkCase case_mms(const RunConfig& overrides) {
  const RunConfig r = with_case(overrides, "mms");
  BenchmarkCase c{"mms", DomainSpec::unit_square(*r.nx, *r.nx), 0.0, base_scheme(r), true};
  const double nu = c.scheme.nu;
  c.scheme.bc.dirichlet = tag_bit(BoundaryTag::wall);
  c.scheme.bc.inhomogeneous = tag_bit(BoundaryTag::wall);
  c.scheme.dirichlet = [](double x, double y, double t) { return exact::mms_velocity(x, y, t); };
  c.scheme.u0 = c.scheme.dirichlet;
  c.scheme.exact = c.scheme.dirichlet;
  c.scheme.initial = InitialProjection::Stokes;
  c.scheme.force = [nu](double x, double y, double t) { return exact::mms_force(x, y, t, nu); };
  c.scheme.curl_force = [nu](double x, double y, double t) { return exact::mms_curl_force(x, y, t, nu); };
  return c;
}

BenchmarkCase make_case(const RunConfig& cfg) {
  if (cfg.case_name == "gresho") return case_gresho(cfg);
  if (cfg.case_name == "lattice") return case_lattice(cfg);
  if (cfg.case_name == "step") return case_step(cfg);
  if (cfg.case_name == "mms") return case_mms(cfg);
  throw InvalidSpec("--case: unknown case '" + cfg.case_name + "'");
}

}  // namespace mconv
