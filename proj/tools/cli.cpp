#include "mconv/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mconv/errors.hpp"

#ifndef MCONV_VERSION
#define MCONV_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace mconv::cli {

const char* version() { return MCONV_VERSION; }

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string secs(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_meta(const RunOutcome& o, const std::string& path, bool finished) {
  std::ofstream f(path);
  if (!f) throw InvalidSpec("--out: cannot write '" + path + "'");
  f << to_config_text(o.resolved);
  f << "# velocity_dofs = " << o.velocity_dofs << '\n';
  f << "# pressure_dofs = " << o.pressure_dofs << '\n';
  if (o.vorticity_dofs > 0) f << "# vorticity_dofs = " << o.vorticity_dofs << '\n';
  f << "# version = " << version() << '\n';
  if (finished) {
    f << "# wall_seconds = " << fmt(o.wall_seconds) << '\n';
    f << "# exit_code = " << o.exit_code << '\n';
  }
}

}  // namespace

RunOutcome run_command(const RunConfig& cfg) {
  RunOutcome o;
  o.resolved = resolve(cfg);
  const BenchmarkCase c = make_case(o.resolved);
  c.scheme.validate();

  const fs::path out(o.resolved.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw InvalidSpec("--out: cannot create directory '" + out.string() + "'");
  if (o.resolved.vtk_every > 0) fs::create_directories(out / "vtk", ec);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    Simulation sim(build_mesh(c), c.scheme);
    o.velocity_dofs = sim.velocity_space()->num_dofs();
    o.pressure_dofs = sim.pressure_space()->num_dofs();
    if (sim.vorticity_space()) o.vorticity_dofs = sim.vorticity_space()->num_dofs();
    // written up front so an unwritable directory fails before any work
    write_meta(o, (out / "meta.txt").string(), false);

    const int every = o.resolved.vtk_every;
    o.result = sim.run([&](const State& s, const DiagnosticsRecord&) {
      if (every > 0 && s.step % every == 0) {
        char name[32];
        std::snprintf(name, sizeof name, "step_%06d.vtk", s.step);
        export_vtk(s.u, s.p, (out / "vtk" / name).string());
      }
    });
    if (o.result.blowup) {
      o.exit_code = kBlowup;
      o.message = "blow-up at step " + std::to_string(o.result.blowup->step) + " t=" + fmt(o.result.blowup->time);
    }
  } catch (const SolverFailure& e) {
    o.exit_code = kSolverFailure;
    o.message = std::string("solver failure: ") + e.what();
  }
  o.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_csv(o.result.records, (out / "diagnostics.csv").string(), o.result.blowup);
  write_meta(o, (out / "meta.txt").string(), true);
  return o;
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidSpec("--axis: expected key=v1,v2,... got '" + spec + "'");
  SweepAxis a;
  a.key = spec.substr(0, eq);
  bool known = false;
  for (const auto& k : config_keys()) known = known || k == a.key;
  if (!known || a.key == "out") throw InvalidSpec("--axis: '" + a.key + "' is not a sweepable key");
  std::stringstream ss(spec.substr(eq + 1));
  for (std::string v; std::getline(ss, v, ',');)
    if (!v.empty()) a.values.push_back(v);
  if (a.values.empty()) throw InvalidSpec("--axis " + a.key + ": no values");
  // check every value up front rather than failing halfway through
  RunConfig probe;
  for (const auto& v : a.values) set_config_value(probe, a.key, v);
  return a;
}

namespace {

struct SweepPoint {
  std::vector<std::string> values;  // one per axis
  std::string name;
  RunConfig cfg;
  RunOutcome outcome;
};

const char* status_name(int code) {
  switch (code) {
    case kOk: return "ok";
    case kBlowup: return "blowup";
    case kSolverFailure: return "solver_failure";
    default: return "invalid";
  }
}

}  // namespace

int sweep_command(const RunConfig& base, const std::vector<SweepAxis>& axes, int jobs, std::ostream& log) {
  if (axes.empty()) throw InvalidSpec("--axis: at least one axis is required");
  if (jobs < 1) throw InvalidSpec("--jobs must be at least 1");

  std::vector<SweepPoint> points(1);
  for (const auto& axis : axes) {
    std::vector<SweepPoint> next;
    for (const auto& p : points)
      for (const auto& v : axis.values) {
        SweepPoint q = p;
        q.values.push_back(v);
        q.name += (q.name.empty() ? "" : "_") + axis.key + "=" + v;
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  const fs::path root(base.out);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw InvalidSpec("--out: cannot create directory '" + root.string() + "'");
  for (auto& p : points) {
    p.cfg = base;
    for (std::size_t k = 0; k < axes.size(); ++k) set_config_value(p.cfg, axes[k].key, p.values[k]);
    p.cfg.out = (root / p.name).string();
  }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < points.size();) {
      SweepPoint& p = points[i];
      try {
        p.outcome = run_command(p.cfg);
      } catch (const std::exception& e) {
        p.outcome.exit_code = kUsage;
        p.outcome.message = e.what();
      }
      std::lock_guard lock(log_mutex);
      log << p.name << ": " << status_name(p.outcome.exit_code) << " (" << p.outcome.result.records.size()
          << " steps, " << secs(p.outcome.wall_seconds) << " s)"
          << (p.outcome.message.empty() ? "" : " " + p.outcome.message) << '\n';
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(jobs, static_cast<int>(points.size()));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // per-step error ratios against the conv run that shares all other axis values
  std::size_t form_axis = axes.size();
  for (std::size_t k = 0; k < axes.size(); ++k)
    if (axes[k].key == "form") form_axis = k;
  std::map<std::size_t, double> max_dev;
  std::ofstream ratios;
  if (form_axis < axes.size()) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const SweepPoint& p = points[i];
      if (p.values[form_axis] == "conv") continue;
      const SweepPoint* ref = nullptr;
      for (const auto& q : points) {
        if (q.values[form_axis] != "conv") continue;
        bool same = true;
        for (std::size_t k = 0; k < axes.size(); ++k) same = same && (k == form_axis || q.values[k] == p.values[k]);
        if (same) ref = &q;
      }
      if (!ref) continue;
      if (!ratios.is_open()) {
        ratios.open(root / "ratios.csv");
        ratios << "run,reference,step,time,ratio\n";
      }
      const auto& a = p.outcome.result.records;
      const auto& b = ref->outcome.result.records;
      double dev = 0.0;
      for (std::size_t s = 0; s < std::min(a.size(), b.size()); ++s) {
        const double r = a[s].l2_error / b[s].l2_error;
        ratios << p.name << ',' << ref->name << ',' << a[s].step << ',' << fmt(a[s].time) << ',' << fmt(r) << '\n';
        if (std::isfinite(r)) dev = std::max(dev, std::abs(r - 1.0));
      }
      max_dev[i] = dev;
    }
  }

  std::ofstream summary(root / "summary.csv");
  if (!summary) throw InvalidSpec("--out: cannot write '" + (root / "summary.csv").string() + "'");
  summary << "run";
  for (const auto& a : axes) summary << ',' << a.key;
  summary << ",status,exit_code,steps,final_time,kinetic_energy,energy_drift,l2_error,momentum_x,momentum_y,"
             "angular_momentum,enstrophy,total_vorticity,div_rec_max,max_abs_ratio_minus_1,wall_seconds\n";
  int code = kOk;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& p = points[i];
    const RunResult& r = p.outcome.result;
    summary << p.name;
    for (const auto& v : p.values) summary << ',' << v;
    summary << ',' << status_name(p.outcome.exit_code) << ',' << p.outcome.exit_code << ',' << r.records.size();
    if (r.records.empty()) {
      summary << ",,,,,,,,,,,";
    } else {
      const DiagnosticsRecord& f = r.records.back();
      const double e0 = r.initial.kinetic_energy;
      summary << ',' << fmt(f.time) << ',' << fmt(f.kinetic_energy) << ','
              << (e0 > 0.0 ? fmt(std::abs(f.kinetic_energy - e0) / e0) : "") << ',' << fmt(f.l2_error) << ','
              << fmt(f.momentum_x) << ',' << fmt(f.momentum_y) << ',' << fmt(f.angular_momentum) << ','
              << fmt(f.enstrophy) << ',' << fmt(f.total_vorticity) << ',' << fmt(f.div_rec_max) << ','
              << (max_dev.count(i) ? fmt(max_dev[i]) : "");
    }
    summary << ',' << fmt(p.outcome.wall_seconds) << '\n';
    if (p.outcome.exit_code == kSolverFailure || p.outcome.exit_code == kUsage) code = p.outcome.exit_code;
  }
  for (const auto& [i, dev] : max_dev) log << "max |ratio - 1| " << points[i].name << ": " << fmt(dev) << '\n';
  // blow-ups are results, not sweep failures
  return code;
}

int verify_command(const VerifyOptions& opts, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  bool all = true;
  for (const auto& c : run_property_suite(opts)) {
    log << format_check(c) << '\n';
    all = all && c.pass;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log << (all ? "all checks passed" : "some checks FAILED") << " (seed " << opts.seed << ", quadrature degree "
      << opts.quad_degree << ", " << secs(elapsed) << " s)\n";
  return all ? kOk : kFailedChecks;
}

namespace {

// One string option per config key; applied after --config so flags win.
struct RunFlags {
  std::map<std::string, std::string> values;
  std::string config;

  void add_to(CLI::App& app) {
    app.add_option("--config", config, "config file (key = value lines, e.g. a meta.txt)");
    for (const auto& key : config_keys()) app.add_option("--" + key, values[key]);
  }

  RunConfig build(const CLI::App& app) const {
    RunConfig c;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw InvalidSpec("--config: cannot read '" + config + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      c = parse_config_text(ss.str());
    }
    for (const auto& key : config_keys())
      if (app.count("--" + key) > 0) set_config_value(c, key, values.at(key));
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mconv: finite element Navier-Stokes with a reconstructed convective term"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  RunFlags run_flags, sweep_flags;
  CLI::App* run = app.add_subcommand("run", "run one benchmark case");
  run_flags.add_to(*run);

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_flags.add_to(*sweep);
  std::vector<std::string> axis_specs;
  int jobs = 1;
  sweep->add_option("--axis", axis_specs, "key=v1,v2,... (repeat for a cartesian product)")->required();
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  CLI::App* verify = app.add_subcommand("verify", "run the property suite");
  VerifyOptions vopts;
  verify->add_option("--seed", vopts.seed, "root seed of the random fields");
  verify->add_option("--quad-degree", vopts.quad_degree, "quadrature degree of the convection matrix")
      ->check(CLI::Range(1, 8));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) {
      const RunOutcome o = run_command(run_flags.build(*run));
      std::cout << o.resolved.out << ": " << o.result.records.size() << " steps, " << o.velocity_dofs << "+"
                << o.pressure_dofs << " dofs, " << secs(o.wall_seconds) << " s\n";
      if (!o.message.empty()) std::cerr << o.message << '\n';
      return o.exit_code;
    }
    if (*sweep) {
      std::vector<SweepAxis> axes;
      for (const auto& s : axis_specs) axes.push_back(parse_axis(s));
      return sweep_command(sweep_flags.build(*sweep), axes, jobs, std::cout);
    }
    return verify_command(vopts, std::cout);
  } catch (const InvalidSpec& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace mconv::cli
