#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mconv/benchmarks.hpp"
#include "mconv/verify.hpp"

namespace mconv::cli {

/// Process exit codes. Blow-up is a result, solver failure is a bug.
enum ExitCode : int { kOk = 0, kFailedChecks = 1, kUsage = 2, kBlowup = 3, kSolverFailure = 4 };

struct RunOutcome {
  int exit_code = kOk;
  std::string message;  // empty on success
  RunConfig resolved;
  RunResult result;
  int velocity_dofs = 0, pressure_dofs = 0, vorticity_dofs = 0;
  double wall_seconds = 0.0;
};

/// Resolves cfg, runs it and writes <out>/diagnostics.csv, <out>/meta.txt and,
/// if vtk_every > 0, <out>/vtk/step_NNNNNN.vtk. Never throws for run-time
/// failures; InvalidSpec (bad config, unwritable directory) is rethrown.
RunOutcome run_command(const RunConfig& cfg);

/// key=v1,v2,... ; the key must be a config key.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};
SweepAxis parse_axis(const std::string& spec);

/// One subdirectory per point of the cartesian product of the axes, plus
/// summary.csv and, when a form axis contains conv, ratios.csv with the
/// per-step L2-error ratios against the matching conv run.
int sweep_command(const RunConfig& base, const std::vector<SweepAxis>& axes, int jobs, std::ostream& log);

/// Prints the property-suite table; kOk iff every check passes.
int verify_command(const VerifyOptions& opts, std::ostream& log);

/// Artifact version string baked in at configure time.
const char* version();

int main(int argc, char** argv);

}  // namespace mconv::cli
