#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mconv/benchmarks.hpp"

namespace mconv {

/// Per-sample reconstruction metrics for a discretely divergence-free u.
struct ReconstructionSample {
  double skew = 0.0;       // max |N + N^T| over interior dof pairs / max(1, |Pi u|_inf)
  double divergence = 0.0; // max pointwise |div Pi u| / |u|_H1
  double stability = 0.0;  // |Pi u|_L2 / |u|_L2
};

/// Draws `count` seeded fields from V_h^0 on the mesh (walls: zero normal trace)
/// and evaluates the metrics; `rule` is used for the convection matrix only.
std::vector<ReconstructionSample> reconstruction_samples(std::shared_ptr<const Mesh> mesh, ElementPair pair,
                                                         std::uint64_t seed, int count,
                                                         const QuadratureRule& rule = triangle_rule());

/// max_n |E_n - E_0| / E_0 over a run.
double max_relative_energy_drift(const RunResult& r);

/// L2/H1 errors of the final state of a run against the case's exact velocity.
struct FinalErrors {
  double l2 = 0.0;
  double h1 = 0.0;
};
FinalErrors final_errors(const RunResult& r, const SchemeConfig& cfg);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int quad_degree = 8;  // lowered only for fault injection
  int samples = 5;
};

/// The fast property suite behind `mconv verify` (well under a minute).
std::vector<CheckResult> run_property_suite(const VerifyOptions& opts);

/// One aligned line per check.
std::string format_check(const CheckResult& c);

}  // namespace mconv
