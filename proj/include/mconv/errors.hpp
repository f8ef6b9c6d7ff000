#pragma once

#include <stdexcept>
#include <string>

namespace mconv {

// Bad construction parameters (mesh sizes, domain bounds, run options).
struct InvalidSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Evaluation outside the reference triangle.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A field or space of the wrong element kind was passed in.
struct KindMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PairingError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConstraintConflict : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularSystem : std::runtime_error {
  SingularSystem(const std::string& what, long row) : std::runtime_error(what), row(row) {}
  long row;
};

// Linear solve failed or exceeded the residual bound.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlowUp : std::runtime_error {
  BlowUp(const std::string& what, int step, double time)
      : std::runtime_error(what), step(step), time(time) {}
  int step;
  double time;
};

}  // namespace mconv
