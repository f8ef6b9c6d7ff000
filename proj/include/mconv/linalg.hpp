#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mconv {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix. Column indices are strictly increasing per row.
/// Explicit zeros are kept, so matrices assembled over the same cell loop share
/// one pattern and can be combined value-wise.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Entry (i, j); zero when not stored.
  double at(int i, int j) const;

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;
  double dot(std::span<const double> x, std::span<const double> y) const;  // x^T A y

  double norm_inf() const;
  SparseMatrix transpose() const;
  bool same_pattern(const SparseMatrix& other) const;

  /// this = this * alpha + other * beta; patterns must match.
  void combine(double alpha, const SparseMatrix& other, double beta);

  std::vector<std::vector<double>> to_dense() const;

  friend SparseMatrix assemble_finalize(int rows, int cols, std::vector<Triplet> triplets);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// Sums duplicates; the result does not depend on triplet order.
SparseMatrix assemble_finalize(int rows, int cols, std::vector<Triplet> triplets);

/// Velocity/pressure saddle problem before boundary conditions.
/// Monolithic layout: [A  -B^T; B  0]. When `mean` is set the pressure is only
/// fixed up to a constant: one pressure dof is pinned to zero (its continuity
/// row is redundant) and normalize_pressure() shifts the solution to m.p = 0.
/// A dense mean-value row would be equivalent but ruins the LU fill.
struct SaddleSystem {
  SparseMatrix A;                      // n_u x n_u
  SparseMatrix B;                      // n_p x n_u
  std::optional<std::vector<double>> mean;  // length n_p
  std::vector<double> rhs_u;
  std::vector<double> rhs_p;           // empty means zero
  std::vector<std::pair<int, double>> constraints;  // velocity dof -> value
};

struct Monolithic {
  SparseMatrix matrix;
  std::vector<double> rhs;
  int n_u = 0;
  int n_p = 0;
  bool has_mean = false;
  int pinned = -1;  // pressure dof pinned to zero, when has_mean
};

/// Symmetric elimination of the velocity constraints.
Monolithic apply_dirichlet(const SaddleSystem& system);

/// Shifts the pressure block of a monolithic solution to zero weighted mean.
void normalize_pressure(const SaddleSystem& system, const Monolithic& mono, std::vector<double>& x);

/// Sparse LU (UMFPACK) with cached symbolic analysis.
class LuSolver {
 public:
  LuSolver();
  ~LuSolver();
  LuSolver(const LuSolver&) = delete;
  LuSolver& operator=(const LuSolver&) = delete;
  LuSolver(LuSolver&&) noexcept;
  LuSolver& operator=(LuSolver&&) noexcept;

  /// Numeric factorization; the symbolic step is redone only when the pattern changes.
  void factor(const SparseMatrix& matrix);
  /// With check unset the residual is only recorded, so callers can tell a
  /// non-finite result (instability) from an inaccurate one.
  std::vector<double> solve(std::span<const double> b, bool check = true);
  double tolerance() const { return tolerance_; }

  /// Relative residual of the last solve.
  double last_residual() const { return last_residual_; }
  void set_residual_tolerance(double tol) { tolerance_ = tol; }
  int symbolic_count() const { return symbolic_count_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double last_residual_ = 0.0;
  double tolerance_ = 1e-10;
  int symbolic_count_ = 0;
};

/// One-shot convenience wrapper.
std::vector<double> lu_solve(const SparseMatrix& matrix, std::span<const double> b);

/// ||Mx - b||_inf / (||M||_inf ||x||_inf + ||b||_inf)
double relative_residual(const SparseMatrix& m, std::span<const double> x, std::span<const double> b);

}  // namespace mconv
