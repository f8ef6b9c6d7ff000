#include <umfpack.h>

#include <cmath>
#include <string>

#include "mconv/errors.hpp"
#include "mconv/linalg.hpp"

namespace mconv {

// CSR storage of M is CSC storage of M^T; every UMFPACK call below works on
// M^T and solves with UMFPACK_At.
struct LuSolver::Impl {
  void* symbolic = nullptr;
  void* numeric = nullptr;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  SparseMatrix copy;
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];

  Impl() { umfpack_di_defaults(control); }
  ~Impl() { release(); }

  void release_numeric() {
    if (numeric) umfpack_di_free_numeric(&numeric);
    numeric = nullptr;
  }
  void release() {
    release_numeric();
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
    symbolic = nullptr;
  }
};

LuSolver::LuSolver() : impl_(std::make_unique<Impl>()) {}
LuSolver::~LuSolver() = default;
LuSolver::LuSolver(LuSolver&&) noexcept = default;
LuSolver& LuSolver::operator=(LuSolver&&) noexcept = default;

void LuSolver::factor(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidSpec("LU needs a square matrix");
  Impl& s = *impl_;
  const int n = m.rows();
  s.release_numeric();
  if (!s.symbolic || s.row_ptr != m.row_ptr() || s.col_idx != m.col_idx()) {
    if (s.symbolic) umfpack_di_free_symbolic(&s.symbolic);
    s.symbolic = nullptr;
    s.row_ptr = m.row_ptr();
    s.col_idx = m.col_idx();
    const int st = umfpack_di_symbolic(n, n, s.row_ptr.data(), s.col_idx.data(), m.values().data(), &s.symbolic,
                                       s.control, s.info);
    if (st != UMFPACK_OK) throw SolverFailure("symbolic analysis failed (status " + std::to_string(st) + ")");
    ++symbolic_count_;
  }
  const int st = umfpack_di_numeric(s.row_ptr.data(), s.col_idx.data(), m.values().data(), s.symbolic, &s.numeric,
                                    s.control, s.info);
  if (st == UMFPACK_WARNING_singular_matrix) {
    int row = -1;
    {
      std::vector<int> q(n);
      std::vector<double> d(n);
      int do_recip = 0;
      umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, q.data(), d.data(),
                             &do_recip, nullptr, s.numeric);
      for (int k = 0; k < n; ++k)
        if (d[k] == 0.0) {
          row = q[k];  // column of M^T = row of M
          break;
        }
    }
    s.release_numeric();
    throw SingularSystem("matrix is singular at row " + std::to_string(row), row);
  }
  if (st != UMFPACK_OK) throw SolverFailure("numeric factorization failed (status " + std::to_string(st) + ")");
  s.copy = m;
}

std::vector<double> LuSolver::solve(std::span<const double> b, bool check) {
  Impl& s = *impl_;
  if (!s.numeric) throw SolverFailure("solve called before a successful factorization");
  const int n = s.copy.rows();
  if (static_cast<int>(b.size()) != n) throw InvalidSpec("right-hand side has wrong length");
  std::vector<double> x(n, 0.0);
  const int st = umfpack_di_solve(UMFPACK_At, s.row_ptr.data(), s.col_idx.data(), s.copy.values().data(), x.data(),
                                  b.data(), s.numeric, s.control, s.info);
  if (st != UMFPACK_OK && st != UMFPACK_WARNING_singular_matrix)
    throw SolverFailure("triangular solve failed (status " + std::to_string(st) + ")");
  last_residual_ = relative_residual(s.copy, x, b);
  if (check && !(last_residual_ <= tolerance_))
    throw SolverFailure("relative residual " + std::to_string(last_residual_) + " exceeds tolerance");
  return x;
}

std::vector<double> lu_solve(const SparseMatrix& matrix, std::span<const double> b) {
  LuSolver lu;
  lu.factor(matrix);
  return lu.solve(b);
}

}  // namespace mconv
