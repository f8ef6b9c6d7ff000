#include <algorithm>
#include <cmath>
#include <bit>
#include <cstdint>
#include <string>

#include "mconv/errors.hpp"
#include "mconv/linalg.hpp"

namespace mconv {

namespace {

// IEEE total order as a signed integer key; well-defined for NaN as well.
std::int64_t total_order_key(double v) {
  const auto bits = std::bit_cast<std::int64_t>(v);
  return bits < 0 ? bits ^ INT64_MAX : bits;
}

}  // namespace

SparseMatrix assemble_finalize(int rows, int cols, std::vector<Triplet> triplets) {
  if (rows < 0 || cols < 0) throw InvalidSpec("negative matrix dimensions");
  for (const auto& t : triplets)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw IndexError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) + ") out of range");
  // Bucket by row (counting sort), then order each row by (col, value). Using
  // the value as last key (IEEE total order) makes the summation order of
  // duplicates canonical instead of following insertion order.
  std::vector<std::size_t> start(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& t : triplets) ++start[t.row + 1];
  for (int r = 0; r < rows; ++r) start[r + 1] += start[r];
  std::vector<Triplet> sorted(triplets.size());
  {
    std::vector<std::size_t> pos(start.begin(), start.end() - 1);
    for (const auto& t : triplets) sorted[pos[t.row]++] = t;
  }
  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (int r = 0; r < rows; ++r) {
    const auto b = sorted.begin() + start[r], e = sorted.begin() + start[r + 1];
    std::sort(b, e, [](const Triplet& x, const Triplet& y) {
      if (x.col != y.col) return x.col < y.col;
      return total_order_key(x.value) < total_order_key(y.value);
    });
    for (auto it = b; it != e;) {
      const int c = it->col;
      double sum = 0.0;
      while (it != e && it->col == c) sum += (it++)->value;
      m.col_idx_.push_back(c);
      m.values_.push_back(sum);
    }
    m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
  }
  return m;
}

double SparseMatrix::at(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw IndexError("matrix index out of range");
  const auto b = col_idx_.begin() + row_ptr_[i];
  const auto e = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? values_[it - col_idx_.begin()] : 0.0;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[r] = s;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  std::vector<double> y(cols_, 0.0);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * x[r];
  return y;
}

double SparseMatrix::dot(std::span<const double> x, std::span<const double> y) const {
  double s = 0.0;
  for (int r = 0; r < rows_; ++r) {
    double t = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t += values_[k] * y[col_idx_[k]];
    s += x[r] * t;
  }
  return s;
}

double SparseMatrix::norm_inf() const {
  double m = 0.0;
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(values_[k]);
    m = std::max(m, s);
  }
  return m;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  std::vector<int> count(cols_ + 1, 0);
  for (int c : col_idx_) ++count[c + 1];
  for (int c = 0; c < cols_; ++c) count[c + 1] += count[c];
  t.row_ptr_ = count;
  t.col_idx_.resize(col_idx_.size());
  t.values_.resize(values_.size());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int p = count[col_idx_[k]]++;
      t.col_idx_[p] = r;
      t.values_[p] = values_[k];
    }
  return t;
}

bool SparseMatrix::same_pattern(const SparseMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && row_ptr_ == o.row_ptr_ && col_idx_ == o.col_idx_;
}

void SparseMatrix::combine(double alpha, const SparseMatrix& other, double beta) {
  if (!same_pattern(other)) throw KindMismatch("combine needs identical sparsity patterns");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] = alpha * values_[k] + beta * other.values_[k];
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
  std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d[r][col_idx_[k]] += values_[k];
  return d;
}

Monolithic apply_dirichlet(const SaddleSystem& s) {
  const int nu = s.A.rows();
  const int np = s.B.rows();
  if (s.A.cols() != nu || s.B.cols() != nu) throw InvalidSpec("saddle blocks have inconsistent sizes");
  if (static_cast<int>(s.rhs_u.size()) != nu) throw InvalidSpec("velocity right-hand side has wrong length");
  if (!s.rhs_p.empty() && static_cast<int>(s.rhs_p.size()) != np)
    throw InvalidSpec("pressure right-hand side has wrong length");
  const bool has_mean = s.mean.has_value();
  if (has_mean && static_cast<int>(s.mean->size()) != np) throw InvalidSpec("mean row has wrong length");

  std::vector<char> fixed(nu, 0);
  std::vector<double> value(nu, 0.0);
  for (const auto& [dof, v] : s.constraints) {
    if (dof < 0 || dof >= nu) throw IndexError("constraint dof " + std::to_string(dof) + " out of range");
    if (fixed[dof]) {
      if (std::abs(value[dof] - v) > 1e-14)
        throw ConstraintConflict("dof " + std::to_string(dof) + " constrained to two different values");
      continue;
    }
    fixed[dof] = 1;
    value[dof] = v;
  }

  const int n = nu + np;
  Monolithic out;
  out.n_u = nu;
  out.n_p = np;
  out.has_mean = has_mean;
  int pin = -1;
  if (has_mean) {
    pin = static_cast<int>(std::max_element(s.mean->begin(), s.mean->end(),
                                            [](double a, double b) { return std::abs(a) < std::abs(b); }) -
                           s.mean->begin());
    if (np == 0 || (*s.mean)[pin] == 0.0) throw InvalidSpec("mean row is identically zero");
    out.pinned = pin;
  }
  out.rhs.assign(n, 0.0);
  for (int i = 0; i < nu; ++i) out.rhs[i] = s.rhs_u[i];
  for (int i = 0; i < np && !s.rhs_p.empty(); ++i) out.rhs[nu + i] = s.rhs_p[i];

  const SparseMatrix bt = s.B.transpose();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(s.A.nnz()) + 2 * s.B.nnz() + (has_mean ? 2 * np : 0) + nu);
  const auto& ap = s.A.row_ptr();
  const auto& ai = s.A.col_idx();
  const auto& av = s.A.values();
  for (int r = 0; r < nu; ++r) {
    for (int k = ap[r]; k < ap[r + 1]; ++k) {
      const int c = ai[k];
      if (fixed[r] || fixed[c]) {
        // keep the position so the pattern never changes between steps
        t.push_back({r, c, r == c ? 1.0 : 0.0});
        if (!fixed[r] && fixed[c]) out.rhs[r] -= av[k] * value[c];
      } else {
        t.push_back({r, c, av[k]});
      }
    }
    if (fixed[r] && !std::binary_search(ai.begin() + ap[r], ai.begin() + ap[r + 1], r))
      t.push_back({r, r, 1.0});
  }
  const auto& tp = bt.row_ptr();
  const auto& ti = bt.col_idx();
  const auto& tv = bt.values();
  for (int r = 0; r < nu; ++r)
    for (int k = tp[r]; k < tp[r + 1]; ++k)
      t.push_back({r, nu + ti[k], fixed[r] || ti[k] == pin ? 0.0 : -tv[k]});
  const auto& bp = s.B.row_ptr();
  const auto& bi = s.B.col_idx();
  const auto& bv = s.B.values();
  for (int r = 0; r < np; ++r)
    for (int k = bp[r]; k < bp[r + 1]; ++k) {
      const int c = bi[k];
      if (r == pin) {
        t.push_back({nu + r, c, 0.0});
      } else if (fixed[c]) {
        out.rhs[nu + r] -= bv[k] * value[c];
        t.push_back({nu + r, c, 0.0});
      } else {
        t.push_back({nu + r, c, bv[k]});
      }
    }
  if (has_mean) {
    t.push_back({nu + pin, nu + pin, 1.0});
    out.rhs[nu + pin] = 0.0;
  }
  for (int i = 0; i < nu; ++i)
    if (fixed[i]) out.rhs[i] = value[i];
  out.matrix = assemble_finalize(n, n, std::move(t));
  return out;
}

double relative_residual(const SparseMatrix& m, std::span<const double> x, std::span<const double> b) {
  const std::vector<double> r = m.multiply(x);
  double rn = 0.0, xn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    rn = std::max(rn, std::abs(r[i] - b[i]));
    bn = std::max(bn, std::abs(b[i]));
  }
  for (double v : x) xn = std::max(xn, std::abs(v));
  const double den = m.norm_inf() * xn + bn;
  if (!std::isfinite(rn)) return rn;
  return den > 0.0 ? rn / den : rn;
}

void normalize_pressure(const SaddleSystem& s, const Monolithic& mono, std::vector<double>& x) {
  if (!mono.has_mean) return;
  const auto& m = *s.mean;
  double dot = 0.0, total = 0.0;
  for (int i = 0; i < mono.n_p; ++i) {
    dot += m[i] * x[mono.n_u + i];
    total += m[i];
  }
  // the constant pressure mode has unit coefficients in all supported spaces
  const double shift = dot / total;
  for (int i = 0; i < mono.n_p; ++i) x[mono.n_u + i] -= shift;
}

}  // namespace mconv
