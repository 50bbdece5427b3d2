#pragma once

#include "lcs/integer.hpp"

#include <algorithm>
#include <cassert>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace lcs {

/// Dense row-major matrix of exact integers.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::vector<long long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      assert(r.size() == cols_);
      for (long long v : r) data_.emplace_back(v);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<std::vector<Integer>>& rows, std::size_t cols) {
    IntMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      assert(rows[i].size() == cols);
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<Integer> row(std::size_t r) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
  }

  void append_row(const std::vector<Integer>& r) {
    assert(r.size() == cols_ || rows_ == 0);
    if (rows_ == 0) cols_ = r.size();
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }

  bool row_is_zero(std::size_t r) const {
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(r, j) != 0) return false;
    return true;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return x == 0; });
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  /// row[dst] += k * row[src]
  void add_row(std::size_t dst, std::size_t src, const Integer& k) {
    if (k == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += k * (*this)(src, j);
  }
  /// col[dst] += k * col[src]
  void add_col(std::size_t dst, std::size_t src, const Integer& k) {
    if (k == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += k * (*this)(i, src);
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
  }
  void negate_col(std::size_t c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = -(*this)(i, c);
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    assert(a.cols_ == b.rows_);
    IntMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
      os << (i ? "; " : "");
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
    }
    os << ']';
    return os.str();
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

/// row vector times matrix
inline std::vector<Integer> row_times(const std::vector<Integer>& v, const IntMatrix& m) {
  assert(v.size() == m.rows());
  std::vector<Integer> out(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
  }
  return out;
}

/// Invariant factor decomposition of a finitely generated abelian group.
/// Divisors ascend along the divisibility chain; 0 entries (free factors) come last.
struct AbelianInvariants {
  std::vector<Integer> divisors;

  std::size_t rank() const {
    return static_cast<std::size_t>(std::count(divisors.begin(), divisors.end(), Integer(0)));
  }
  bool is_trivial() const { return divisors.empty(); }
  bool is_finite() const { return rank() == 0; }
  /// Order of the torsion part.
  Integer torsion_order() const {
    Integer n = 1;
    for (const auto& d : divisors)
      if (d != 0) n *= d;
    return n;
  }
  std::vector<long long> as_ll() const {
    std::vector<long long> out;
    for (const auto& d : divisors) out.push_back(to_ll(d));
    return out;
  }
  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < divisors.size(); ++i) os << (i ? "," : "") << divisors[i];
    os << ']';
    return os.str();
  }
  friend bool operator==(const AbelianInvariants&, const AbelianInvariants&) = default;
};

struct HermiteForm {
  IntMatrix h;  ///< row echelon, positive pivots, entries above pivots reduced into [0, pivot)
  IntMatrix u;  ///< unimodular, u * m == h
  std::vector<std::size_t> pivot_cols;  ///< pivot column of each nonzero row of h
};

/// Canonical row Hermite normal form.
inline HermiteForm hermite_normal_form(const IntMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  IntMatrix h = m;
  IntMatrix u = IntMatrix::identity(rows);
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    // gcd-eliminate column c below row r
    while (true) {
      std::optional<std::size_t> best;
      for (std::size_t i = r; i < rows; ++i) {
        if (h(i, c) == 0) continue;
        if (!best || abs(h(i, c)) < abs(h(*best, c))) best = i;
      }
      if (!best) break;
      h.swap_rows(r, *best);
      u.swap_rows(r, *best);
      bool done = true;
      for (std::size_t i = r + 1; i < rows; ++i) {
        if (h(i, c) == 0) continue;
        Integer q = floor_div(h(i, c), h(r, c));
        h.add_row(i, r, -q);
        u.add_row(i, r, -q);
        if (h(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (h(r, c) == 0) continue;
    if (h(r, c) < 0) {
      h.negate_row(r);
      u.negate_row(r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      Integer q = floor_div(h(i, c), h(r, c));
      h.add_row(i, r, -q);
      u.add_row(i, r, -q);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(h), std::move(u), std::move(pivots)};
}

struct SmithForm {
  IntMatrix d;      ///< diagonal, d_i | d_{i+1}, nonnegative
  IntMatrix p;      ///< unimodular rows x rows
  IntMatrix q;      ///< unimodular cols x cols, p * m * q == d
  IntMatrix q_inv;  ///< inverse of q
};

inline SmithForm smith_normal_form(const IntMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  IntMatrix d = m;
  IntMatrix p = IntMatrix::identity(rows);
  IntMatrix q = IntMatrix::identity(cols);
  IntMatrix qi = IntMatrix::identity(cols);

  auto col_add = [&](std::size_t dst, std::size_t src, const Integer& k) {
    d.add_col(dst, src, k);
    q.add_col(dst, src, k);
    qi.add_row(src, dst, -k);
  };
  auto col_swap = [&](std::size_t a, std::size_t b) {
    d.swap_cols(a, b);
    q.swap_cols(a, b);
    qi.swap_rows(a, b);
  };
  auto row_add = [&](std::size_t dst, std::size_t src, const Integer& k) {
    d.add_row(dst, src, k);
    p.add_row(dst, src, k);
  };

  const std::size_t n = std::min(rows, cols);
  for (std::size_t t = 0; t < n; ++t) {
    while (true) {
      // smallest nonzero entry of the trailing block goes to (t, t)
      std::optional<std::pair<std::size_t, std::size_t>> best;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          if (d(i, j) == 0) continue;
          if (!best || abs(d(i, j)) < abs(d(best->first, best->second))) best = {i, j};
        }
      if (!best) break;
      d.swap_rows(t, best->first);
      p.swap_rows(t, best->first);
      col_swap(t, best->second);

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (d(i, t) == 0) continue;
        row_add(i, t, -floor_div(d(i, t), d(t, t)));
        if (d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (d(t, j) == 0) continue;
        col_add(j, t, -floor_div(d(t, j), d(t, t)));
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // enforce divisibility of the trailing block by the pivot
      std::optional<std::size_t> bad_row;
      for (std::size_t i = t + 1; i < rows && !bad_row; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (d(i, j) % d(t, t) != 0) {
            bad_row = i;
            break;
          }
      if (!bad_row) break;
      row_add(t, *bad_row, 1);
    }
    if (d(t, t) < 0) {
      d.negate_row(t);
      p.negate_row(t);
    }
  }
  return {std::move(d), std::move(p), std::move(q), std::move(qi)};
}

/// Invariant factors of Z^ngens / rowspace(relations), unit factors dropped.
inline AbelianInvariants abelian_invariants(const IntMatrix& relations, std::size_t ngens) {
  AbelianInvariants out;
  if (relations.rows() == 0) {
    out.divisors.assign(ngens, 0);
    return out;
  }
  assert(relations.cols() == ngens);
  SmithForm s = smith_normal_form(relations);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < std::min(relations.rows(), ngens); ++i) {
    const Integer& v = s.d(i, i);
    if (v == 0) continue;
    ++nonzero;
    if (v != 1) out.divisors.push_back(v);
  }
  for (std::size_t i = nonzero; i < ngens; ++i) out.divisors.push_back(0);
  return out;
}

/// Basis (as rows) of the left integer kernel {x : x * m == 0}.
inline IntMatrix integer_kernel(const IntMatrix& m) {
  HermiteForm hf = hermite_normal_form(m);
  IntMatrix out(0, m.rows());
  for (std::size_t i = hf.pivot_cols.size(); i < m.rows(); ++i) out.append_row(hf.u.row(i));
  if (out.rows() == 0) return IntMatrix(0, m.rows());
  return out;
}

/// Repeated left solves x * m == v against one matrix (HNF computed once).
class LeftSolver {
 public:
  explicit LeftSolver(const IntMatrix& m) : cols_(m.cols()), hf_(hermite_normal_form(m)) {}

  std::optional<std::vector<Integer>> solve(const std::vector<Integer>& v) const {
    assert(v.size() == cols_);
    std::vector<Integer> y(hf_.u.rows());
    std::vector<Integer> residual = v;
    for (std::size_t r = 0; r < hf_.pivot_cols.size(); ++r) {
      const std::size_t c = hf_.pivot_cols[r];
      if (residual[c] % hf_.h(r, c) != 0) return std::nullopt;
      y[r] = residual[c] / hf_.h(r, c);
      if (y[r] != 0)
        for (std::size_t j = c; j < cols_; ++j) residual[j] -= y[r] * hf_.h(r, j);
    }
    for (const auto& x : residual)
      if (x != 0) return std::nullopt;
    return row_times(y, hf_.u);
  }

 private:
  std::size_t cols_;
  HermiteForm hf_;
};

/// Integer solution x of x * m == v, if one exists.
inline std::optional<std::vector<Integer>> solve_left(const IntMatrix& m, const std::vector<Integer>& v) {
  return LeftSolver(m).solve(v);
}

/// Determinant by fraction-free (Bareiss) elimination.
inline Integer determinant(const IntMatrix& u) {
  const std::size_t n = u.rows();
  assert(n == u.cols());
  if (n == 0) return 1;
  IntMatrix a = u;
  Integer sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && a(s, k) == 0) ++s;
      if (s == n) return 0;
      a.swap_rows(k, s);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

}  // namespace lcs
