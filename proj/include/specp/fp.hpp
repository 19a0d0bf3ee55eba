#pragma once

// Small dense linear algebra over the prime field F_p.
// Rows are std::vector<int> with entries normalized to [0, p).

#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace specp {

using FpRow = std::vector<int>;

inline int fp_norm(long long v, int p) {
  long long m = v % p;
  return static_cast<int>(m < 0 ? m + p : m);
}

inline int fp_inv(int a, int p) {
  a = fp_norm(a, p);
  if (a == 0) throw std::domain_error("fp_inv: zero has no inverse");
  // extended euclid
  int t = 0, newt = 1, r = p, newr = a;
  while (newr != 0) {
    int q = r / newr;
    int tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  return fp_norm(t, p);
}

// Row-reduced span of F_p rows.  Tie-breaking is always "leftmost pivot
// first", so bases extracted from the same span are identical.
class FpSpan {
 public:
  FpSpan(int ncols, int p) : ncols_(ncols), p_(p) {}

  int ncols() const { return ncols_; }
  int prime() const { return p_; }
  int dim() const { return static_cast<int>(rows_.size()); }
  const std::vector<FpRow>& rows() const { return rows_; }
  const std::vector<int>& pivots() const { return pivots_; }

  // Reduce v against the current basis; returns the residual.
  FpRow reduce(FpRow v) const {
    assert(static_cast<int>(v.size()) == ncols_);
    for (auto& x : v) x = fp_norm(x, p_);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      int c = pivots_[k];
      if (v[c] == 0) continue;
      int f = v[c];
      for (int j = 0; j < ncols_; ++j)
        v[j] = fp_norm(v[j] - static_cast<long long>(f) * rows_[k][j], p_);
    }
    return v;
  }

  // Insert a vector; returns true if it enlarged the span.
  bool add(FpRow v) {
    v = reduce(std::move(v));
    int c = 0;
    while (c < ncols_ && v[c] == 0) ++c;
    if (c == ncols_) return false;
    int inv = fp_inv(v[c], p_);
    for (auto& x : v) x = fp_norm(static_cast<long long>(x) * inv, p_);
    // clear column c in existing rows, then insert keeping pivot order
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      int f = rows_[k][c];
      if (f == 0) continue;
      for (int j = 0; j < ncols_; ++j)
        rows_[k][j] = fp_norm(rows_[k][j] - static_cast<long long>(f) * v[j], p_);
    }
    std::size_t pos = 0;
    while (pos < pivots_.size() && pivots_[pos] < c) ++pos;
    rows_.insert(rows_.begin() + pos, std::move(v));
    pivots_.insert(pivots_.begin() + pos, c);
    return true;
  }

  bool contains(const FpRow& v) const {
    FpRow res = reduce(v);
    for (int x : res)
      if (x != 0) return false;
    return true;
  }

 private:
  int ncols_;
  int p_;
  std::vector<FpRow> rows_;    // reduced row echelon, unit pivots
  std::vector<int> pivots_;
};

inline FpSpan fp_span(const std::vector<FpRow>& rows, int ncols, int p) {
  FpSpan s(ncols, p);
  for (const auto& r : rows) s.add(r);
  return s;
}

inline int fp_span_dim(const std::vector<FpRow>& rows, int ncols, int p) {
  return fp_span(rows, ncols, p).dim();
}

// Basis of the right kernel {v : M v = 0} of a row-major matrix.
inline std::vector<FpRow> fp_kernel(const std::vector<FpRow>& mat, int ncols, int p) {
  FpSpan s = fp_span(mat, ncols, p);
  std::vector<char> is_pivot(ncols, 0);
  for (int c : s.pivots()) is_pivot[c] = 1;
  std::vector<FpRow> ker;
  for (int c = 0; c < ncols; ++c) {
    if (is_pivot[c]) continue;
    FpRow v(ncols, 0);
    v[c] = 1;
    for (int k = 0; k < s.dim(); ++k)
      v[s.pivots()[k]] = fp_norm(-s.rows()[k][c], p);
    ker.push_back(std::move(v));
  }
  return ker;
}

// dim(A ∩ B) = dim A + dim B - dim(A + B)
inline int fp_intersection_dim(const FpSpan& a, const FpSpan& b) {
  assert(a.ncols() == b.ncols() && a.prime() == b.prime());
  FpSpan sum(a.ncols(), a.prime());
  for (const auto& r : a.rows()) sum.add(r);
  for (const auto& r : b.rows()) sum.add(r);
  return a.dim() + b.dim() - sum.dim();
}

}  // namespace specp
