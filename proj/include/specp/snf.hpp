#pragma once

// Exact linear algebra over Z and Z/p^K: Smith normal form, invariant
// factors of finitely presented abelian groups, subquotient structure,
// and the Schur multiplier of finite abelian p-groups.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "specp/fp.hpp"

namespace specp {

using boost::multiprecision::cpp_int;

// Invariant-factor decomposition d1 | d2 | ... | dk (each > 1) plus free rank.
struct AbelianStructure {
  std::vector<long long> factors;
  int free_rank = 0;

  bool trivial() const { return factors.empty() && free_rank == 0; }

  cpp_int order() const {
    if (free_rank != 0) throw std::logic_error("order of infinite group");
    cpp_int o = 1;
    for (long long f : factors) o *= f;
    return o;
  }

  // log_p of the order, when every factor is a power of p.
  int p_exponent(int p) const {
    int e = 0;
    for (long long f : factors) {
      long long x = f;
      while (x % p == 0) { x /= p; ++e; }
      if (x != 1) throw std::logic_error("factor not a p-power");
    }
    return e;
  }

  long long exponent() const { return factors.empty() ? 1 : factors.back(); }

  int rank_of(long long f) const {
    return static_cast<int>(std::count(factors.begin(), factors.end(), f));
  }

  bool elementary(int p) const {
    return free_rank == 0 &&
           std::all_of(factors.begin(), factors.end(), [&](long long f) { return f == p; });
  }

  bool operator==(const AbelianStructure& o) const {
    return factors == o.factors && free_rank == o.free_rank;
  }
  bool operator!=(const AbelianStructure& o) const { return !(*this == o); }

  std::string str() const {
    if (trivial()) return "1";
    std::ostringstream os;
    // group equal factors: Z_d^k
    std::size_t i = 0;
    bool first = true;
    while (i < factors.size()) {
      std::size_t j = i;
      while (j < factors.size() && factors[j] == factors[i]) ++j;
      if (!first) os << " x ";
      os << "Z" << factors[i];
      if (j - i > 1) os << "^" << (j - i);
      first = false;
      i = j;
    }
    if (free_rank > 0) {
      if (!first) os << " x ";
      os << "Z^" << free_rank;
    }
    return os.str();
  }
};

namespace detail {

inline bool mat_is_zero(const std::vector<std::vector<cpp_int>>& m) {
  for (const auto& r : m)
    for (const auto& v : r)
      if (v != 0) return false;
  return true;
}

}  // namespace detail

struct SnfResult {
  std::vector<cpp_int> diagonal;  // d1 | d2 | ..., nonzero entries only
  AbelianStructure cokernel;      // of the map presented by the input rows
  // transforms U * M * V = S, present when requested
  std::optional<std::vector<std::vector<cpp_int>>> left;
  std::optional<std::vector<std::vector<cpp_int>>> right;
};

// Smith normal form of an integer matrix (rows = relations).  Pivot choice
// is minimal |entry|, ties broken lexicographically.
inline SnfResult smith_normal_form(std::vector<std::vector<cpp_int>> m,
                                   bool want_transforms = false) {
  const int nr = static_cast<int>(m.size());
  const int nc = nr ? static_cast<int>(m[0].size()) : 0;
  std::vector<std::vector<cpp_int>> U, V;
  if (want_transforms) {
    U.assign(nr, std::vector<cpp_int>(nr, 0));
    V.assign(nc, std::vector<cpp_int>(nc, 0));
    for (int i = 0; i < nr; ++i) U[i][i] = 1;
    for (int i = 0; i < nc; ++i) V[i][i] = 1;
  }
  auto row_op = [&](int dst, int src, const cpp_int& f) {
    for (int j = 0; j < nc; ++j) m[dst][j] += f * m[src][j];
    if (want_transforms)
      for (int j = 0; j < nr; ++j) U[dst][j] += f * U[src][j];
  };
  auto col_op = [&](int dst, int src, const cpp_int& f) {
    for (int i = 0; i < nr; ++i) m[i][dst] += f * m[i][src];
    if (want_transforms)
      for (int i = 0; i < nc; ++i) V[i][dst] += f * V[i][src];
  };
  auto row_swap = [&](int a, int b) {
    std::swap(m[a], m[b]);
    if (want_transforms) std::swap(U[a], U[b]);
  };
  auto col_swap = [&](int a, int b) {
    for (int i = 0; i < nr; ++i) std::swap(m[i][a], m[i][b]);
    if (want_transforms)
      for (int i = 0; i < nc; ++i) std::swap(V[i][a], V[i][b]);
  };

  int t = 0;
  const int steps = std::min(nr, nc);
  while (t < steps) {
    // locate smallest nonzero entry in the trailing block
    int pi = -1, pj = -1;
    cpp_int best = 0;
    for (int i = t; i < nr; ++i)
      for (int j = t; j < nc; ++j) {
        if (m[i][j] == 0) continue;
        cpp_int a = abs(m[i][j]);
        if (pi < 0 || a < best) { best = a; pi = i; pj = j; }
      }
    if (pi < 0) break;
    row_swap(t, pi);
    col_swap(t, pj);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < nr; ++i) {
        if (m[i][t] == 0) continue;
        cpp_int q = m[i][t] / m[t][t];
        row_op(i, t, -q);
        if (m[i][t] != 0) {  // remainder smaller than pivot: swap up
          row_swap(t, i);
          clean = false;
        }
      }
      for (int j = t + 1; j < nc; ++j) {
        if (m[t][j] == 0) continue;
        cpp_int q = m[t][j] / m[t][t];
        col_op(j, t, -q);
        if (m[t][j] != 0) {
          col_swap(t, j);
          clean = false;
        }
      }
    }
    // pivot must divide the rest of the block
    bool divides = true;
    for (int i = t + 1; i < nr && divides; ++i)
      for (int j = t + 1; j < nc; ++j)
        if (m[i][j] % m[t][t] != 0) {
          row_op(t, i, 1);
          divides = false;
          break;
        }
    if (!divides) continue;
    if (m[t][t] < 0) {
      for (int j = 0; j < nc; ++j) m[t][j] = -m[t][j];
      if (want_transforms)
        for (int j = 0; j < nr; ++j) U[t][j] = -U[t][j];
    }
    ++t;
  }

  SnfResult res;
  for (int i = 0; i < t; ++i) res.diagonal.push_back(m[i][i]);
  for (const auto& dcpp : res.diagonal) {
    if (dcpp == 1) continue;
    res.cokernel.factors.push_back(static_cast<long long>(dcpp));
  }
  res.cokernel.free_rank = nc - t;
  if (want_transforms) {
    res.left = std::move(U);
    res.right = std::move(V);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Sparse echelon form over Z/p^K with p-adic pivoting (Howell-style closure).
// Used as the workhorse for large presented abelian p-groups: the cokernel
// of the row lattice in Z^n equals the cokernel mod p^K whenever the group's
// exponent divides p^(K-1), which is verified after the fact.
// ---------------------------------------------------------------------------

using SparseRow = std::vector<std::pair<int, long long>>;  // (col, value), col-sorted

class SparseEchelon {
 public:
  // col_rank: optional permutation rank per column; lower rank is eliminated
  // first.  Defaults to the identity.
  SparseEchelon(int ncols, int p, int K, std::vector<int> col_rank = {})
      : ncols_(ncols), p_(p), K_(K) {
    q_ = 1;
    for (int i = 0; i < K; ++i) {
      if (q_ > (1LL << 40)) throw std::overflow_error("p^K too large");
      q_ *= p;
    }
    if (col_rank.empty()) {
      rank_of_col_.resize(ncols);
      std::iota(rank_of_col_.begin(), rank_of_col_.end(), 0);
    } else {
      assert(static_cast<int>(col_rank.size()) == ncols);
      rank_of_col_ = std::move(col_rank);
    }
    col_of_rank_.assign(ncols, -1);
    for (int c = 0; c < ncols; ++c) col_of_rank_[rank_of_col_[c]] = c;
    pivot_row_.assign(ncols, -1);
  }

  int ncols() const { return ncols_; }
  long long modulus() const { return q_; }
  int prime() const { return p_; }
  int precision() const { return K_; }
  int npivots() const { return npivots_; }

  void add_row(const SparseRow& r) { insert_(to_internal_(r)); }

  // Membership residual; empty result means the row lies in the span.
  SparseRow reduce(const SparseRow& r) const {
    Row w = to_internal_(r);
    Row residual;
    std::size_t i = 0;
    while (i < w.size()) {
      auto [j, v] = w[i];
      int pr = pivot_row_[col_of_rank_[j]];
      if (pr < 0) { residual.push_back(w[i]); ++i; continue; }
      const Row& b = rows_[pr];
      long long pb = b.front().second;  // p^a, normalized
      long long quo = v / pb;
      if (quo != 0) axpy_(w, b, q_ - mulmod_(quo, 1), i);
      if (i < w.size() && w[i].first == j) {
        if (w[i].second != 0) residual.push_back(w[i]);
        ++i;
      }
    }
    return from_internal_(residual);
  }

  bool contains(const SparseRow& r) const { return reduce(r).empty(); }

  // Back-substitute into canonical (fully reduced) form.
  void compact() {
    std::vector<int> order;  // pivot ranks ascending
    for (int rk = 0; rk < ncols_; ++rk)
      if (pivot_row_[col_of_rank_[rk]] >= 0) order.push_back(rk);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Row& row = rows_[pivot_row_[col_of_rank_[*it]]];
      std::size_t i = 1;
      while (i < row.size()) {
        auto [j, v] = row[i];
        int pr = pivot_row_[col_of_rank_[j]];
        if (pr < 0) { ++i; continue; }
        long long pb = rows_[pr].front().second;
        long long quo = v / pb;
        if (quo != 0) axpy_(row, rows_[pr], q_ - quo % q_, i);
        if (i < row.size() && row[i].first == j) ++i;
      }
    }
  }

  // Invariant factors of (Z/p^K)^n / rowspan (equivalently of Z^n / L when
  // the true exponent divides p^(K-1)).  Call compact() first.
  AbelianStructure cokernel() const {
    // columns not killed by a unit pivot
    std::vector<int> bad;
    std::map<int, int> bad_idx;
    for (int c = 0; c < ncols_; ++c) {
      int pr = pivot_row_[c];
      if (pr >= 0 && rows_[pr].front().second == 1) continue;
      bad_idx[c] = static_cast<int>(bad.size());
      bad.push_back(c);
    }
    const int nb = static_cast<int>(bad.size());
    std::vector<std::vector<cpp_int>> small;
    for (int c : bad) {
      int pr = pivot_row_[c];
      if (pr < 0) continue;
      std::vector<cpp_int> row(nb, 0);
      for (auto [rk, v] : rows_[pr]) {
        int col = col_of_rank_[rk];
        auto it = bad_idx.find(col);
        // entries at unit-pivot columns vanish after compact()
        if (it != bad_idx.end()) row[it->second] = v;
      }
      small.push_back(std::move(row));
    }
    for (int i = 0; i < nb; ++i) {
      std::vector<cpp_int> row(nb, 0);
      row[i] = q_;
      small.push_back(std::move(row));
    }
    if (nb == 0) return AbelianStructure{};
    return smith_normal_form(std::move(small)).cokernel;
  }

  // True when every invariant factor is < p^K, i.e. the chosen precision
  // provably captured the integral cokernel.
  bool precision_ok(const AbelianStructure& s) const {
    return s.free_rank == 0 && (s.factors.empty() || s.factors.back() < q_);
  }

  // Basis rows in column coordinates, sorted by pivot rank.
  std::vector<SparseRow> extracted_rows() const {
    std::vector<SparseRow> out;
    for (int rk = 0; rk < ncols_; ++rk) {
      int pr = pivot_row_[col_of_rank_[rk]];
      if (pr >= 0) out.push_back(from_internal_(rows_[pr]));
    }
    return out;
  }

  // Leading (lowest-rank) column of a basis row given in column coordinates.
  int leading_rank(const SparseRow& r) const {
    int best = ncols_;
    for (auto [c, v] : r)
      if (v != 0) best = std::min(best, rank_of_col_[c]);
    return best;
  }

 private:
  using Row = std::vector<std::pair<int, long long>>;  // (rank, value)

  int ncols_;
  int p_;
  int K_;
  long long q_;
  std::vector<int> rank_of_col_, col_of_rank_;
  std::vector<Row> rows_;
  std::vector<int> pivot_row_;  // by column id
  int npivots_ = 0;

  long long mulmod_(long long a, long long b) const {
    return static_cast<long long>((static_cast<__int128>(a) * b) % q_);
  }

  int val_(long long v) const {
    int a = 0;
    while (v % p_ == 0) { v /= p_; ++a; }
    return a;
  }

  long long inv_unit_(long long u) const {
    // u invertible mod q_ = p^K; extended euclid
    long long t = 0, newt = 1, r = q_, newr = u % q_;
    while (newr != 0) {
      long long qq = r / newr;
      long long tmp = t - qq * newt;
      t = newt; newt = tmp;
      tmp = r - qq * newr;
      r = newr; newr = tmp;
    }
    if (r != 1) throw std::logic_error("non-unit in inv_unit_");
    return ((t % q_) + q_) % q_;
  }

  Row to_internal_(const SparseRow& r) const {
    std::map<int, long long> acc;
    for (auto [c, v] : r) {
      long long m = ((v % q_) + q_) % q_;
      if (m) {
        long long& slot = acc[rank_of_col_[c]];
        slot = (slot + m) % q_;
      }
    }
    Row out;
    out.reserve(acc.size());
    for (auto [rk, v] : acc)
      if (v) out.emplace_back(rk, v);
    return out;
  }

  SparseRow from_internal_(const Row& r) const {
    SparseRow out;
    out.reserve(r.size());
    for (auto [rk, v] : r) out.emplace_back(col_of_rank_[rk], v);
    std::sort(out.begin(), out.end());
    return out;
  }

  // w += f * b, merging sorted rows; `from` is the index in w where the
  // leading merge should begin (entries before it are already settled).
  void axpy_(Row& w, const Row& b, long long f, std::size_t from = 0) const {
    f %= q_;
    if (f < 0) f += q_;
    if (f == 0) return;
    Row out;
    out.reserve(w.size() + b.size());
    out.insert(out.end(), w.begin(), w.begin() + from);
    std::size_t i = from, k = 0;
    while (i < w.size() || k < b.size()) {
      if (k >= b.size() || (i < w.size() && w[i].first < b[k].first)) {
        out.push_back(w[i++]);
      } else if (i >= w.size() || b[k].first < w[i].first) {
        long long v = mulmod_(f, b[k].second);
        if (v) out.emplace_back(b[k].first, v);
        ++k;
      } else {
        long long v = (w[i].second + mulmod_(f, b[k].second)) % q_;
        if (v) out.emplace_back(w[i].first, v);
        ++i; ++k;
      }
    }
    w = std::move(out);
  }

  void scale_(Row& w, long long f) const {
    for (auto& [c, v] : w) v = mulmod_(v, f);
    w.erase(std::remove_if(w.begin(), w.end(),
                           [](const auto& e) { return e.second == 0; }),
            w.end());
  }

  void insert_(Row w) {
    std::vector<Row> work;
    work.push_back(std::move(w));
    while (!work.empty()) {
      Row cur = std::move(work.back());
      work.pop_back();
      while (!cur.empty()) {
        auto [j, v] = cur.front();
        int col = col_of_rank_[j];
        int a = val_(v);
        if (pivot_row_[col] < 0) {
          // new pivot: normalize leading coefficient to p^a
          long long pa = 1;
          for (int i = 0; i < a; ++i) pa *= p_;
          scale_(cur, inv_unit_(v / pa));
          rows_.push_back(cur);
          pivot_row_[col] = static_cast<int>(rows_.size()) - 1;
          ++npivots_;
          if (a > 0) {
            // Howell closure: p^(K-a) * row has zero leading term
            Row closure = cur;
            long long f = 1;
            for (int i = 0; i < K_ - a; ++i) f *= p_;
            scale_(closure, f);
            if (!closure.empty()) work.push_back(std::move(closure));
          }
          break;
        }
        Row& b = rows_[pivot_row_[col]];
        long long pb = b.front().second;
        int ab = val_(pb);
        if (a >= ab) {
          axpy_(cur, b, q_ - (v / pb) % q_);
        } else {
          // incoming row has the better pivot: swap it in
          long long pa = 1;
          for (int i = 0; i < a; ++i) pa *= p_;
          scale_(cur, inv_unit_(v / pa));
          Row old = std::move(b);
          rows_[pivot_row_[col]] = cur;
          Row closure = cur;
          long long f = 1;
          for (int i = 0; i < K_ - a; ++i) f *= p_;
          scale_(closure, f);
          if (!closure.empty()) work.push_back(std::move(closure));
          long long pf = 1;
          for (int i = 0; i < ab - a; ++i) pf *= p_;
          axpy_(old, cur, q_ - pf);
          cur = std::move(old);
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Finitely presented abelian groups.
// ---------------------------------------------------------------------------

struct PresentedAbelianGroup {
  int n = 0;                       // generator count
  std::vector<SparseRow> relations;

  void add_relation(SparseRow r) { relations.push_back(std::move(r)); }

  std::vector<std::vector<cpp_int>> dense() const {
    std::vector<std::vector<cpp_int>> m(relations.size(), std::vector<cpp_int>(n, 0));
    for (std::size_t i = 0; i < relations.size(); ++i)
      for (auto [c, v] : relations[i]) m[i][c] += v;
    return m;
  }

  // Structure via integer SNF; fine for small presentations.
  AbelianStructure structure() const {
    if (relations.empty()) return AbelianStructure{{}, n};
    return smith_normal_form(dense()).cokernel;
  }

  // Structure via the Z/p^K fast path, raising K until certified.
  AbelianStructure structure_mod(int p, int K0 = 4) const {
    for (int K = K0; K <= 24; K += 4) {
      SparseEchelon ech(n, p, K);
      for (const auto& r : relations) ech.add_row(r);
      ech.compact();
      AbelianStructure s = ech.cokernel();
      if (ech.precision_ok(s)) return s;
    }
    throw std::runtime_error("structure_mod: exponent exceeds supported precision");
  }
};

// Structure of the subgroup of G generated by `gens` (rows in the ambient
// generator lattice), computed by relation augmentation: the subgroup on m
// generators has relation lattice {c : sum c_i g_i in L}.  Rows of the
// augmented Howell basis supported entirely on the tag columns are exactly
// that lattice mod p^K.
inline AbelianStructure structure_of_subquotient(const PresentedAbelianGroup& g,
                                                 const std::vector<SparseRow>& gens,
                                                 int p, int K0 = 4) {
  const int m = static_cast<int>(gens.size());
  if (m == 0) return AbelianStructure{};
  const int n = g.n;
  for (int K = K0; K <= 24; K += 4) {
    SparseEchelon ech(n + m, p, K);  // ambient columns eliminate first
    for (const auto& r : g.relations) ech.add_row(r);
    for (int i = 0; i < m; ++i) {
      SparseRow row = gens[i];
      row.emplace_back(n + i, 1);
      ech.add_row(row);
    }
    ech.compact();
    PresentedAbelianGroup sub;
    sub.n = m;
    for (const auto& row : ech.extracted_rows()) {
      if (ech.leading_rank(row) < n) continue;
      SparseRow tags;
      for (auto [c, v] : row) tags.emplace_back(c - n, v);
      sub.add_relation(std::move(tags));
    }
    SparseEchelon sech(m, p, K);
    for (const auto& r : sub.relations) sech.add_row(r);
    sech.compact();
    AbelianStructure s = sech.cokernel();
    if (sech.precision_ok(s)) return s;
  }
  throw std::runtime_error("structure_of_subquotient: precision exhausted");
}

// Schur multiplier of Z_{p^m1} + ... + Z_{p^mk} with m1 >= ... >= mk:
// the direct sum over i >= 2 of (i-1) copies of Z_{p^mi}.
inline AbelianStructure multiplier_abelian(const std::vector<int>& m, int p) {
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m[i] > m[i - 1]) throw std::invalid_argument("exponents must be non-increasing");
  for (int e : m)
    if (e < 1) throw std::invalid_argument("exponents must be >= 1");
  std::vector<long long> factors;
  for (std::size_t i = 1; i < m.size(); ++i) {
    long long f = 1;
    for (int t = 0; t < m[i]; ++t) f *= p;
    for (std::size_t c = 0; c < i; ++c) factors.push_back(f);
  }
  std::sort(factors.begin(), factors.end());
  return AbelianStructure{std::move(factors), 0};
}

}  // namespace specp
