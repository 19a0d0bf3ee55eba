#pragma once

// Exact arithmetic in finite p-groups of class <= 2 given by a
// power-commutator presentation: main generators x_1..x_d, central
// generators u_1..u_r with u_a^p = 1, [x_i, x_j] and x_i^p expressed as
// u-words.  Convention, fixed globally: [g,h] = g h g^-1 h^-1.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "specp/fp.hpp"

namespace specp {

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

struct PcPresentation {
  int p = 3;
  int d = 0;  // main generators
  int r = 0;  // central generators
  // comm[pair_index(i,j)] encodes [x_i, x_j] for i > j as a vector in F_p^r
  std::vector<FpRow> comm;
  // pow[i-1] encodes x_i^p as a vector in F_p^r
  std::vector<FpRow> pow;
  std::string name;  // optional family descriptor
  bool outside_paper_scope = false;  // d < 3, p = 2, or abelian table

  static int pair_count(int d) { return d * (d - 1) / 2; }

  // pairs (i,j), 1 <= j < i <= d, ordered lexicographically by (i,j)
  static int pair_index(int i, int j) {
    assert(j >= 1 && j < i);
    return (i - 1) * (i - 2) / 2 + (j - 1);
  }
  static std::pair<int, int> pair_of(int idx) {
    int i = 2;
    while ((i - 1) * (i - 2) / 2 + (i - 2) < idx) ++i;
    int j = idx - (i - 1) * (i - 2) / 2 + 1;
    return {i, j};
  }

  // [x_i, x_j] in u-coordinates for arbitrary i != j (sign per convention)
  FpRow cvec(int i, int j) const {
    FpRow v(r, 0);
    if (i == j) return v;
    if (i > j) return comm[pair_index(i, j)];
    const FpRow& w = comm[pair_index(j, i)];
    for (int a = 0; a < r; ++a) v[a] = fp_norm(-w[a], p);
    return v;
  }

  long long order_exponent() const { return d + r; }  // |G| = p^(d+r)

  bool abelian() const {
    for (const auto& c : comm)
      for (int x : c)
        if (x) return false;
    return true;
  }
};

// Validates invariants; by default requires the presentation *reduced*:
// the u-basis spans exactly span(comm) + span(pow).
inline void validate(const PcPresentation& P, bool allow_unreduced = false) {
  if (!is_prime(P.p)) throw std::invalid_argument("p must be prime");
  if (P.d < 0 || P.r < 0) throw std::invalid_argument("negative generator count");
  if (static_cast<int>(P.comm.size()) != PcPresentation::pair_count(P.d))
    throw std::invalid_argument("comm table size mismatch");
  if (static_cast<int>(P.pow.size()) != P.d)
    throw std::invalid_argument("pow table size mismatch");
  for (const auto& v : P.comm)
    if (static_cast<int>(v.size()) != P.r)
      throw std::invalid_argument("comm vector length mismatch");
  for (const auto& v : P.pow)
    if (static_cast<int>(v.size()) != P.r)
      throw std::invalid_argument("pow vector length mismatch");
  if (!allow_unreduced) {
    std::vector<FpRow> rows = P.comm;
    rows.insert(rows.end(), P.pow.begin(), P.pow.end());
    if (fp_span_dim(rows, P.r, P.p) != P.r)
      throw std::invalid_argument(
          "presentation not reduced: u-basis exceeds span of comm and pow");
  }
}

struct GroupElement {
  const PcPresentation* pres = nullptr;
  FpRow a;  // main exponents, length d
  FpRow b;  // central exponents, length r

  bool is_identity() const {
    return std::all_of(a.begin(), a.end(), [](int x) { return x == 0; }) &&
           std::all_of(b.begin(), b.end(), [](int x) { return x == 0; });
  }
  bool operator==(const GroupElement& o) const {
    return pres == o.pres && a == o.a && b == o.b;
  }
  bool operator!=(const GroupElement& o) const { return !(*this == o); }
  bool central() const {
    return std::all_of(a.begin(), a.end(), [](int x) { return x == 0; });
  }
};

inline GroupElement identity(const PcPresentation& P) {
  return {&P, FpRow(P.d, 0), FpRow(P.r, 0)};
}

inline GroupElement generator_x(const PcPresentation& P, int i) {
  GroupElement g = identity(P);
  g.a[i - 1] = 1;
  return g;
}

inline GroupElement generator_u(const PcPresentation& P, int a) {
  GroupElement g = identity(P);
  g.b[a - 1] = 1;
  return g;
}

inline GroupElement element(const PcPresentation& P, FpRow a, FpRow b) {
  assert(static_cast<int>(a.size()) == P.d && static_cast<int>(b.size()) == P.r);
  for (auto& x : a) x = fp_norm(x, P.p);
  for (auto& x : b) x = fp_norm(x, P.p);
  return {&P, std::move(a), std::move(b)};
}

// Central correction picked up when x^a x^a' is collected into normal form:
// sum over i > j of a_i a'_j [x_i, x_j].
inline FpRow collection_correction(const PcPresentation& P, const FpRow& a,
                                   const FpRow& ap) {
  FpRow c(P.r, 0);
  for (int i = 2; i <= P.d; ++i) {
    if (a[i - 1] == 0) continue;
    for (int j = 1; j < i; ++j) {
      if (ap[j - 1] == 0) continue;
      long long f = static_cast<long long>(a[i - 1]) * ap[j - 1];
      const FpRow& w = P.comm[PcPresentation::pair_index(i, j)];
      for (int t = 0; t < P.r; ++t) c[t] = fp_norm(c[t] + f * w[t], P.p);
    }
  }
  return c;
}

inline GroupElement multiply(const GroupElement& g, const GroupElement& h) {
  if (g.pres != h.pres)
    throw std::invalid_argument("multiply: mismatched presentations");
  const PcPresentation& P = *g.pres;
  GroupElement out = identity(P);
  FpRow corr = collection_correction(P, g.a, h.a);
  for (int t = 0; t < P.r; ++t)
    out.b[t] = fp_norm(g.b[t] + h.b[t] + corr[t], P.p);
  for (int i = 0; i < P.d; ++i) {
    int e = g.a[i] + h.a[i];
    out.a[i] = e % P.p;
    if (e >= P.p)  // wraparound contributes x_i^p
      for (int t = 0; t < P.r; ++t)
        out.b[t] = fp_norm(out.b[t] + P.pow[i][t], P.p);
  }
  return out;
}

inline GroupElement inverse(const GroupElement& g) {
  const PcPresentation& P = *g.pres;
  GroupElement h = identity(P);
  for (int i = 0; i < P.d; ++i) h.a[i] = fp_norm(-g.a[i], P.p);
  // solve for the central part so that g * h = 1
  GroupElement gh = multiply(g, {&P, h.a, FpRow(P.r, 0)});
  for (int t = 0; t < P.r; ++t) h.b[t] = fp_norm(-gh.b[t], P.p);
  return h;
}

inline GroupElement power(const GroupElement& g, long long n) {
  const PcPresentation& P = *g.pres;
  GroupElement base = g;
  if (n < 0) {
    base = inverse(g);
    n = -n;
  }
  GroupElement acc = identity(P);
  while (n > 0) {
    if (n & 1) acc = multiply(acc, base);
    base = multiply(base, base);
    n >>= 1;
  }
  return acc;
}

// [g, h] = g h g^-1 h^-1; always central in class 2:
// coordinates sum over i > j of (a_i a'_j - a'_i a_j) [x_i, x_j].
inline GroupElement commutator(const GroupElement& g, const GroupElement& h) {
  if (g.pres != h.pres)
    throw std::invalid_argument("commutator: mismatched presentations");
  const PcPresentation& P = *g.pres;
  GroupElement out = identity(P);
  for (int i = 2; i <= P.d; ++i)
    for (int j = 1; j < i; ++j) {
      long long f = static_cast<long long>(g.a[i - 1]) * h.a[j - 1] -
                    static_cast<long long>(h.a[i - 1]) * g.a[j - 1];
      if (f % P.p == 0) continue;
      const FpRow& w = P.comm[PcPresentation::pair_index(i, j)];
      for (int t = 0; t < P.r; ++t) out.b[t] = fp_norm(out.b[t] + f * w[t], P.p);
    }
  return out;
}

// g h g^-1 = h [g, h]
inline GroupElement conjugate(const GroupElement& g, const GroupElement& h) {
  return multiply(h, commutator(g, h));
}

// ---------------------------------------------------------------------------
// Subgroups of interest.  Central subgroups are F_p-subspaces of the u-part;
// the center may additionally pick up main-generator directions.
// ---------------------------------------------------------------------------

enum class SubgroupKind { Central, Derived, Center, Frattini, Agemo, ExteriorCenter };

struct SubgroupDescription {
  SubgroupKind kind = SubgroupKind::Central;
  FpSpan central_rows;           // row-reduced span inside F_p^r
  std::vector<FpRow> main_rows;  // coset directions in F_p^d (center only)

  int dim() const { return central_rows.dim() + static_cast<int>(main_rows.size()); }

  explicit SubgroupDescription(int r, int p) : central_rows(r, p) {}
};

inline SubgroupDescription derived_subgroup(const PcPresentation& P) {
  SubgroupDescription s(P.r, P.p);
  s.kind = SubgroupKind::Derived;
  for (const auto& v : P.comm) s.central_rows.add(v);
  return s;
}

inline SubgroupDescription agemo(const PcPresentation& P) {
  // G^p = span of the power words: g^p = prod u^(sum a_i pi_i)
  SubgroupDescription s(P.r, P.p);
  s.kind = SubgroupKind::Agemo;
  for (const auto& v : P.pow) s.central_rows.add(v);
  return s;
}

inline SubgroupDescription frattini(const PcPresentation& P) {
  SubgroupDescription s(P.r, P.p);
  s.kind = SubgroupKind::Frattini;
  for (const auto& v : P.comm) s.central_rows.add(v);
  for (const auto& v : P.pow) s.central_rows.add(v);
  return s;
}

// Kernel of the commutator bilinear form, extended by the full u-part.
inline SubgroupDescription center(const PcPresentation& P) {
  SubgroupDescription s(P.r, P.p);
  s.kind = SubgroupKind::Center;
  for (int t = 1; t <= P.r; ++t) {
    FpRow e(P.r, 0);
    e[t - 1] = 1;
    s.central_rows.add(e);
  }
  // a is central iff sum_i a_i [x_i, x_k] = 0 for every k
  std::vector<FpRow> form;  // (d*r) x d matrix rows stacked per k
  for (int k = 1; k <= P.d; ++k)
    for (int t = 0; t < P.r; ++t) {
      FpRow row(P.d, 0);
      for (int i = 1; i <= P.d; ++i) row[i - 1] = P.cvec(i, k)[t];
      form.push_back(std::move(row));
    }
  s.main_rows = fp_kernel(form, P.d, P.p);
  return s;
}

struct StructureReport {
  bool is_special = false;
  long long exponent = 1;  // 1, p, or p^2
  int t = 0;               // log_p |G^p|
  int d_derived = 0;       // dim G'
  long long order_exponent = 0;  // |G| = p^this
  bool derived_rank_bound_ok = true;  // dim G' <= d(d-1)/2
  bool outside_paper_scope = false;
};

inline StructureReport structure_report(const PcPresentation& P) {
  StructureReport rep;
  rep.order_exponent = P.order_exponent();
  auto der = derived_subgroup(P);
  auto zen = center(P);
  auto fra = frattini(P);
  rep.d_derived = der.central_rows.dim();
  rep.t = agemo(P).central_rows.dim();
  rep.derived_rank_bound_ok = rep.d_derived <= P.d * (P.d - 1) / 2;
  bool pow_trivial = true;
  for (const auto& v : P.pow)
    for (int x : v)
      if (x) pow_trivial = false;
  if (P.d == 0 && P.r == 0)
    rep.exponent = 1;
  else
    rep.exponent = pow_trivial ? P.p : static_cast<long long>(P.p) * P.p;
  // special: G' = Z(G) = Phi(G), both G' and G/G' elementary abelian.
  // G' and G/G' are elementary by construction once G^p <= G'.
  bool derived_full = rep.d_derived == P.r;
  bool center_is_central_part = zen.main_rows.empty() && zen.central_rows.dim() == P.r;
  bool frattini_eq_derived = fra.central_rows.dim() == rep.d_derived;
  rep.is_special = P.d > 0 && P.r > 0 && derived_full && center_is_central_part &&
                   frattini_eq_derived;
  rep.outside_paper_scope = P.outside_paper_scope || P.d < 3 || P.p == 2 || P.abelian();
  return rep;
}

// ---------------------------------------------------------------------------
// Family constructors.
// ---------------------------------------------------------------------------

namespace detail {
inline void require_family_domain(int d, int p) {
  if (p == 2 || !is_prime(p))
    throw std::invalid_argument("this family requires an odd prime p");
  if (d < 3)
    throw std::invalid_argument("this family requires d >= 3");
}
}  // namespace detail

// Relatively free special p-group of exponent p: r = d(d-1)/2, pi = 0.
inline PcPresentation free_special(int d, int p) {
  detail::require_family_domain(d, p);
  PcPresentation P;
  P.p = p;
  P.d = d;
  P.r = PcPresentation::pair_count(d);
  P.comm.assign(P.r, FpRow(P.r, 0));
  for (int idx = 0; idx < P.r; ++idx) P.comm[idx][idx] = 1;
  P.pow.assign(d, FpRow(P.r, 0));
  P.name = "free-special";
  validate(P);
  return P;
}

// Rank-deficient family: [x_i, x_j] is the alpha-combination of the other
// pair commutators; u-basis indexed by the pairs != (i, j).
// alpha is keyed by pair index in the full d(d-1)/2 pair ordering.
inline PcPresentation rank_deficient(int d, int p, std::pair<int, int> dropped,
                                     const std::map<int, int>& alpha) {
  detail::require_family_domain(d, p);
  auto [i, j] = dropped;
  if (!(1 <= j && j < i && i <= d))
    throw std::invalid_argument("rank_deficient: dropped pair must satisfy 1<=j<i<=d");
  int drop_idx = PcPresentation::pair_index(i, j);
  PcPresentation P;
  P.p = p;
  P.d = d;
  P.r = PcPresentation::pair_count(d) - 1;
  // u-coordinate for each surviving pair
  std::vector<int> coord(PcPresentation::pair_count(d), -1);
  int c = 0;
  for (int idx = 0; idx < PcPresentation::pair_count(d); ++idx)
    if (idx != drop_idx) coord[idx] = c++;
  P.comm.assign(PcPresentation::pair_count(d), FpRow(P.r, 0));
  for (int idx = 0; idx < PcPresentation::pair_count(d); ++idx) {
    if (idx != drop_idx) {
      P.comm[idx][coord[idx]] = 1;
      continue;
    }
    for (auto [pidx, coef] : alpha) {
      if (pidx == drop_idx || pidx < 0 || pidx >= PcPresentation::pair_count(d))
        throw std::invalid_argument("rank_deficient: bad alpha index");
      P.comm[idx][coord[pidx]] = fp_norm(coef, p);
    }
  }
  P.pow.assign(d, FpRow(P.r, 0));
  P.name = "rank-deficient";
  validate(P);
  return P;
}

// Convenience: the standard d=3 instance with [x1,x2] = [x1,x3][x2,x3].
inline PcPresentation rank_deficient_standard(int d, int p) {
  std::map<int, int> alpha;
  for (int idx = 1; idx < PcPresentation::pair_count(d); ++idx) alpha[idx] = 1;
  return rank_deficient(d, p, {2, 1}, alpha);
}

// Rank-full, exp p^2, G^p of order p: x_1^p = [x_1, x_2], the non-capable
// witness.
inline PcPresentation non_capable_witness(int d, int p) {
  PcPresentation P = free_special(d, p);
  // [x_1, x_2] = -[x_2, x_1] = -u_(2,1)
  P.pow[0][PcPresentation::pair_index(2, 1)] = p - 1;
  P.name = "non-capable-witness";
  validate(P);
  return P;
}

// Rank-full with prescribed power table (t = rank of the pi matrix).
inline PcPresentation exp_p2_family(int d, int p, const std::vector<FpRow>& pi) {
  PcPresentation P = free_special(d, p);
  if (static_cast<int>(pi.size()) != d)
    throw std::invalid_argument("exp_p2_family: need d power words");
  for (const auto& v : pi)
    if (static_cast<int>(v.size()) != P.r)
      throw std::invalid_argument("exp_p2_family: power word length mismatch");
  P.pow = pi;
  for (auto& v : P.pow)
    for (auto& x : v) x = fp_norm(x, p);
  P.name = "exp-p2-family";
  validate(P);
  return P;
}

// Rank-full family with H^p = <x_1^p, ..., x_t^p> of rank t.
inline PcPresentation rank_full_with_t(int d, int p, int t) {
  if (t < 0 || t > d) throw std::invalid_argument("t must lie in [0, d]");
  PcPresentation P = free_special(d, p);
  for (int i = 0; i < t; ++i) P.pow[i][i] = 1;
  std::ostringstream os;
  os << "rank-full-t" << t;
  P.name = os.str();
  validate(P);
  return P;
}

// Extraspecial groups of order p^3 (d = 2) and their order-p^4 central
// extension by a direct Z_p factor (d = 3).  Small oracle families, exempt
// from the d >= 3 rule.
inline PcPresentation extraspecial(int p, int order_exp, bool exponent_p) {
  if (!is_prime(p) || p == 2) throw std::invalid_argument("extraspecial: odd prime required");
  if (order_exp != 3 && order_exp != 4)
    throw std::invalid_argument("extraspecial: order p^3 or p^4 only");
  PcPresentation P;
  P.p = p;
  P.d = order_exp - 1;
  P.r = 1;
  P.comm.assign(PcPresentation::pair_count(P.d), FpRow(1, 0));
  P.comm[PcPresentation::pair_index(2, 1)][0] = 1;
  P.pow.assign(P.d, FpRow(1, 0));
  if (!exponent_p) P.pow[0][0] = 1;
  P.name = order_exp == 3 ? "extraspecial-p3" : "extraspecial-p3-times-Zp";
  P.outside_paper_scope = true;  // d < 3
  validate(P);
  return P;
}

// Elementary abelian Z_p^d.
inline PcPresentation elementary_abelian(int d, int p) {
  PcPresentation P;
  P.p = p;
  P.d = d;
  P.r = 0;
  P.comm.assign(PcPresentation::pair_count(d), FpRow(0));
  P.pow.assign(d, FpRow(0));
  P.name = "elementary-abelian";
  P.outside_paper_scope = true;
  validate(P);
  return P;
}

// Abelian group of type (p^2, p, ..., p): x_1 of order p^2.
inline PcPresentation abelian_p2_p(int d, int p) {
  PcPresentation P;
  P.p = p;
  P.d = d;
  P.r = 1;
  P.comm.assign(PcPresentation::pair_count(d), FpRow(1, 0));
  P.pow.assign(d, FpRow(1, 0));
  P.pow[0][0] = 1;
  P.name = "abelian-p2-p";
  P.outside_paper_scope = true;
  validate(P);
  return P;
}

// ---------------------------------------------------------------------------
// Central quotients.
// ---------------------------------------------------------------------------

// G / S for S a subspace of the u-part: project comm and pow onto F_p^r / S
// using the non-pivot coordinates of the row-reduced S.
inline PcPresentation quotient_by_central(const PcPresentation& P, const FpSpan& s) {
  if (s.ncols() != P.r || s.prime() != P.p)
    throw std::invalid_argument("quotient_by_central: subgroup not in the central part");
  std::vector<char> is_pivot(P.r, 0);
  for (int c : s.pivots()) is_pivot[c] = 1;
  std::vector<int> keep;
  for (int c = 0; c < P.r; ++c)
    if (!is_pivot[c]) keep.push_back(c);
  auto project = [&](const FpRow& v) {
    FpRow red = s.reduce(v);
    FpRow out(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) out[k] = red[keep[k]];
    return out;
  };
  PcPresentation Q;
  Q.p = P.p;
  Q.d = P.d;
  Q.r = P.r - s.dim();
  for (const auto& v : P.comm) Q.comm.push_back(project(v));
  for (const auto& v : P.pow) Q.pow.push_back(project(v));
  Q.name = P.name.empty() ? "quotient" : P.name + "/K";
  Q.outside_paper_scope = P.outside_paper_scope;
  validate(Q);
  return Q;
}

// ---------------------------------------------------------------------------
// Element enumeration (full normal-form listing; caller caps the order).
// ---------------------------------------------------------------------------

inline std::vector<GroupElement> enumerate_elements(const PcPresentation& P,
                                                    long long max_order = 1000000) {
  long long order = 1;
  for (int i = 0; i < P.d + P.r; ++i) {
    order *= P.p;
    if (order > max_order) throw std::invalid_argument("enumerate_elements: order cap exceeded");
  }
  std::vector<GroupElement> out;
  out.reserve(order);
  GroupElement g = identity(P);
  for (long long n = 0; n < order; ++n) {
    long long m = n;
    for (int i = 0; i < P.d; ++i) { g.a[i] = static_cast<int>(m % P.p); m /= P.p; }
    for (int t = 0; t < P.r; ++t) { g.b[t] = static_cast<int>(m % P.p); m /= P.p; }
    out.push_back(g);
  }
  return out;
}

// Coset representatives of G' G^p (one per main-exponent vector).
inline std::vector<GroupElement> coset_representatives(const PcPresentation& P,
                                                       long long max_count = 1000000) {
  long long count = 1;
  for (int i = 0; i < P.d; ++i) {
    count *= P.p;
    if (count > max_count) throw std::invalid_argument("coset cap exceeded");
  }
  std::vector<GroupElement> out;
  out.reserve(count);
  GroupElement g = identity(P);
  for (long long n = 0; n < count; ++n) {
    long long m = n;
    for (int i = 0; i < P.d; ++i) { g.a[i] = static_cast<int>(m % P.p); m /= P.p; }
    out.push_back(g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format: `p 3` / `gens 3` / `comm 2 1 = u 1^2 u 3` / `pow 1 = u 1`.
// Omitted pow lines mean pi_i = 0.  Emission is canonical and round-trips
// with the parser bit-exactly.
// ---------------------------------------------------------------------------

inline std::string emit_presentation(const PcPresentation& P) {
  std::ostringstream os;
  os << "p " << P.p << "\n";
  os << "gens " << P.d << "\n";
  if (P.r > 0) os << "cents " << P.r << "\n";
  auto word = [&](const FpRow& v) {
    std::ostringstream w;
    bool first = true;
    for (int t = 0; t < P.r; ++t) {
      if (v[t] == 0) continue;
      if (!first) w << " ";
      w << "u " << (t + 1);
      if (v[t] != 1) w << "^" << v[t];
      first = false;
    }
    return w.str();
  };
  for (int i = 2; i <= P.d; ++i)
    for (int j = 1; j < i; ++j) {
      const FpRow& v = P.comm[PcPresentation::pair_index(i, j)];
      if (std::all_of(v.begin(), v.end(), [](int x) { return x == 0; })) continue;
      os << "comm " << i << " " << j << " = " << word(v) << "\n";
    }
  for (int i = 1; i <= P.d; ++i) {
    const FpRow& v = P.pow[i - 1];
    if (std::all_of(v.begin(), v.end(), [](int x) { return x == 0; })) continue;
    os << "pow " << i << " = " << word(v) << "\n";
  }
  return os.str();
}

struct ParseError : std::runtime_error {
  int line;
  ParseError(int l, const std::string& what)
      : std::runtime_error("line " + std::to_string(l) + ": " + what), line(l) {}
};

inline PcPresentation parse_presentation(const std::string& text,
                                         bool allow_unreduced = false) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int p = -1, d = -1, r_declared = -1;
  int r_seen = 0;
  struct UWord { int line; std::vector<std::pair<int, int>> factors; };
  std::map<std::pair<int, int>, UWord> comm_lines;
  std::map<int, UWord> pow_lines;

  auto parse_uword = [&](std::istringstream& ls, int ln) {
    UWord w{ln, {}};
    std::string tok;
    while (ls >> tok) {
      if (tok != "u") throw ParseError(ln, "expected 'u', got '" + tok + "'");
      std::string spec;
      if (!(ls >> spec)) throw ParseError(ln, "dangling 'u'");
      int idx, e = 1;
      auto caret = spec.find('^');
      try {
        if (caret == std::string::npos) {
          idx = std::stoi(spec);
        } else {
          idx = std::stoi(spec.substr(0, caret));
          e = std::stoi(spec.substr(caret + 1));
        }
      } catch (const std::exception&) {
        throw ParseError(ln, "bad u token '" + spec + "'");
      }
      if (idx < 1) throw ParseError(ln, "u index must be >= 1");
      r_seen = std::max(r_seen, idx);
      w.factors.emplace_back(idx, e);
    }
    return w;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw.empty()) continue;
    if (kw == "p") {
      if (!(ls >> p) || !is_prime(p)) throw ParseError(lineno, "bad prime");
    } else if (kw == "gens") {
      if (!(ls >> d) || d < 0) throw ParseError(lineno, "bad generator count");
    } else if (kw == "cents") {
      if (!(ls >> r_declared) || r_declared < 0) throw ParseError(lineno, "bad cents");
    } else if (kw == "comm") {
      int i, j;
      std::string eq;
      if (!(ls >> i >> j >> eq) || eq != "=") throw ParseError(lineno, "bad comm line");
      if (!(1 <= j && j < i)) throw ParseError(lineno, "comm requires 1 <= j < i");
      comm_lines[{i, j}] = parse_uword(ls, lineno);
    } else if (kw == "pow") {
      int i;
      std::string eq;
      if (!(ls >> i >> eq) || eq != "=") throw ParseError(lineno, "bad pow line");
      if (i < 1) throw ParseError(lineno, "pow index must be >= 1");
      pow_lines[i] = parse_uword(ls, lineno);
    } else {
      throw ParseError(lineno, "unknown keyword '" + kw + "'");
    }
  }
  if (p < 0) throw ParseError(lineno, "missing 'p' line");
  if (d < 0) throw ParseError(lineno, "missing 'gens' line");
  int r = std::max(r_declared, r_seen);
  if (r < 0) r = 0;

  PcPresentation P;
  P.p = p;
  P.d = d;
  P.r = r;
  P.comm.assign(PcPresentation::pair_count(d), FpRow(r, 0));
  P.pow.assign(d, FpRow(r, 0));
  auto fill = [&](FpRow& v, const UWord& w) {
    for (auto [idx, e] : w.factors) {
      if (idx > r) throw ParseError(w.line, "u index out of range");
      v[idx - 1] = fp_norm(v[idx - 1] + e, p);
    }
  };
  for (auto& [ij, w] : comm_lines) {
    auto [i, j] = ij;
    if (i > d) throw ParseError(w.line, "comm generator index out of range");
    fill(P.comm[PcPresentation::pair_index(i, j)], w);
  }
  for (auto& [i, w] : pow_lines) {
    if (i > d) throw ParseError(w.line, "pow generator index out of range");
    fill(P.pow[i - 1], w);
  }
  validate(P, allow_unreduced);
  StructureReport rep = structure_report(P);
  P.outside_paper_scope = rep.outside_paper_scope;
  return P;
}

}  // namespace specp
