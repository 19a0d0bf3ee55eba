#pragma once

// Symbolic exterior and tensor squares of class-2 groups with elementary
// abelian G' and G/G'.  The square is presented on formal generator symbols
// y (x) z over the pc-generators; relations are generated in tiers, each an
// instance of the defining biderivation identities (hence sound), until the
// presented order matches an independently computed target (hence complete).
// A brute-force oracle over all element pairs validates the engine on small
// groups.

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "specp/fp.hpp"
#include "specp/multiplier.hpp"
#include "specp/pc_group.hpp"
#include "specp/snf.hpp"

namespace specp {

enum class SquareMode { Wedge, Tensor };

// ---------------------------------------------------------------------------
// Symbols: one column per ordered pair of pc-generators (x_1..x_d, u_1..u_r).
// ---------------------------------------------------------------------------

struct SymbolTable {
  int d = 0, r = 0;
  int n() const { return d + r; }
  int count() const { return n() * n(); }
  int id(int y, int z) const {  // 0-based pc-generator indices
    assert(0 <= y && y < n() && 0 <= z && z < n());
    return y * n() + z;
  }
  std::string gen_name(int y) const {
    std::ostringstream os;
    if (y < d) os << "x" << (y + 1);
    else os << "u" << (y - d + 1);
    return os.str();
  }
  std::string name(int idx) const {
    return "(" + gen_name(idx / n()) + "," + gen_name(idx % n()) + ")";
  }
};

using FormalSum = std::map<int, long long>;  // symbol -> integer coefficient

inline void fs_add(FormalSum& s, int idx, long long c) {
  if (c == 0) return;
  auto it = s.find(idx);
  if (it == s.end()) s.emplace(idx, c);
  else if ((it->second += c) == 0) s.erase(it);
}

inline void fs_merge(FormalSum& s, const FormalSum& o, long long f = 1) {
  for (auto [idx, c] : o) fs_add(s, idx, f * c);
}

inline SparseRow fs_row(const FormalSum& s) {
  SparseRow r;
  r.reserve(s.size());
  for (auto [idx, c] : s)
    if (c) r.emplace_back(idx, c);
  return r;
}

// ---------------------------------------------------------------------------
// Expansion of g (x) h into symbols by the biderivation rules
//   gg' (x) h = (ᵍg' (x) ᵍh) + (g (x) h),   g (x) hh' = (g (x) h) + (ʰg (x) ʰh'),
// peeling normal-form letters; conjugation only shifts central coordinates.
// ---------------------------------------------------------------------------

class Expander {
 public:
  explicit Expander(const PcPresentation& P) : P_(&P), S_{P.d, P.r} {}

  const SymbolTable& symbols() const { return S_; }
  const PcPresentation& pres() const { return *P_; }

  FormalSum expand(const GroupElement& g, const GroupElement& h) const {
    if (g.pres != P_ || h.pres != P_)
      throw std::invalid_argument("expand: element from another presentation");
    FormalSum out;
    exp_(g.a, g.b, h.a, h.b, 1, out);
    return out;
  }

  // Expansion of the (unreduced) word w1 w2 ... wm against h; sound for any
  // word, and deliberately *not* normal-formed first, so that comparing it
  // with expand(product, h) yields relation instances.
  FormalSum expand_word(std::vector<GroupElement> w, GroupElement h) const {
    FormalSum out;
    for (std::size_t t = 0; t < w.size(); ++t) {
      fs_merge(out, expand(w[t], h));
      for (std::size_t j = t + 1; j < w.size(); ++j)
        w[j] = multiply(w[j], commutator(w[t], w[j]));
      h = multiply(h, commutator(w[t], h));
    }
    return out;
  }

  FormalSum expand_word_right(GroupElement g, std::vector<GroupElement> w) const {
    FormalSum out;
    for (std::size_t t = 0; t < w.size(); ++t) {
      fs_merge(out, expand(g, w[t]));
      g = multiply(g, commutator(w[t], g));
      for (std::size_t j = t + 1; j < w.size(); ++j)
        w[j] = multiply(w[j], commutator(w[t], w[j]));
    }
    return out;
  }

 private:
  const PcPresentation* P_;
  SymbolTable S_;

  static int first_main_(const FpRow& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i]) return static_cast<int>(i);
    return -1;
  }
  static bool zero_(const FpRow& v) {
    return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
  }

  // central coordinates of [x_{i0+1}, x^a]
  FpRow comm_action_(int i0, const FpRow& a) const {
    FpRow c(P_->r, 0);
    for (int j = 0; j < P_->d; ++j) {
      if (!a[j] || j == i0) continue;
      FpRow w = P_->cvec(i0 + 1, j + 1);
      for (int t = 0; t < P_->r; ++t)
        c[t] = fp_norm(c[t] + static_cast<long long>(a[j]) * w[t], P_->p);
    }
    return c;
  }
  FpRow add_rows_(FpRow a, const FpRow& b) const {
    for (std::size_t t = 0; t < a.size(); ++t) a[t] = fp_norm(a[t] + b[t], P_->p);
    return a;
  }

  // E(u^gb, h) with h = x^ha u^hb, peeling h's main letters.
  void central_left_(const FpRow& gb, FpRow ha, FpRow hb, long long coef,
                     FormalSum& out) const {
    int k = first_main_(ha);
    if (k < 0) {
      for (int a = 0; a < P_->r; ++a)
        for (int b = 0; b < P_->r; ++b)
          fs_add(out, S_.id(P_->d + a, P_->d + b),
                 coef * gb[a] * hb[b]);
      return;
    }
    for (int a = 0; a < P_->r; ++a)
      fs_add(out, S_.id(P_->d + a, k), coef * gb[a]);
    --ha[k];
    hb = add_rows_(hb, comm_action_(k, ha));
    central_left_(gb, std::move(ha), std::move(hb), coef, out);
  }

  // E(g, u^hb) with g = x^ga u^gb, peeling g's main letters.
  void central_right_(FpRow ga, FpRow gb, const FpRow& hb, long long coef,
                      FormalSum& out) const {
    int i = first_main_(ga);
    if (i < 0) {
      for (int a = 0; a < P_->r; ++a)
        for (int b = 0; b < P_->r; ++b)
          fs_add(out, S_.id(P_->d + a, P_->d + b), coef * gb[a] * hb[b]);
      return;
    }
    for (int b = 0; b < P_->r; ++b)
      fs_add(out, S_.id(i, P_->d + b), coef * hb[b]);
    --ga[i];
    gb = add_rows_(gb, comm_action_(i, ga));
    central_right_(std::move(ga), std::move(gb), hb, coef, out);
  }

  void exp_(FpRow ga, FpRow gb, FpRow ha, FpRow hb, long long coef,
            FormalSum& out) const {
    if ((zero_(ga) && zero_(gb)) || (zero_(ha) && zero_(hb))) return;
    if (zero_(ga)) { central_left_(gb, std::move(ha), std::move(hb), coef, out); return; }
    if (zero_(ha)) { central_right_(std::move(ga), std::move(gb), hb, coef, out); return; }
    int i = first_main_(ga);
    bool single = (ga[i] == 1) && zero_(gb);
    if (single)
      for (int j = i + 1; j < P_->d && single; ++j)
        if (ga[j]) single = false;
    if (single) {
      // E(x_i, x_k S) = (x_i (x) x_k) + E(ˣᵏx_i, ˣᵏS)
      int k = first_main_(ha);
      fs_add(out, S_.id(i, k), coef);
      --ha[k];
      FpRow Sb = add_rows_(hb, comm_action_(k, ha));
      FpRow gcb = P_->cvec(k + 1, i + 1);
      exp_(std::move(ga), std::move(gcb), std::move(ha), std::move(Sb), coef, out);
    } else {
      // E(x_i R, h) = E(ˣⁱR, ˣⁱh) + E(x_i, h)
      FpRow Ra = ga;
      --Ra[i];
      FpRow Rb = add_rows_(gb, comm_action_(i, Ra));
      FpRow hcb = add_rows_(hb, comm_action_(i, ha));
      exp_(Ra, std::move(Rb), ha, std::move(hcb), coef, out);
      FpRow ea(P_->d, 0);
      ea[i] = 1;
      exp_(std::move(ea), FpRow(P_->r, 0), std::move(ha), std::move(hb), coef, out);
    }
  }
};

// ---------------------------------------------------------------------------
// Quotient view of a compacted echelon: folds every column onto the columns
// not killed by a unit pivot, giving a small presentation of the cokernel in
// which subgroup and kernel structures are cheap.
// ---------------------------------------------------------------------------

struct QuotientView {
  int ncols = 0, nb = 0, p = 0;
  long long q = 0;
  std::vector<int> bad_cols;
  std::vector<SparseRow> fold_col;  // per ambient column, over bad indices
  PresentedAbelianGroup small;

  static QuotientView build(const SparseEchelon& ech) {
    QuotientView v;
    v.ncols = ech.ncols();
    v.p = ech.prime();
    v.q = ech.modulus();
    auto rows = ech.extracted_rows();
    std::vector<char> unit_pivot(v.ncols, 0);
    for (const auto& row : rows)
      if (row.front().second == 1) unit_pivot[row.front().first] = 1;
    std::vector<int> bad_idx(v.ncols, -1);
    for (int c = 0; c < v.ncols; ++c)
      if (!unit_pivot[c]) {
        bad_idx[c] = static_cast<int>(v.bad_cols.size());
        v.bad_cols.push_back(c);
      }
    v.nb = static_cast<int>(v.bad_cols.size());
    v.fold_col.assign(v.ncols, {});
    for (int c = 0; c < v.ncols; ++c)
      if (bad_idx[c] >= 0) v.fold_col[c] = {{bad_idx[c], 1}};
    // unit-pivot rows, processed from the highest pivot down so that every
    // tail entry already has a fold
    std::sort(rows.begin(), rows.end(), [](const SparseRow& a, const SparseRow& b) {
      return a.front().first > b.front().first;
    });
    for (const auto& row : rows) {
      int lead = row.front().first;
      if (row.front().second != 1) continue;
      std::vector<long long> acc(v.nb, 0);
      for (std::size_t t = 1; t < row.size(); ++t) {
        auto [c, val] = row[t];
        for (auto [bi, f] : v.fold_col[c])
          acc[bi] = (acc[bi] - static_cast<__int128>(val) * f % v.q + v.q * 2) % v.q;
      }
      SparseRow fr;
      for (int bi = 0; bi < v.nb; ++bi)
        if (acc[bi]) fr.emplace_back(bi, acc[bi]);
      v.fold_col[lead] = std::move(fr);
    }
    v.small.n = v.nb;
    for (const auto& row : rows) {
      if (row.front().second == 1) continue;
      SparseRow sr;
      for (auto [c, val] : row) {
        assert(bad_idx[c] >= 0);
        sr.emplace_back(bad_idx[c], val);
      }
      v.small.add_relation(std::move(sr));
    }
    for (int bi = 0; bi < v.nb; ++bi) v.small.add_relation({{bi, v.q}});
    return v;
  }

  SparseRow fold(const SparseRow& row) const {
    std::vector<long long> acc(nb, 0);
    for (auto [c, val] : row)
      for (auto [bi, f] : fold_col[c])
        acc[bi] = static_cast<long long>(
            ((static_cast<__int128>(val) * f + acc[bi]) % q + q) % q);
    SparseRow out;
    for (int bi = 0; bi < nb; ++bi)
      if (acc[bi]) out.emplace_back(bi, acc[bi]);
    return out;
  }

  // Structure of the subgroup generated by the given ambient rows.
  AbelianStructure subgroup(const std::vector<SparseRow>& gens) const {
    std::vector<SparseRow> folded;
    folded.reserve(gens.size());
    for (const auto& g : gens) folded.push_back(fold(g));
    return structure_of_subquotient(small, folded, p);
  }

  // Kernel of the map to F_p^r sending each ambient column to kappa[col].
  AbelianStructure kappa_kernel(const std::vector<FpRow>& kappa, int r) const {
    // induced columns on the bad basis
    std::vector<FpRow> mat(r, FpRow(nb, 0));  // rows = target coords
    for (int bi = 0; bi < nb; ++bi)
      for (int t = 0; t < r; ++t) mat[t][bi] = kappa[bad_cols[bi]][t];
    std::vector<SparseRow> gens;
    for (const auto& v : fp_kernel(mat, nb, p)) {
      SparseRow row;
      for (int bi = 0; bi < nb; ++bi)
        if (v[bi]) row.emplace_back(bi, v[bi]);
      gens.push_back(std::move(row));
    }
    for (int bi = 0; bi < nb; ++bi) gens.push_back({{bi, p}});
    return structure_of_subquotient(small, gens, p);
  }
};

// ---------------------------------------------------------------------------
// Targets.
// ---------------------------------------------------------------------------

// Invariant-type exponents (descending) of an abelian pc-group.
inline std::vector<int> abelian_type(const PcPresentation& P) {
  if (!P.abelian()) throw std::invalid_argument("abelian_type: nonabelian input");
  PresentedAbelianGroup g;
  g.n = P.d + P.r;
  for (int i = 0; i < P.d; ++i) {
    SparseRow row{{i, P.p}};
    for (int t = 0; t < P.r; ++t)
      if (P.pow[i][t]) row.emplace_back(P.d + t, -P.pow[i][t]);
    g.add_relation(std::move(row));
  }
  for (int t = 0; t < P.r; ++t) g.add_relation({{P.d + t, P.p}});
  auto s = g.structure();
  std::vector<int> type;
  for (long long f : s.factors) {
    int e = 0;
    while (f % P.p == 0) { f /= P.p; ++e; }
    if (f != 1) throw std::logic_error("abelian_type: non p-power factor");
    type.push_back(e);
  }
  std::sort(type.rbegin(), type.rend());
  return type;
}

struct SquareTarget {
  cpp_int order = 1;
  std::string assumption;
};

inline SquareTarget square_target(const PcPresentation& P, SquareMode mode) {
  SquareTarget t;
  auto ppow = [&](long long e) {
    cpp_int o = 1;
    for (long long i = 0; i < e; ++i) o *= P.p;
    return o;
  };
  if (P.abelian()) {
    auto type = abelian_type(P);
    if (mode == SquareMode::Wedge) {
      // G ^ G = M(G) for abelian G
      t.order = multiplier_abelian(type, P.p).order();
      t.assumption = "abelian: |G^G| = |M(G)|";
    } else {
      // trivial conjugation makes the tensor square the ordinary Z-tensor
      long long e = 0;
      for (std::size_t i = 0; i < type.size(); ++i)
        for (std::size_t j = 0; j < type.size(); ++j)
          e += std::min(type[i], type[j]);
      t.order = ppow(e);
      t.assumption = "abelian: |GxG| = |G (x)_Z G|";
    }
    return t;
  }
  int mexp = multiplier_order_exponent(P);
  if (mode == SquareMode::Wedge) {
    t.order = ppow(mexp + P.r);
    t.assumption = "|G^G| = |M(G)| |G'| (exact sequence)";
  } else {
    t.order = ppow(mexp + P.r + static_cast<long long>(P.d) * (P.d + 1) / 2);
    t.assumption = "|GxG| = |G^G| p^{d(d+1)/2} (assumed splitting, oracle-checked small)";
  }
  return t;
}

// ---------------------------------------------------------------------------
// SquareResult.
// ---------------------------------------------------------------------------

struct SquareResult {
  SquareMode mode = SquareMode::Wedge;
  const PcPresentation* pres = nullptr;
  bool oracle = false;
  AbelianStructure structure;
  bool certified = false;
  cpp_int target = 0;
  std::string assumption;
  long long relations_used = 0;
  std::string diagnostics;
  AbelianStructure m_structure;                      // Wedge, certified
  AbelianStructure j2_structure, nabla_structure;    // Tensor, certified
  std::shared_ptr<SparseEchelon> lattice;
  std::shared_ptr<QuotientView> view;
  // oracle only: element order for symbol lookup
  int oracle_order = 0;
};

namespace detail {

enum class OrderState { Match, TooBig, Unresolved };

inline OrderState order_state(const SparseEchelon& ech, const AbelianStructure& s,
                              const cpp_int& target) {
  if (s.free_rank > 0) return OrderState::TooBig;
  if (!ech.precision_ok(s)) return OrderState::Unresolved;
  cpp_int o = s.order();
  if (o == target) return OrderState::Match;
  if (o < target)
    throw std::logic_error("presented square order fell below its target");
  return OrderState::TooBig;
}

inline std::vector<GroupElement> pc_generators(const PcPresentation& P) {
  std::vector<GroupElement> g;
  for (int i = 1; i <= P.d; ++i) g.push_back(generator_x(P, i));
  for (int a = 1; a <= P.r; ++a) g.push_back(generator_u(P, a));
  return g;
}

inline GroupElement conj_by(const GroupElement& a, const GroupElement& b) {
  // ᵃb = b [a, b]
  return multiply(b, commutator(a, b));
}

// u_a as a word in commutators [x_i, x_j]; requires span(comm) = F_p^r.
inline std::vector<GroupElement> u_commutator_word(const PcPresentation& P, int a) {
  const int np = PcPresentation::pair_count(P.d);
  FpSpan sp(P.r + np, P.p);
  for (int idx = 0; idx < np; ++idx) {
    FpRow row(P.r + np, 0);
    for (int t = 0; t < P.r; ++t) row[t] = P.comm[idx][t];
    row[P.r + idx] = 1;
    sp.add(row);
  }
  FpRow probe(P.r + np, 0);
  probe[a - 1] = 1;
  FpRow res = sp.reduce(probe);
  for (int t = 0; t < P.r; ++t)
    if (res[t]) throw std::invalid_argument("u generator not a commutator word");
  std::vector<GroupElement> w;
  for (int idx = 0; idx < np; ++idx) {
    int lambda = fp_norm(-res[P.r + idx], P.p);
    if (!lambda) continue;
    auto [i, j] = PcPresentation::pair_of(idx);
    for (int rep = 0; rep < lambda; ++rep) {
      w.push_back(generator_x(P, i));
      w.push_back(generator_x(P, j));
      w.push_back(inverse(generator_x(P, i)));
      w.push_back(inverse(generator_x(P, j)));
    }
  }
  return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The saturation engine.
// ---------------------------------------------------------------------------

inline SquareResult square(const PcPresentation& P, SquareMode mode,
                           long long tier3_pair_budget = 20000) {
  if (P.p == 2) throw std::invalid_argument("square: p must be odd");
  const bool ab = P.abelian();
  if (!ab) require_be_hypotheses(P);

  SquareResult R;
  R.mode = mode;
  R.pres = &P;
  auto tgt = square_target(P, mode);
  R.target = tgt.order;
  R.assumption = tgt.assumption;

  Expander ex(P);
  const SymbolTable& S = ex.symbols();
  R.lattice = std::make_shared<SparseEchelon>(S.count(), P.p, 4);
  SparseEchelon& ech = *R.lattice;

  auto add_sum = [&](const FormalSum& s) {
    SparseRow row = fs_row(s);
    if (row.empty()) return;
    ech.add_row(row);
    ++R.relations_used;
  };
  auto add_diff = [&](FormalSum lhs, const FormalSum& rhs) {
    fs_merge(lhs, rhs, -1);
    add_sum(lhs);
  };
  AbelianStructure current;
  auto reached = [&]() {
    ech.compact();
    current = ech.cokernel();
    return detail::order_state(ech, current, R.target) == detail::OrderState::Match;
  };

  auto gens = detail::pc_generators(P);
  const int n = S.n();

  // --- Tier 1: defining relators of G against every pc-generator ----------
  for (int a = 0; a < P.r; ++a)
    for (int z = 0; z < n; ++z) {
      ech.add_row({{S.id(P.d + a, z), P.p}});
      ech.add_row({{S.id(z, P.d + a), P.p}});
      R.relations_used += 2;
    }
  for (int i = 1; i <= P.d; ++i) {
    std::vector<GroupElement> word(P.p, generator_x(P, i));
    GroupElement pe = element(P, FpRow(P.d, 0), P.pow[i - 1]);
    for (const auto& z : gens) {
      add_diff(ex.expand_word(word, z), ex.expand(pe, z));
      add_diff(ex.expand_word_right(z, word), ex.expand(z, pe));
    }
  }
  for (int i = 2; i <= P.d; ++i)
    for (int j = 1; j < i; ++j) {
      std::vector<GroupElement> word{generator_x(P, i), generator_x(P, j),
                                     inverse(generator_x(P, i)),
                                     inverse(generator_x(P, j))};
      GroupElement ce = element(P, FpRow(P.d, 0),
                                P.comm[PcPresentation::pair_index(i, j)]);
      for (const auto& z : gens) {
        add_diff(ex.expand_word(word, z), ex.expand(ce, z));
        add_diff(ex.expand_word_right(z, word), ex.expand(z, ce));
      }
    }
  if (!ab) {
    for (int a = 1; a <= P.r; ++a) {
      auto word = detail::u_commutator_word(P, a);
      for (int z = 0; z < n; ++z) {
        FormalSum sym;
        fs_add(sym, S.id(P.d + a - 1, z), 1);
        add_diff(ex.expand_word(word, gens[z]), sym);
        FormalSum symr;
        fs_add(symr, S.id(z, P.d + a - 1), 1);
        add_diff(ex.expand_word_right(gens[z], word), symr);
      }
    }
  }
  if (mode == SquareMode::Wedge) {
    for (const auto& y : gens) add_sum(ex.expand(y, y));
    for (const auto& y : gens)
      for (const auto& z : gens) {
        GroupElement g = multiply(y, z);
        add_sum(ex.expand(g, g));
      }
  }
  bool done = reached();

  // --- Tier 2: biderivation and Jacobi-type instances on generators -------
  if (!done) {
    for (const auto& y : gens)
      for (const auto& z : gens)
        for (const auto& w : gens) {
          FormalSum r1 = ex.expand(multiply(y, z), w);
          fs_merge(r1, ex.expand(detail::conj_by(y, z), detail::conj_by(y, w)), -1);
          fs_merge(r1, ex.expand(y, w), -1);
          add_sum(r1);
          FormalSum r2 = ex.expand(w, multiply(y, z));
          fs_merge(r2, ex.expand(w, y), -1);
          fs_merge(r2, ex.expand(detail::conj_by(y, w), detail::conj_by(y, z)), -1);
          add_sum(r2);
        }
    if (mode == SquareMode::Wedge) {
      // cyclic commutator identity [xi,xj]^xk [xk,xi]^xj [xj,xk]^xi = 1
      for (int i = 1; i <= P.d; ++i)
        for (int j = 1; j <= P.d; ++j)
          for (int k = 1; k <= P.d; ++k) {
            auto xi = generator_x(P, i), xj = generator_x(P, j), xk = generator_x(P, k);
            FormalSum s = ex.expand(commutator(xi, xj), xk);
            fs_merge(s, ex.expand(commutator(xk, xi), xj));
            fs_merge(s, ex.expand(commutator(xj, xk), xi));
            add_sum(s);
          }
    }
    done = reached();
  }

  // --- Tier 3: instances over full elements, lexicographic ----------------
  if (!done) {
    auto reps = coset_representatives(P);
    long long pairs = 0;
    for (std::size_t gi = 0; gi < reps.size() && !done; ++gi)
      for (std::size_t hi = 0; hi < reps.size() && !done; ++hi) {
        if (++pairs > tier3_pair_budget) break;
        const auto& g = reps[gi];
        const auto& h = reps[hi];
        GroupElement gh = multiply(g, h);
        for (const auto& z : gens) {
          FormalSum r1 = ex.expand(gh, z);
          fs_merge(r1, ex.expand(detail::conj_by(g, h), detail::conj_by(g, z)), -1);
          fs_merge(r1, ex.expand(g, z), -1);
          add_sum(r1);
        }
        if (mode == SquareMode::Wedge) add_sum(ex.expand(gh, gh));
        if (pairs % 500 == 0) done = reached();
      }
    if (!done) done = reached();
  }

  R.structure = current;
  R.certified = done;
  if (!done) {
    std::ostringstream os;
    os << "saturation stalled at order state ";
    os << (current.free_rank ? std::string("infinite") : current.order().str());
    os << " vs target " << R.target.str();
    R.diagnostics = os.str();
    return R;
  }

  R.view = std::make_shared<QuotientView>(QuotientView::build(ech));
  std::vector<FpRow> kappa(S.count(), FpRow(P.r, 0));
  for (int i = 1; i <= P.d; ++i)
    for (int k = 1; k <= P.d; ++k) kappa[S.id(i - 1, k - 1)] = P.cvec(i, k);
  if (mode == SquareMode::Wedge) {
    R.m_structure = R.view->kappa_kernel(kappa, P.r);
  } else {
    R.j2_structure = R.view->kappa_kernel(kappa, P.r);
    std::vector<SparseRow> diag;
    for (const auto& g : coset_representatives(P))
      diag.push_back(fs_row(ex.expand(g, g)));
    R.nabla_structure = R.view->subgroup(diag);
  }
  return R;
}

// ---------------------------------------------------------------------------
// Brute-force oracle: generators z(g,h) for all pairs, all defining
// relation instances.  Ground truth by construction; |G| <= p^4.
// ---------------------------------------------------------------------------

inline SquareResult oracle_square(const PcPresentation& P, SquareMode mode) {
  if (P.order_exponent() > 4)
    throw std::invalid_argument("oracle_square: |G| exceeds the p^4 cap");
  auto elems = enumerate_elements(P);
  const int m = static_cast<int>(elems.size());
  auto idx_of = [&](const GroupElement& g) {
    long long idx = 0, base = 1;
    for (int i = 0; i < P.d; ++i) { idx += base * g.a[i]; base *= P.p; }
    for (int t = 0; t < P.r; ++t) { idx += base * g.b[t]; base *= P.p; }
    return static_cast<int>(idx);
  };
  SquareResult R;
  R.mode = mode;
  R.pres = &P;
  R.oracle = true;
  R.oracle_order = m;
  auto tgt = square_target(P, mode);
  R.target = tgt.order;
  R.assumption = tgt.assumption;
  R.lattice = std::make_shared<SparseEchelon>(m * m, P.p, 4);
  SparseEchelon& ech = *R.lattice;

  // product and conjugation tables
  std::vector<int> prod(static_cast<std::size_t>(m) * m), conj(prod.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      prod[static_cast<std::size_t>(i) * m + j] = idx_of(multiply(elems[i], elems[j]));
      conj[static_cast<std::size_t>(i) * m + j] =
          idx_of(detail::conj_by(elems[i], elems[j]));
    }
  auto add3 = [&](int s1, int s2, int s3) {
    // s1 - s2 - s3 with merging of coincident symbols
    FormalSum s;
    fs_add(s, s1, 1);
    fs_add(s, s2, -1);
    fs_add(s, s3, -1);
    SparseRow row = fs_row(s);
    if (row.empty()) return;
    ech.add_row(row);
    ++R.relations_used;
  };
  long long next_compact = 300000;
  auto maybe_compact = [&] {
    if (R.relations_used >= next_compact) {
      ech.compact();
      next_compact += 300000;
    }
  };
  for (int g = 0; g < m; ++g)
    for (int gp = 0; gp < m; ++gp) {
      int gg = prod[static_cast<std::size_t>(g) * m + gp];
      int cgp = conj[static_cast<std::size_t>(g) * m + gp];
      for (int h = 0; h < m; ++h)
        add3(gg * m + h, cgp * m + conj[static_cast<std::size_t>(g) * m + h],
             g * m + h);
      maybe_compact();
    }
  for (int g = 0; g < m; ++g)
    for (int h = 0; h < m; ++h) {
      int ch = conj[static_cast<std::size_t>(h) * m + g];
      for (int hp = 0; hp < m; ++hp)
        add3(g * m + prod[static_cast<std::size_t>(h) * m + hp], g * m + h,
             ch * m + conj[static_cast<std::size_t>(h) * m + hp]);
      maybe_compact();
    }
  if (mode == SquareMode::Wedge)
    for (int g = 1; g < m; ++g) {
      ech.add_row({{g * m + g, 1}});
      ++R.relations_used;
    }
  ech.compact();
  R.structure = ech.cokernel();
  R.certified = ech.precision_ok(R.structure);
  if (!R.certified) {
    R.diagnostics = "oracle precision exhausted";
    return R;
  }
  R.view = std::make_shared<QuotientView>(QuotientView::build(ech));
  std::vector<FpRow> kappa(static_cast<std::size_t>(m) * m, FpRow(P.r, 0));
  for (int g = 0; g < m; ++g)
    for (int h = 0; h < m; ++h)
      kappa[static_cast<std::size_t>(g) * m + h] = commutator(elems[g], elems[h]).b;
  if (mode == SquareMode::Wedge) {
    R.m_structure = R.view->kappa_kernel(kappa, P.r);
  } else {
    R.j2_structure = R.view->kappa_kernel(kappa, P.r);
    std::vector<SparseRow> diag;
    for (int g = 0; g < m; ++g) diag.push_back({{g * m + g, 1}});
    R.nabla_structure = R.view->subgroup(diag);
  }
  return R;
}

// ---------------------------------------------------------------------------
// Derived invariants.
// ---------------------------------------------------------------------------

inline std::pair<AbelianStructure, AbelianStructure> j2_and_nabla(
    const SquareResult& R) {
  if (R.mode != SquareMode::Tensor)
    throw std::invalid_argument("j2_and_nabla: tensor-mode result required");
  if (!R.certified) throw std::invalid_argument("j2_and_nabla: uncertified result");
  return {R.j2_structure, R.nabla_structure};
}

// Membership of g (x) x_k-expansions in the relation lattice, for all k.
inline bool in_exterior_center(const PcPresentation& P, const SquareResult& R,
                               const GroupElement& g) {
  if (R.oracle) {
    const int m = R.oracle_order;
    auto idx_of = [&](const GroupElement& e) {
      long long idx = 0, base = 1;
      for (int i = 0; i < P.d; ++i) { idx += base * e.a[i]; base *= P.p; }
      for (int t = 0; t < P.r; ++t) { idx += base * e.b[t]; base *= P.p; }
      return static_cast<int>(idx);
    };
    // for central g, g ^ (z1 z2) = (g ^ z1) + (g ^ z2), so vanishing on
    // every pc-generator (central ones included) is the full condition
    for (int k = 1; k <= P.d; ++k) {
      int row = idx_of(g) * m + idx_of(generator_x(P, k));
      if (!R.lattice->contains({{row, 1}})) return false;
    }
    for (int a = 1; a <= P.r; ++a)
      if (!R.lattice->contains({{idx_of(g) * m + idx_of(generator_u(P, a)), 1}}))
        return false;
    return true;
  }
  Expander ex(P);
  for (int k = 1; k <= P.d; ++k)
    if (!R.lattice->contains(fs_row(ex.expand(g, generator_x(P, k))))) return false;
  for (int a = 1; a <= P.r; ++a)
    if (!R.lattice->contains(fs_row(ex.expand(g, generator_u(P, a)))))
      return false;
  return true;
}

inline SubgroupDescription exterior_center(const PcPresentation& P,
                                           const SquareResult& R) {
  if (R.mode != SquareMode::Wedge)
    throw std::invalid_argument("exterior_center: wedge-mode result required");
  if (!R.certified)
    throw std::invalid_argument("exterior_center: uncertified result");
  SubgroupDescription s(P.r, P.p);
  s.kind = SubgroupKind::ExteriorCenter;
  auto zen = center(P);
  const auto& mains = zen.main_rows;
  const int mm = static_cast<int>(mains.size());
  long long combos = 1;
  for (int i = 0; i < mm; ++i) combos *= P.p;
  long long cent = 1;
  for (int t = 0; t < P.r; ++t) cent *= P.p;
  FpSpan main_hits(P.d, P.p);
  for (long long ci = 0; ci < combos; ++ci) {
    FpRow a(P.d, 0);
    long long x = ci;
    for (int i = 0; i < mm; ++i) {
      int c = static_cast<int>(x % P.p);
      x /= P.p;
      for (int j = 0; j < P.d; ++j)
        a[j] = fp_norm(a[j] + static_cast<long long>(c) * mains[i][j], P.p);
    }
    for (long long bi = 0; bi < cent; ++bi) {
      FpRow b(P.r, 0);
      long long y = bi;
      for (int t = 0; t < P.r; ++t) { b[t] = static_cast<int>(y % P.p); y /= P.p; }
      GroupElement g = element(P, a, b);
      if (g.is_identity()) continue;
      if (!in_exterior_center(P, R, g)) continue;
      bool main_zero = std::all_of(a.begin(), a.end(), [](int v) { return v == 0; });
      if (main_zero) s.central_rows.add(b);
      else main_hits.add(a);
    }
  }
  s.main_rows = main_hits.rows();
  return s;
}

struct CapabilityReport {
  bool capable = false;
  std::string witness;
  int exterior_center_dim = 0;
  // cross-check (a): |M(G)| > |M(G/K)| for every central K of order p
  bool order_check_applicable = false;
  bool order_check_all_dropped = false;
  // cross-check (b): exp p^2 with elementary exterior square forces non-capable
  bool elementary_wedge_check_triggered = false;
  bool elementary_wedge_check_consistent = true;
  // cross-check (c): rank-full prediction, capable iff t != 1
  bool t_prediction_applicable = false;
  bool t_predicts_capable = false;
  bool t_prediction_consistent = true;
};

inline int multiplier_exponent_any(const PcPresentation& P) {
  if (P.abelian())
    return multiplier_abelian(abelian_type(P), P.p).p_exponent(P.p);
  return multiplier_order_exponent(P);
}

inline CapabilityReport capability_report(const PcPresentation& P) {
  CapabilityReport rep;
  auto R = square(P, SquareMode::Wedge);
  if (!R.certified) throw std::runtime_error("capability_report: uncertified square");
  auto zc = exterior_center(P, R);
  rep.exterior_center_dim = zc.dim();
  rep.capable = zc.dim() == 0;
  if (rep.capable) {
    rep.witness = "exterior center trivial";
  } else {
    std::ostringstream os;
    os << "nontrivial exterior center of order p^" << zc.dim();
    if (zc.central_rows.dim() > 0) {
      os << ", e.g. u-word (";
      const auto& row = zc.central_rows.rows()[0];
      for (std::size_t t = 0; t < row.size(); ++t) os << (t ? " " : "") << row[t];
      os << ")";
    }
    rep.witness = os.str();
  }
  // (a) multiplier drop under every order-p central quotient
  if (!P.abelian() && P.r >= 1) {
    rep.order_check_applicable = true;
    rep.order_check_all_dropped = true;
    int mg = multiplier_exponent_any(P);
    // canonical representatives of the 1-dim subspaces of F_p^r
    std::vector<FpRow> lines;
    long long total = 1;
    for (int t = 0; t < P.r; ++t) total *= P.p;
    for (long long v = 1; v < total; ++v) {
      FpRow b(P.r, 0);
      long long x = v;
      for (int t = 0; t < P.r; ++t) { b[t] = static_cast<int>(x % P.p); x /= P.p; }
      int lead = 0;
      while (b[lead] == 0) ++lead;
      if (b[lead] != 1) continue;
      lines.push_back(b);
    }
    for (const auto& line : lines) {
      FpSpan k(P.r, P.p);
      k.add(line);
      auto Q = quotient_by_central(P, k);
      if (multiplier_exponent_any(Q) >= mg) {
        rep.order_check_all_dropped = false;
        break;
      }
    }
  }
  // (b) implication: exp p^2 and elementary wedge -> non-capable
  auto srep = structure_report(P);
  if (srep.exponent == static_cast<long long>(P.p) * P.p &&
      R.structure.elementary(P.p)) {
    rep.elementary_wedge_check_triggered = true;
    rep.elementary_wedge_check_consistent = !rep.capable;
  }
  // (c) rank-full special groups: capable iff t != 1
  if (srep.is_special && !srep.outside_paper_scope &&
      srep.d_derived == P.d * (P.d - 1) / 2) {
    rep.t_prediction_applicable = true;
    rep.t_predicts_capable = srep.t != 1;
    rep.t_prediction_consistent = rep.t_predicts_capable == rep.capable;
  }
  return rep;
}

}  // namespace specp
