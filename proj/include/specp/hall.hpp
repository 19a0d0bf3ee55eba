#pragma once

// Basic commutator enumeration (Hall's weight and ordering rules) and the
// Witt formula counting them.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace specp {

inline int mobius(long long m) {
  if (m < 1) throw std::invalid_argument("mobius: m >= 1 required");
  int s = 0;
  for (long long p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    m /= p;
    if (m % p == 0) return 0;  // squareful
    ++s;
  }
  if (m > 1) ++s;
  return (s % 2 == 0) ? 1 : -1;
}

// chi_n(d) = (1/n) * sum_{m | n} mu(m) d^(n/m)
inline long long witt_chi(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("witt_chi: n, d >= 1 required");
  long long sum = 0;
  for (int m = 1; m <= n; ++m) {
    if (n % m) continue;
    long long pw = 1;
    for (int i = 0; i < n / m; ++i) pw *= d;
    sum += mobius(m) * pw;
  }
  return sum / n;
}

// A basic commutator is either a letter or [left, right] over previously
// enumerated entries; `pos` is its position in the global total order.
struct BasicCommutator {
  int weight;
  int letter = -1;  // 1-based letter index when weight == 1
  int left = -1, right = -1;  // positions into the enumeration otherwise
  int pos = 0;
};

class HallBasis {
 public:
  // All basic commutators on d letters up to max_weight (scope cap 4),
  // in order: by weight, lexicographic within a weight.
  HallBasis(int d, int max_weight) : d_(d) {
    if (max_weight > 4) throw std::invalid_argument("enumerate_basic: weight cap is 4");
    if (d < 1 || max_weight < 1) throw std::invalid_argument("enumerate_basic: d, weight >= 1");
    for (int i = 1; i <= d; ++i)
      entries_.push_back({1, i, -1, -1, static_cast<int>(entries_.size())});
    for (int w = 2; w <= max_weight; ++w) {
      std::size_t before = entries_.size();
      // candidates [ci, cj] with wt(ci)+wt(cj)=w, ci > cj, and the Hall
      // condition cj >= t when ci = [s, t]; enumeration order (ci, cj)
      // ascending is exactly lexicographic order within the weight.
      for (std::size_t i = 0; i < before; ++i) {
        if (entries_[i].weight >= w) continue;
        for (std::size_t j = 0; j < i; ++j) {
          if (entries_[i].weight + entries_[j].weight != w) continue;
          if (entries_[i].left >= 0 &&
              static_cast<int>(j) < entries_[i].right)
            continue;
          entries_.push_back({w, -1, static_cast<int>(i), static_cast<int>(j),
                              static_cast<int>(entries_.size())});
        }
      }
    }
  }

  const std::vector<BasicCommutator>& entries() const { return entries_; }

  long long count_of_weight(int w) const {
    long long c = 0;
    for (const auto& e : entries_)
      if (e.weight == w) ++c;
    return c;
  }

  std::string str(const BasicCommutator& e) const {
    if (e.letter > 0) {
      std::ostringstream os;
      os << "x" << e.letter;
      return os.str();
    }
    return "[" + str(entries_[e.left]) + "," + str(entries_[e.right]) + "]";
  }

 private:
  int d_;
  std::vector<BasicCommutator> entries_;
};

struct RankCrosscheck {
  int d;
  long long chi2, chi3;
  bool chi2_matches_half_d_dm1;   // chi_2(d) = d(d-1)/2
  bool chi3_matches_third_formula;  // chi_3(d) = d(d-1)(d+1)/3
};

inline RankCrosscheck rank_crosscheck(int d) {
  if (d < 2) throw std::invalid_argument("rank_crosscheck: d >= 2 required");
  RankCrosscheck r{d, witt_chi(2, d), witt_chi(3, d), false, false};
  r.chi2_matches_half_d_dm1 = (r.chi2 == static_cast<long long>(d) * (d - 1) / 2);
  r.chi3_matches_third_formula =
      (r.chi3 == static_cast<long long>(d) * (d - 1) * (d + 1) / 3);
  return r;
}

}  // namespace specp
