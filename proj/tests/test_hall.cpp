#include <catch2/catch_amalgamated.hpp>

#include "specp/hall.hpp"

using namespace specp;

TEST_CASE("mobius table") {
  int expect[] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1};  // mu(1..10)
  for (int m = 1; m <= 10; ++m) CHECK(mobius(m) == expect[m - 1]);
  // squareful values vanish
  for (int m : {4, 8, 9, 12, 16, 18, 25, 27, 49, 50, 98, 100}) CHECK(mobius(m) == 0);
  // products of distinct primes alternate sign
  CHECK(mobius(2 * 3 * 5) == -1);
  CHECK(mobius(2 * 3 * 5 * 7) == 1);
  int count = 0;
  for (int m = 1; m <= 100; ++m) count += mobius(m);  // just exercise the range
  (void)count;
}

TEST_CASE("witt formula values") {
  for (int d = 1; d <= 6; ++d) CHECK(witt_chi(1, d) == d);
  CHECK(witt_chi(2, 3) == 3);
  CHECK(witt_chi(3, 3) == 8);
  CHECK(witt_chi(3, 4) == 20);  // (64 - 4)/3
  for (int n = 2; n <= 4; ++n) CHECK(witt_chi(n, 1) == 0);
}

TEST_CASE("enumeration counts match the Witt formula") {
  for (int d = 1; d <= 6; ++d) {
    HallBasis hb(d, 4);
    for (int n = 1; n <= 4; ++n) CHECK(hb.count_of_weight(n) == witt_chi(n, d));
  }
}

TEST_CASE("enumeration on 3 letters up to weight 3 has 14 entries in order") {
  HallBasis hb(3, 3);
  REQUIRE(hb.entries().size() == 14);
  // weights are non-decreasing along the order
  for (std::size_t i = 1; i < hb.entries().size(); ++i)
    CHECK(hb.entries()[i].weight >= hb.entries()[i - 1].weight);
  CHECK(hb.str(hb.entries()[3]) == "[x2,x1]");
  CHECK(hb.str(hb.entries()[5]) == "[x3,x2]");
  CHECK(hb.str(hb.entries()[6]) == "[[x2,x1],x1]");
}

TEST_CASE("hall condition filters non-basic commutators") {
  // [[x3,x2],x1] is not basic (x1 < x2); it must not appear for d=3, w=3
  HallBasis hb(3, 3);
  for (const auto& e : hb.entries()) {
    if (e.weight != 3) continue;
    const auto& left = hb.entries()[e.left];
    CHECK(e.right >= left.right);
  }
}

TEST_CASE("rank crosscheck links chi to the closed-form predictions") {
  for (int d = 2; d <= 6; ++d) {
    auto r = rank_crosscheck(d);
    CHECK(r.chi2_matches_half_d_dm1);
    CHECK(r.chi3_matches_third_formula);
  }
  CHECK(rank_crosscheck(3).chi3 == 8);
  CHECK(rank_crosscheck(4).chi3 == 20);
  CHECK(rank_crosscheck(2).chi3 == 2);
  CHECK(rank_crosscheck(2).chi2 == 1);
}

TEST_CASE("degenerate single letter") {
  HallBasis hb(1, 4);
  CHECK(hb.entries().size() == 1);
}

TEST_CASE("weight cap enforced") {
  CHECK_THROWS(HallBasis(3, 5));
}
