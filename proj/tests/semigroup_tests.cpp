#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "sigma345/errors.hpp"
#include "sigma345/semigroup.hpp"

using namespace sigma345;

TEST_CASE("gap sets of the reference semigroups") {
  CHECK(gaps({3, 4, 5}) == std::vector<long>{1, 2});
  CHECK(gaps({3, 7, 8}) == std::vector<long>{1, 2, 4, 5});
  CHECK(gaps({6, 13, 14, 15, 16}) ==
        std::vector<long>{1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 17, 23});
  CHECK(gaps({5, 4, 3}) == gaps({3, 4, 5}));  // order of generators irrelevant
  CHECK(gaps({3, 4}) == std::vector<long>{1, 2, 5});
  CHECK(gaps({3, 5}) == std::vector<long>{1, 2, 4, 7});
  CHECK(gaps({1}).empty());
}

TEST_CASE("genus") {
  CHECK(NumericalSemigroup({3, 4, 5}).genus() == 2);
  CHECK(NumericalSemigroup({3, 7, 8}).genus() == 4);
  CHECK(NumericalSemigroup({6, 13, 14, 15, 16}).genus() == 12);
}

TEST_CASE("membership and enumeration") {
  const NumericalSemigroup s({3, 4, 5});
  CHECK(s.frobenius_bound == 15);
  CHECK(s.contains(0));
  CHECK(!s.contains(1));
  CHECK(!s.contains(2));
  CHECK(s.contains(3));
  CHECK(s.contains(2024));
  CHECK(!s.contains(-3));
  CHECK(s.element(0) == 0);
  CHECK(s.element(1) == 3);
  CHECK(s.element(2) == 4);
  CHECK(s.element(3) == 5);
  CHECK(s.element(4) == 6);
  CHECK(s.element(10) == 12);

  const NumericalSemigroup h({6, 13, 14, 15, 16});
  CHECK(!h.contains(23));
  CHECK(h.contains(24));
  for (long n = 24; n < 40; ++n) CHECK(h.contains(n));
}

TEST_CASE("degenerate generator sets are rejected") {
  CHECK_THROWS_AS(NumericalSemigroup({4, 6}), NotNumerical);
  CHECK_THROWS_AS(NumericalSemigroup({2, 4, 8}), NotNumerical);
  CHECK_THROWS_AS(NumericalSemigroup({}), NotNumerical);
  CHECK_THROWS_AS(NumericalSemigroup({0, 3}), NotNumerical);
  CHECK_THROWS_AS(NumericalSemigroup({-3, 4}), NotNumerical);
}

TEST_CASE("Young diagrams from gap sequences") {
  const YoungDiagram d345 = young_diagram_from_gaps(gaps({3, 4, 5}));
  CHECK(d345.parts == std::vector<long>{1, 1});
  CHECK(transpose(d345).parts == std::vector<long>{2});
  CHECK(!self_transpose(d345));
  CHECK(transpose(transpose(d345)) == d345);

  const YoungDiagram d34 = young_diagram_from_gaps(gaps({3, 4}));
  CHECK(d34.parts == std::vector<long>{3, 1, 1});
  CHECK(self_transpose(d34));

  const YoungDiagram d35 = young_diagram_from_gaps(gaps({3, 5}));
  CHECK(d35.parts == std::vector<long>{4, 2, 1, 1});
  CHECK(self_transpose(d35));

  const YoungDiagram d378 = young_diagram_from_gaps(gaps({3, 7, 8}));
  CHECK(d378.parts == std::vector<long>{2, 2, 1, 1});
  CHECK(transpose(d378).parts == std::vector<long>{4, 2});

  CHECK(young_diagram_g2() == d345);
}

TEST_CASE("Young diagram recovered from a weight enumerator") {
  const NumericalSemigroup s({3, 4, 5});
  const YoungDiagram d =
      young_diagram([&s](long n) { return s.element(n); }, 2);
  CHECK(d == young_diagram_g2());

  const NumericalSemigroup s34({3, 4});
  const YoungDiagram d34 =
      young_diagram([&s34](long n) { return s34.element(n); }, 3);
  CHECK(d34.parts == std::vector<long>{3, 1, 1});
}

TEST_CASE("Schur leading polynomial") {
  CHECK(schur_leading(0.0, 0.0) == 0.0);
  CHECK(schur_leading(3.0, 2.0) == doctest::Approx(2.5));
  // factored form: T1 = t1 + t2, T2 = (t1^2 + t2^2)/2 gives t1 t2
  const double t1 = 1.7, t2 = -0.3;
  CHECK(schur_leading(t1 + t2, 0.5 * (t1 * t1 + t2 * t2)) ==
        doctest::Approx(t1 * t2).epsilon(1e-14));
}

TEST_CASE("monomial relations for the genus-12 curve") {
  const auto rels = h12_relations();
  REQUIRE(rels.size() == 9);
  for (const auto& rel : rels) {
    CHECK(rel.balanced());
    const long w = rel.exponent(rel.lhs);
    CHECK(w >= 26);
    CHECK(w <= 32);
  }
  CHECK(rels[0].exponent(rels[0].lhs) == 26);
  CHECK(rels[8].exponent(rels[8].rhs) == 32);
  const auto ok = h12_kernel_check();
  REQUIRE(ok.size() == 9);
  CHECK(std::all_of(ok.begin(), ok.end(), [](bool b) { return b; }));
}

TEST_CASE("monomial relations for the genus-2 curve") {
  for (const auto& rel : relations_345()) CHECK(rel.balanced());
  CHECK(relations_345()[0].exponent(relations_345()[0].lhs) == 8);
  for (const auto& rel : relations_345_unbalanced()) CHECK(!rel.balanced());
}
