#pragma once

// Numerical semigroup utilities: membership, gap sets, genus, the associated
// Young diagrams, and exact monomial-ideal identities. Everything here is
// integer arithmetic; nothing depends on the analytic layer.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "sigma345/errors.hpp"

namespace sigma345 {

struct NumericalSemigroup {
  std::vector<long> generators;    // sorted ascending, gcd 1
  long frobenius_bound;            // min gen * max gen, safe membership cutoff
  std::vector<char> table;         // membership table [0, frobenius_bound]

  explicit NumericalSemigroup(std::vector<long> gens) : generators(std::move(gens)) {
    if (generators.empty()) throw NotNumerical("no generators");
    std::sort(generators.begin(), generators.end());
    for (long g : generators)
      if (g <= 0) throw NotNumerical("generators must be positive");
    long d = 0;
    for (long g : generators) d = std::gcd(d, g);
    if (d != 1) throw NotNumerical("gcd of generators is not 1");
    frobenius_bound = generators.front() * generators.back();
    table.assign(static_cast<std::size_t>(frobenius_bound) + 1, 0);
    table[0] = 1;
    for (long n = 1; n <= frobenius_bound; ++n)
      for (long g : generators)
        if (n >= g && table[static_cast<std::size_t>(n - g)]) {
          table[static_cast<std::size_t>(n)] = 1;
          break;
        }
  }

  bool contains(long n) const {
    if (n < 0) return false;
    if (n > frobenius_bound) return true;  // every gap lies below the bound
    return table[static_cast<std::size_t>(n)] != 0;
  }

  std::vector<long> gaps() const {
    std::vector<long> out;
    for (long n = 1; n <= frobenius_bound; ++n)
      if (!table[static_cast<std::size_t>(n)]) out.push_back(n);
    return out;
  }

  long genus() const { return static_cast<long>(gaps().size()); }

  // the n-th element of the semigroup in increasing order, element(0) = 0
  long element(long n) const {
    long count = -1;
    for (long v = 0;; ++v)
      if (contains(v) && ++count == n) return v;
  }
};

inline std::vector<long> gaps(const std::vector<long>& gens) {
  return NumericalSemigroup(gens).gaps();
}

struct YoungDiagram {
  std::vector<long> parts;  // weakly decreasing, positive
  bool operator==(const YoungDiagram&) const = default;
};

inline YoungDiagram transpose(const YoungDiagram& d) {
  YoungDiagram t;
  if (d.parts.empty()) return t;
  for (long col = 0; col < d.parts.front(); ++col) {
    long h = 0;
    for (long p : d.parts)
      if (p > col) ++h;
    t.parts.push_back(h);
  }
  return t;
}

inline bool self_transpose(const YoungDiagram& d) { return transpose(d) == d; }

// Partition attached to a gap sequence l_1 < ... < l_g:
// part_i = l_{g+1-i} - g + i. For the gap set {1,2} this gives (1,1).
inline YoungDiagram young_diagram_from_gaps(const std::vector<long>& gap_list) {
  YoungDiagram d;
  long g = static_cast<long>(gap_list.size());
  for (long i = 1; i <= g; ++i)
    d.parts.push_back(gap_list[static_cast<std::size_t>(g - i)] - g + i);
  return d;
}

// weight_fn(n) must enumerate the non-gaps in increasing order, weight_fn(0)=0.
template <typename WeightFn>
YoungDiagram young_diagram(WeightFn&& weight_fn, int genus) {
  // recover the gap set: the complement of the weight image
  std::vector<long> gap_list;
  long bound = 8 * (genus + 1) + 8;
  std::vector<char> hit(static_cast<std::size_t>(bound) + 1, 0);
  for (long n = 0;; ++n) {
    long w = weight_fn(n);
    if (w > bound) break;
    hit[static_cast<std::size_t>(w)] = 1;
  }
  for (long v = 1; v <= bound; ++v)
    if (!hit[static_cast<std::size_t>(v)]) gap_list.push_back(v);
  gap_list.resize(static_cast<std::size_t>(genus));
  return young_diagram_from_gaps(gap_list);
}

inline YoungDiagram young_diagram_g2() {
  return young_diagram_from_gaps(gaps({3, 4, 5}));
}

// Leading polynomial of the genus-2 expansion in the power sums
// T1 = t1 + t2, T2 = (t1^2 + t2^2)/2; equals t1*t2.
template <typename T>
T schur_leading(const T& T1, const T& T2) {
  return T1 * T1 / 2.0 - T2;
}

// A monomial relation between products of letters Z_a: both sides are lists
// of (letter, power). Substituting Z_a -> t^a turns each side into a single
// power of t; the relation holds iff the two exponents agree exactly.
struct MonomialRelation {
  std::vector<std::pair<long, long>> lhs, rhs;

  long exponent(const std::vector<std::pair<long, long>>& side) const {
    long e = 0;
    for (auto [letter, power] : side) e += letter * power;
    return e;
  }
  bool balanced() const { return exponent(lhs) == exponent(rhs); }
};

// The nine binomial generators of the defining ideal of the monomial curve
// with exponent semigroup <6,13,14,15,16>.
inline std::vector<MonomialRelation> h12_relations() {
  return {
      {{{13, 2}}, {{6, 2}, {14, 1}}},
      {{{13, 1}, {14, 1}}, {{6, 2}, {15, 1}}},
      {{{14, 2}}, {{13, 1}, {15, 1}}},
      {{{14, 2}}, {{6, 2}, {16, 1}}},
      {{{13, 1}, {16, 1}}, {{14, 1}, {15, 1}}},
      {{{15, 2}}, {{6, 5}}},
      {{{14, 1}, {16, 1}}, {{6, 5}}},
      {{{15, 1}, {16, 1}}, {{6, 3}, {13, 1}}},
      {{{16, 2}}, {{6, 3}, {14, 1}}},
  };
}

inline std::vector<bool> h12_kernel_check() {
  std::vector<bool> out;
  for (const auto& rel : h12_relations()) out.push_back(rel.balanced());
  return out;
}

// Monomial-curve relations for <3,4,5> in weight-balanced form:
// Z4^2 = Z3 Z5, Z4 Z5 = Z3^3, Z5^2 = Z3^2 Z4.
inline std::vector<MonomialRelation> relations_345() {
  return {
      {{{4, 2}}, {{3, 1}, {5, 1}}},
      {{{4, 1}, {5, 1}}, {{3, 3}}},
      {{{5, 2}}, {{3, 2}, {4, 1}}},
  };
}

// Two circulating variants of the last two relations (Z4 Z5 = Z3^5 and
// Z5^2 = Z3^3 Z4) are weight-inconsistent; they are kept here only so the
// suites can demonstrate that they fail the substitution check.
inline std::vector<MonomialRelation> relations_345_unbalanced() {
  return {
      {{{4, 1}, {5, 1}}, {{3, 5}}},
      {{{5, 2}}, {{3, 3}, {4, 1}}},
  };
}

}  // namespace sigma345
