#pragma once

// Homology of the 3-sheeted cover. Candidate cycles are based loop words:
// from a hub placed well below the branch set, travel to a branch value,
// wind around it, come back. A word whose total monodromy exponent is zero
// lifts to a closed loop on each sheet. Six such lifts (three words, two
// start sheets) span enough of H_1 that some four of them form a unimodular
// intersection lattice; integer congruence then turns that quadruple into a
// canonical (a1, a2, b1, b2) basis.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"
#include "sigma345/paths.hpp"

namespace sigma345 {

using LoopWord = std::vector<std::pair<int, int>>;  // (branch index, winding)

// ccw monodromy exponents of y4 around mu0, mu1, mu2
inline int word_exponent(const LoopWord& word) {
  static constexpr int E[3] = {2, 1, 1};
  int s = 0;
  for (auto [bi, sgn] : word) s += E[bi] * sgn;
  return ((s % 3) + 3) % 3;
}

inline std::vector<PathPiece> build_word_pieces(const CurveParams<double>& cp,
                                                const LoopWord& word,
                                                double jitter = 0.0) {
  const auto mus = cp.branch_values();
  const Complex ctr = (mus[0] + mus[1] + mus[2]) / 3.0;
  double spread = 0;
  for (auto m : mus) spread = std::max(spread, std::abs(m - ctr));
  spread += 1.0 + cp.max_abs() * 0.1;
  // jitter displaces the hub so different cycles do not share base segments
  const Complex hub = ctr - Complex(0, 2.5 * spread) - 0.37 * spread +
                      0.09 * spread * jitter *
                          std::exp(Complex(0, 0.7) * jitter);
  std::vector<PathPiece> pieces;
  for (auto [bi, sgn] : word) {
    const Complex mu = mus[static_cast<std::size_t>(bi)];
    const double r = 0.25 * cp.branch_gap() * (1 + 0.06 * jitter + 0.03 * bi);
    const Complex d = mu - hub;
    const Complex dhat = d / std::abs(d);
    const Complex b = mu - dhat * r;
    const double th0 = std::arg(b - mu);
    pieces.push_back(PathPiece::line(hub, b));
    pieces.push_back(sgn > 0 ? PathPiece::arc(mu, r, th0, th0 + 2 * pi)
                             : PathPiece::arc(mu, r, th0, th0 - 2 * pi));
    pieces.push_back(PathPiece::line(b, hub));
  }
  return pieces;
}

struct Cycle {
  LoopWord word;
  int start_sheet = 0;
  std::string label;
  std::vector<PathPiece> segments;
  Complex y4_start;
  std::vector<Complex> zs;   // polyline vertices
  std::vector<int> sheets;   // canonical sheet index per vertex
  std::vector<Complex> y4s;  // continued y4 per vertex

  Cycle(const CurveParams<double>& cp, LoopWord w, int sheet, double jitter,
        std::string lbl = "")
      : word(std::move(w)), start_sheet(sheet), label(std::move(lbl)) {
    segments = build_word_pieces(cp, word, jitter);
    const Complex hub0 = segments.front().z(0.0);
    y4_start = cbrt_principal(cp.k4(hub0)) * zeta3<double>(sheet);
    zs = polyline_of(segments, 420);
    auto [sh, y4v] = sheets_along(cp, zs, y4_start);
    sheets = std::move(sh);
    y4s = std::move(y4v);
    if (std::abs(y4s.back() - y4s.front()) >
        1e-6 * std::max(1.0, std::abs(y4s.front())))
      throw HomologyRankFailure("cycle lift does not close");
  }
};

// signed crossings of two lifted loops, counted only where the sheets agree
inline long intersection_number(const CurveParams<double>& cp, const Cycle& cA,
                                const Cycle& cB) {
  const auto& A = cA.zs;
  const auto& B = cB.zs;
  const std::size_t na = A.size() - 1, nb = B.size() - 1;
  // bounding boxes make the quadratic scan cheap
  std::vector<double> bxl(nb), bxh(nb), byl(nb), byh(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    bxl[j] = std::min(B[j].real(), B[j + 1].real());
    bxh[j] = std::max(B[j].real(), B[j + 1].real());
    byl[j] = std::min(B[j].imag(), B[j + 1].imag());
    byh[j] = std::max(B[j].imag(), B[j + 1].imag());
  }
  long tot = 0;
  for (std::size_t i = 0; i < na; ++i) {
    const Complex a0 = A[i], a1 = A[i + 1];
    const double axl = std::min(a0.real(), a1.real());
    const double axh = std::max(a0.real(), a1.real());
    const double ayl = std::min(a0.imag(), a1.imag());
    const double ayh = std::max(a0.imag(), a1.imag());
    const Complex d1 = a1 - a0;
    for (std::size_t j = 0; j < nb; ++j) {
      if (axh < bxl[j] || bxh[j] < axl || ayh < byl[j] || byh[j] < ayl)
        continue;
      const Complex b0 = B[j];
      const Complex d2 = B[j + 1] - b0;
      const double den = d1.real() * d2.imag() - d1.imag() * d2.real();
      if (std::abs(den) <= 1e-14) continue;
      const Complex dx = b0 - a0;
      const double s = (dx.real() * d2.imag() - dx.imag() * d2.real()) / den;
      const double t = (dx.real() * d1.imag() - dx.imag() * d1.real()) / den;
      if (s <= 1e-9 || s >= 1 - 1e-9 || t <= 1e-9 || t >= 1 - 1e-9) continue;
      const Complex zp = a0 + s * d1;
      const int sa = local_sheet(cp, A[i], cA.y4s[i], zp);
      const int sb = local_sheet(cp, B[j], cB.y4s[j], zp);
      if (sa != sb) continue;
      tot += den > 0 ? 1 : -1;
    }
  }
  return tot;
}

inline long pfaffian4(const std::vector<std::vector<long>>& M) {
  return M[0][1] * M[2][3] - M[0][2] * M[1][3] + M[0][3] * M[1][2];
}

// Antisymmetric integer Gram matrix -> symplectic normal form by congruence.
// Returns (N, U) with N = U^T M U built from [[0,d],[-d,0]] blocks; columns
// of U express the new basis in the old one.
inline std::pair<std::vector<std::vector<long>>, std::vector<std::vector<long>>>
symplectic_reduce(std::vector<std::vector<long>> M) {
  const int n = static_cast<int>(M.size());
  std::vector<std::vector<long>> U(static_cast<std::size_t>(n),
                                   std::vector<long>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) U[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  auto colop = [&](int i, int j, long k) {
    // basis vector v_i += k v_j
    for (int t = 0; t < n; ++t) M[i][t] += k * M[j][t];
    for (int t = 0; t < n; ++t) M[t][i] += k * M[t][j];
    for (int t = 0; t < n; ++t) U[t][i] += k * U[t][j];
  };
  auto swap = [&](int i, int j) {
    if (i == j) return;
    std::swap(M[i], M[j]);
    for (int t = 0; t < n; ++t) std::swap(M[t][i], M[t][j]);
    for (int t = 0; t < n; ++t) std::swap(U[t][i], U[t][j]);
  };
  auto negate = [&](int i) {
    for (int t = 0; t < n; ++t) M[i][t] = -M[i][t];
    for (int t = 0; t < n; ++t) M[t][i] = -M[t][i];
    for (int t = 0; t < n; ++t) U[t][i] = -U[t][i];
  };
  int p = 0;
  int guard = 0;
  while (p < n - 1) {
    if (++guard > 200)
      throw HomologyRankFailure("symplectic reduction did not converge");
    // smallest nonzero entry of the trailing block becomes the pivot
    int bi = -1, bj = -1;
    for (int i = p; i < n; ++i)
      for (int j = p; j < n; ++j)
        if (i != j && M[i][j] != 0 &&
            (bi < 0 || std::abs(M[i][j]) < std::abs(M[bi][bj]))) {
          bi = i;
          bj = j;
        }
    if (bi < 0) break;
    swap(p, bi);
    bj = bj == bi ? p : (bj == p ? bi : bj);
    swap(p + 1, bj);
    if (M[p][p + 1] < 0) negate(p + 1);
    const long d = M[p][p + 1];
    // v_t += k v_{p+1} shifts M[p][t] by k d; v_t += k v_p shifts M[p+1][t] by -k d
    bool clean = true;
    for (int t = p + 2; t < n; ++t) {
      long k = std::lround(static_cast<double>(M[p][t]) / d);
      if (k) colop(t, p + 1, -k);
      if (M[p][t] != 0) clean = false;
      k = std::lround(static_cast<double>(M[p + 1][t]) / d);
      if (k) colop(t, p, k);
      if (M[p + 1][t] != 0) clean = false;
    }
    if (clean) p += 2;
    // otherwise a remainder smaller than d survived and is the next pivot
  }
  return {M, U};
}

struct HomologyBasis {
  std::vector<Cycle> pool;
  std::vector<std::string> names;
  std::array<int, 4> chosen{};
  // rows a1, a2, b1, b2 as integer combinations of the chosen pool cycles
  std::array<std::array<long, 4>, 4> basis_coords{};
  std::vector<std::vector<long>> gram;
};

inline HomologyBasis build_homology(const CurveParams<double>& cp) {
  const std::vector<std::pair<std::string, LoopWord>> words = {
      {"w01", {{0, 1}, {1, 1}}},
      {"w02", {{0, 1}, {2, 1}}},
      {"w12", {{1, 1}, {2, -1}}},
  };
  HomologyBasis H;
  double jit = 1.0;
  for (const auto& [wname, w] : words) {
    if (word_exponent(w) != 0)
      throw HomologyRankFailure("loop word has nonzero monodromy");
    for (int s = 0; s < 2; ++s) {  // sheet 2 lift is minus the other two
      H.pool.emplace_back(cp, w, s, jit, wname + "s" + std::to_string(s));
      H.names.push_back(H.pool.back().label);
      jit += 1.0;
    }
  }
  const int n = static_cast<int>(H.pool.size());
  H.gram.assign(static_cast<std::size_t>(n),
                std::vector<long>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const long v = intersection_number(cp, H.pool[static_cast<std::size_t>(i)],
                                         H.pool[static_cast<std::size_t>(j)]);
      H.gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      H.gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = -v;
    }
  // first 4-subset with unimodular pairing, in lexicographic order
  bool found = false;
  std::array<int, 4> comb{};
  std::vector<std::vector<long>> sub(4, std::vector<long>(4, 0));
  for (int i0 = 0; i0 < n && !found; ++i0)
    for (int i1 = i0 + 1; i1 < n && !found; ++i1)
      for (int i2 = i1 + 1; i2 < n && !found; ++i2)
        for (int i3 = i2 + 1; i3 < n && !found; ++i3) {
          comb = {i0, i1, i2, i3};
          for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
              sub[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                  H.gram[static_cast<std::size_t>(comb[static_cast<std::size_t>(r)])]
                        [static_cast<std::size_t>(comb[static_cast<std::size_t>(c)])];
          if (std::abs(pfaffian4(sub)) == 1) found = true;
        }
  if (!found)
    throw HomologyRankFailure("no unimodular 4-subset among pool cycles");
  H.chosen = comb;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      sub[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
          H.gram[static_cast<std::size_t>(comb[static_cast<std::size_t>(r)])]
                [static_cast<std::size_t>(comb[static_cast<std::size_t>(c)])];
  auto [N, U] = symplectic_reduce(sub);
  const bool ok = N[0][1] == 1 && N[2][3] == 1 && N[0][2] == 0 &&
                  N[0][3] == 0 && N[1][2] == 0 && N[1][3] == 0;
  if (!ok) throw HomologyRankFailure("symplectic normal form is not standard");
  // interleaved (a1, b1, a2, b2) -> rows (a1, a2, b1, b2)
  const int order[4] = {0, 2, 1, 3};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      H.basis_coords[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
          U[static_cast<std::size_t>(c)][static_cast<std::size_t>(order[r])];
  return H;
}

// integral of one form coefficient around a lifted cycle
inline Complex cycle_integral(const CurveParams<double>& cp, const FormFn& form,
                              const Cycle& cyc, const Quadrature& q = {}) {
  auto [v, y4e] = integrate_path(cp, cyc.segments, cyc.y4_start, {form}, q);
  if (std::abs(y4e - cyc.y4_start) >
      1e-6 * std::max(1.0, std::abs(cyc.y4_start)))
    throw StepCollapse("cycle_integral: lift did not close");
  return v(0);
}

}  // namespace sigma345
