#pragma once

// The sigma function built from the period data: an exponential quadratic
// prefactor times the theta series evaluated at (2 omega')^{-1} u. The
// characteristic is found by scanning for the theta shift that vanishes on
// the image of the curve, with the Riemann-constant integral as a fallback.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sigma345/abel.hpp"
#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"
#include "sigma345/forms.hpp"
#include "sigma345/homology.hpp"
#include "sigma345/paths.hpp"
#include "sigma345/periods.hpp"
#include "sigma345/theta.hpp"

namespace sigma345 {

struct SigmaContext {
  CurveParams<double> params = CurveParams<double>::standard();
  PeriodData pd;
  ThetaChar delta;
  Complex c{1.0, 0.0};
  double trunc_tol = 1e-12;
  int lattice_radius = 12;  // theta box radius certified for trunc_tol
  ThetaVariant variant = ThetaVariant::two_pi_linear;
  double quad_sign = -1.0;  // sign of the quadratic exponent (control knob)
  AbelVector base_shift = AbelVector::Zero();  // Abel image of infinity
  Quadrature quad;
  Eigen::Matrix2cd W = Eigen::Matrix2cd::Identity();  // omega1^{-1}
};

inline SigmaContext make_sigma_context(const CurveParams<double>& cp,
                                       const PeriodData& pd,
                                       const ThetaChar& delta,
                                       const AbelVector& base_shift,
                                       double trunc_tol = 1e-12,
                                       const Quadrature& quad = {}) {
  SigmaContext ctx;
  ctx.params = cp;
  ctx.pd = pd;
  ctx.delta = delta;
  ctx.trunc_tol = trunc_tol;
  ctx.lattice_radius = theta_box_radius(pd.tau, trunc_tol);
  ctx.base_shift = base_shift;
  ctx.quad = quad;
  ctx.W = pd.omega1.inverse();
  return ctx;
}

// nearest lattice point subtracted off; returns the remainder and the
// integer coordinates (l' stacked over l'')
inline std::pair<AbelVector, Eigen::Vector4i> reduce_to_cell(
    const PeriodData& pd, const AbelVector& u) {
  const Eigen::Vector4d cds = lattice_coords(pd.lattice, u);
  Eigen::Vector4i n;
  AbelVector ur = u;
  for (int k = 0; k < 4; ++k) {
    n(k) = static_cast<int>(std::lround(cds(k)));
    if (n(k) == 0) continue;
    const Eigen::Vector2cd gen = k < 2
                                     ? Eigen::Vector2cd(pd.omega1.col(k))
                                     : Eigen::Vector2cd(pd.omega2.col(k - 2));
    ur -= static_cast<double>(n(k)) * gen;
  }
  return {ur, n};
}

struct SigmaJet {
  Complex value{0, 0};
  Eigen::Vector2cd grad = Eigen::Vector2cd::Zero();
  Eigen::Matrix2cd hess = Eigen::Matrix2cd::Zero();
};

// sigma before the normalizing constant; derivatives are in u
inline SigmaJet sigma_raw(const SigmaContext& ctx, const AbelVector& u,
                          int want = 0) {
  const Eigen::Matrix2cd& kap = ctx.pd.gamma;
  const Eigen::Vector2cd ku = kap * u;
  const Complex q = std::exp(ctx.quad_sign * 0.5 * (u.transpose() * ku)(0));
  const ThetaResult th = theta2(ctx.W * u, ctx.pd.tau, ctx.delta,
                                ctx.lattice_radius, want, ctx.variant);
  SigmaJet out;
  out.value = q * th.value;
  if (want >= 1) {
    const Eigen::Vector2cd gu =
        ctx.quad_sign * ku * th.value + ctx.W.transpose() * th.grad;
    out.grad = q * gu;
    if (want >= 2) {
      Eigen::Matrix2cd hu = ctx.quad_sign * kap * th.value;
      hu += ctx.quad_sign * ku * gu.transpose();
      hu += ctx.quad_sign * (ctx.W.transpose() * th.grad) * ku.transpose();
      hu += ctx.W.transpose() * th.hess * ctx.W;
      out.hess = q * hu;
    }
  }
  return out;
}

inline Complex sigma_eval(const SigmaContext& ctx, const AbelVector& u) {
  return ctx.c * sigma_raw(ctx, u).value;
}

inline std::pair<Complex, Eigen::Vector2cd> sigma_grad(const SigmaContext& ctx,
                                                       const AbelVector& u) {
  const SigmaJet j = sigma_raw(ctx, u, 1);
  return {ctx.c * j.value, ctx.c * j.grad};
}

// partial derivative for a multi-index over directions 1 and 2 (up to order 2)
inline Complex sigma_partial(const SigmaContext& ctx, const AbelVector& u,
                             const std::vector<int>& multi_index) {
  for (int d : multi_index)
    if (d < 1 || d > 2)
      throw ConfigError("sigma_partial: directions must be 1 or 2");
  if (multi_index.size() > 2)
    throw ConfigError("sigma_partial: at most second derivatives");
  const SigmaJet j = sigma_raw(ctx, u, static_cast<int>(multi_index.size()));
  if (multi_index.empty()) return ctx.c * j.value;
  if (multi_index.size() == 1) return ctx.c * j.grad(multi_index[0] - 1);
  return ctx.c * j.hess(multi_index[0] - 1, multi_index[1] - 1);
}

// -d_i d_j log sigma; periodic, so the argument is reduced first
inline Eigen::Matrix2cd wp_matrix(const SigmaContext& ctx,
                                  const AbelVector& u) {
  const AbelVector ur = reduce_to_cell(ctx.pd, u).first;
  const SigmaJet j = sigma_raw(ctx, ur, 2);
  const double gn = j.grad.norm();
  if (std::abs(j.value) < 1e-10 * std::max(1.0, gn))
    throw OnThetaDivisor("wp_matrix: sigma vanishes at this argument");
  const Eigen::Vector2cd gv = j.grad / j.value;
  return -(j.hess / j.value - gv * gv.transpose());
}

inline Complex wp_eval(const SigmaContext& ctx, const AbelVector& u, int i,
                       int j) {
  if (i < 1 || i > 2 || j < 1 || j > 2)
    throw ConfigError("wp_eval: indices must be 1 or 2");
  return wp_matrix(ctx, u)(i - 1, j - 1);
}

// translation exponent: linear form t(u) (eta1 l' + eta2 l'')
inline Complex sigma_translation_linear(const PeriodData& pd,
                                        const AbelVector& u,
                                        const Eigen::Vector2d& lp,
                                        const Eigen::Vector2d& lpp) {
  const Eigen::Vector2cd w =
      pd.eta1 * lp.cast<Complex>() + pd.eta2 * lpp.cast<Complex>();
  return (u.transpose() * w)(0);
}

inline Complex sigma_translation_sign(const ThetaChar& delta,
                                      const Eigen::Vector2d& lp,
                                      const Eigen::Vector2d& lpp) {
  const double ph = 2.0 * (lpp.dot(delta.dp) - lp.dot(delta.dpp)) + lp.dot(lpp);
  return std::exp(Complex(0, pi) * ph);
}

inline double quasi_periodicity_residual(const SigmaContext& ctx,
                                         const AbelVector& u,
                                         const Eigen::Vector2d& lp,
                                         const Eigen::Vector2d& lpp,
                                         double lsign = -1.0) {
  const AbelVector ell =
      ctx.pd.omega1 * lp.cast<Complex>() + ctx.pd.omega2 * lpp.cast<Complex>();
  const Complex lhs = sigma_eval(ctx, u + ell);
  const Complex rhs =
      sigma_eval(ctx, u) *
      std::exp(lsign *
               sigma_translation_linear(ctx.pd, u + 0.5 * ell, lp, lpp)) *
      sigma_translation_sign(ctx.delta, lp, lpp);
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
}

// fixes c so that the expansion of sigma at the base point has unit leading
// term; the gradient and the pure-second derivative give two independent
// estimates that must agree
inline Complex calibrate_c(SigmaContext& ctx) {
  const SigmaJet j = sigma_raw(ctx, ctx.base_shift, 2);
  const Complex v = ctx.c * j.value;
  const Eigen::Vector2cd g = ctx.c * j.grad;
  if (std::abs(v) > 1e-8 * g.norm())
    throw CalibrationInconsistent(
        "calibrate_c: sigma does not vanish at the base point");
  const Complex m_grad = -1.0 / g(0);
  const Complex m_hess = 1.0 / (ctx.c * j.hess(1, 1));
  if (std::abs(m_grad / m_hess - 1.0) > 1e-4)
    throw CalibrationInconsistent(
        "calibrate_c: gradient and second-derivative estimates disagree");
  ctx.c *= m_grad;
  return ctx.c;
}

struct CharacteristicSearch {
  ThetaChar delta;
  double best_score = 0;
  double second_score = 0;
  bool fallback_used = false;
};

namespace detail {

// vanishing score of one characteristic over the test arguments: peak value
// on the tests divided by the peak over off-divisor offsets
inline double characteristic_score(
    const PeriodData& pd, const Eigen::Matrix2cd& W, const ThetaChar& delta,
    int R, const std::vector<AbelVector>& tests,
    ThetaVariant variant = ThetaVariant::two_pi_linear) {
  static const std::array<Eigen::Vector2cd, 2> offs = {
      Eigen::Vector2cd(Complex(0.31, 0.11), Complex(-0.17, 0.23)),
      Eigen::Vector2cd(Complex(-0.41, 0.05), Complex(0.27, -0.31))};
  double num = 0, den = 0;
  for (const auto& u : tests) {
    const AbelVector ur = reduce_to_cell(pd, u).first;
    num = std::max(
        num, std::abs(theta2(W * ur, pd.tau, delta, R, 0, variant).value));
    for (const auto& o : offs)
      den = std::max(den, std::abs(theta2(W * (ur + o), pd.tau, delta, R, 0,
                                          variant)
                                       .value));
  }
  return num / std::max(den, 1e-300);
}

// deterministic probe arguments on the shifted image of the curve
inline std::vector<AbelVector> characteristic_tests(
    const CurveParams<double>& cp, const AbelVector& base_shift,
    const Quadrature& q) {
  static const std::array<Complex, 10> probes = {
      Complex(1.31, 0.73),   Complex(-1.12, 0.91), Complex(0.72, -1.33),
      Complex(-0.63, -1.17), Complex(1.92, 0.24),  Complex(-1.73, -0.41),
      Complex(0.41, 1.72),   Complex(-0.32, 1.51), Complex(1.13, -0.87),
      Complex(-1.52, 0.33)};
  const auto mus = cp.branch_values();
  std::vector<AbelVector> tests = {base_shift, 2.0 * base_shift};
  for (int a = 1; a < 3; ++a)
    tests.push_back(abel_branch(cp, a, q) + base_shift);
  int taken = 0, sheet = 0;
  for (const Complex& x : probes) {
    if (taken >= 5) break;
    bool clear = true;
    for (auto m : mus)
      if (std::abs(x - m) < 0.4) clear = false;
    if (!clear) continue;
    const auto pts = lift_x(cp, x);
    tests.push_back(abel_path(cp, pts[static_cast<std::size_t>(sheet)], q).u +
                    base_shift);
    sheet = (sheet + 1) % 3;
    ++taken;
  }
  return tests;
}

// closed traversal of an integer combination of pool cycles: loops glued by
// hub connectors, with small circuits around the second branch point inserted
// wherever the connector lands on the wrong sheet
struct Traversal {
  std::vector<PathPiece> pieces;
  Complex y4_start;
};

inline void append_winding(const CurveParams<double>& cp,
                           std::vector<PathPiece>& pieces, Complex at,
                           Complex& y4, Complex y4_target) {
  const int d = nearest_root_index(y4, y4_target);
  if (d == 0) return;
  const auto mus = cp.branch_values();
  const double r = 0.25 * cp.branch_gap();
  const Complex anchor = mus[1] + r;
  const auto go =
      lines_through(path_avoid(cp, at, anchor, 0.9 * 0.25 * cp.branch_gap()));
  for (int m = 0; m < 3; ++m) {
    if (std::abs(y4 - y4_target) <=
        1e-6 * std::max(1.0, std::abs(y4_target)))
      return;
    std::vector<PathPiece> circuit = go;
    circuit.push_back(PathPiece::arc(mus[1], r, 0, 2 * pi));
    const auto back = reversed_path(go);
    circuit.insert(circuit.end(), back.begin(), back.end());
    for (const auto& pc : circuit) y4 = continue_y4(cp, pc, y4);
    pieces.insert(pieces.end(), circuit.begin(), circuit.end());
  }
  if (std::abs(y4 - y4_target) > 1e-6 * std::max(1.0, std::abs(y4_target)))
    throw StepCollapse("traversal: could not align sheets at a connector");
}

inline Traversal basis_cycle_traversal(const CurveParams<double>& cp,
                                       const HomologyBasis& H, int row) {
  Traversal tr;
  bool first = true;
  Complex pos{};
  Complex y4{};
  for (int k = 0; k < 4; ++k) {
    const long coeff = H.basis_coords[static_cast<std::size_t>(row)]
                                     [static_cast<std::size_t>(k)];
    if (coeff == 0) continue;
    const Cycle& cyc =
        H.pool[static_cast<std::size_t>(H.chosen[static_cast<std::size_t>(k)])];
    const Complex hub = cyc.segments.front().z(0.0);
    const auto block =
        coeff > 0 ? cyc.segments : reversed_path(cyc.segments);
    for (long rep = 0; rep < std::labs(coeff); ++rep) {
      if (first) {
        tr.y4_start = cyc.y4_start;
        y4 = cyc.y4_start;
        pos = hub;
        first = false;
      } else if (std::abs(pos - hub) > 1e-12) {
        const auto conn = lines_through(
            path_avoid(cp, pos, hub, 0.9 * 0.25 * cp.branch_gap()));
        for (const auto& pc : conn) y4 = continue_y4(cp, pc, y4);
        tr.pieces.insert(tr.pieces.end(), conn.begin(), conn.end());
        pos = hub;
      }
      // the block must start on the lift the connector delivered; if it does
      // not, rotate sheets with circuits that live in the traversal itself
      detail::append_winding(cp, tr.pieces, pos, y4, cyc.y4_start);
      for (const auto& pc : block) y4 = continue_y4(cp, pc, y4);
      tr.pieces.insert(tr.pieces.end(), block.begin(), block.end());
    }
  }
  if (first) throw HomologyRankFailure("traversal: empty basis row");
  // close up: return to the starting hub on the starting lift
  const Complex hub0 = tr.pieces.front().z(0.0);
  if (std::abs(pos - hub0) > 1e-12) {
    const auto conn = lines_through(
        path_avoid(cp, pos, hub0, 0.9 * 0.25 * cp.branch_gap()));
    for (const auto& pc : conn) y4 = continue_y4(cp, pc, y4);
    tr.pieces.insert(tr.pieces.end(), conn.begin(), conn.end());
  }
  detail::append_winding(cp, tr.pieces, hub0, y4, tr.y4_start);
  return tr;
}

// cross integral over one a-cycle traversal: the normalized form indexed by
// the traversal row against the running abelian integral of the other form,
// accumulated by the trapezoid rule on the sampled lift
inline Complex riemann_cross_integral(const CurveParams<double>& cp,
                                      const Eigen::Matrix2cd& W,
                                      const Traversal& tr, int form_i,
                                      int abel_j, const Quadrature& q) {
  const auto zs = polyline_of(tr.pieces, 420);
  const auto [sheets, y4s] = sheets_along(cp, zs, tr.y4_start);
  (void)sheets;
  if (std::abs(y4s.back() - y4s.front()) >
      1e-6 * std::max(1.0, std::abs(y4s.front())))
    throw StepCollapse("riemann_cross_integral: traversal lift did not close");
  // normalized holomorphic coefficients at every vertex
  std::vector<Eigen::Vector2cd> nh(zs.size());
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const SurfacePoint<double> pt =
        make_point(cp, zs[k], y4s[k], cp.y5_from_y4(zs[k], y4s[k]));
    const Eigen::Vector2cd raw(holomorphic_coeff(cp, 1, pt),
                               holomorphic_coeff(cp, 2, pt));
    nh[k] = W * raw;
  }
  // running abelian integral, seeded at the true image of the start point
  const SurfacePoint<double> start = make_point(
      cp, zs.front(), y4s.front(), cp.y5_from_y4(zs.front(), y4s.front()));
  Eigen::Vector2cd A = -(W * abel_path(cp, start, q).u);
  Complex cross = 0;
  for (std::size_t k = 0; k + 1 < zs.size(); ++k) {
    const Complex dz = zs[k + 1] - zs[k];
    const Eigen::Vector2cd A_next = A + 0.5 * (nh[k] + nh[k + 1]) * dz;
    cross += 0.5 * (nh[k](form_i) * A(abel_j) + nh[k + 1](form_i) * A_next(abel_j)) * dz;
    A = A_next;
  }
  return cross;
}

}  // namespace detail

// scan the sixteen half-integer characteristics for the one whose theta
// vanishes on the shifted image of the curve; if none does, rebuild the
// characteristic from the Riemann-constant integral and validate it the
// same way
inline CharacteristicSearch find_characteristic_search(
    const CurveParams<double>& cp, const PeriodData& pd,
    const HomologyBasis* H, const AbelVector& base_shift,
    const Quadrature& q = {}) {
  const Eigen::Matrix2cd W = pd.omega1.inverse();
  const int R = theta_box_radius(pd.tau, 1e-12);
  const auto tests = detail::characteristic_tests(cp, base_shift, q);
  CharacteristicSearch out;
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  static const std::array<double, 2> halves = {0.0, 0.5};
  for (double a : halves)
    for (double b : halves)
      for (double cc : halves)
        for (double d : halves) {
          ThetaChar del;
          del.dp = Eigen::Vector2d(a, b);
          del.dpp = Eigen::Vector2d(cc, d);
          const double s =
              detail::characteristic_score(pd, W, del, R, tests);
          if (s < best) {
            second = best;
            best = s;
            out.delta = del;
          } else if (s < second) {
            second = s;
          }
        }
  out.best_score = best;
  out.second_score = second;
  if (best <= 1e-6) return out;

  // fallback: Riemann constant from the classical integral formula
  HomologyBasis Hloc;
  if (!H) {
    Hloc = build_homology(cp);
    H = &Hloc;
  }
  const auto tr1 = detail::basis_cycle_traversal(cp, *H, 0);
  const auto tr2 = detail::basis_cycle_traversal(cp, *H, 1);
  Eigen::Vector2cd K;
  K(0) = (1.0 + pd.tau(0, 0)) / 2.0 -
         detail::riemann_cross_integral(cp, W, tr1, 0, 1, q);
  K(1) = (1.0 + pd.tau(1, 1)) / 2.0 -
         detail::riemann_cross_integral(cp, W, tr2, 1, 0, q);
  const Eigen::Vector2cd WT = W * base_shift;
  const Eigen::Matrix2d Y = pd.tau.imag();
  for (double s1 : {1.0, -1.0}) {
    for (double s2 : {-1.0, 0.0, 1.0}) {
      const Eigen::Vector2cd xi = s1 * K + s2 * WT;
      const Eigen::Vector2d im(xi(0).imag(), xi(1).imag());
      const Eigen::Vector2d dpp_raw = Y.partialPivLu().solve(im);
      const Eigen::Vector2d dp_raw =
          Eigen::Vector2d(xi(0).real(), xi(1).real()) -
          pd.tau.real() * dpp_raw;
      ThetaChar cand;
      bool snapped = true;
      for (int i = 0; i < 2; ++i) {
        auto snap = [&](double v, double& outv) {
          const double f = v - std::floor(v);
          const double g = std::round(f * 2.0) / 2.0;
          if (std::abs(g - f) > 5e-3) return false;
          outv = g == 1.0 ? 0.0 : g;
          return true;
        };
        if (!snap(dpp_raw(i), cand.dpp(i)) || !snap(dp_raw(i), cand.dp(i)))
          snapped = false;
      }
      if (!snapped) continue;
      const double s = detail::characteristic_score(pd, W, cand, R, tests);
      if (s <= 1e-6) {
        out.delta = cand;
        out.best_score = s;
        out.fallback_used = true;
        return out;
      }
    }
  }
  throw CharacteristicNotFound(
      "find_characteristic: no vanishing characteristic from the scan or the "
      "Riemann-constant integral");
}

inline ThetaChar find_characteristic(const PeriodData& pd,
                                     const CurveParams<double>& cp,
                                     const Quadrature& q = {}) {
  const AbelVector T = abel_branch(cp, 0, q);
  return find_characteristic_search(cp, pd, nullptr, T, q).delta;
}

}  // namespace sigma345
