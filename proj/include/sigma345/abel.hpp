#pragma once

// Abel maps with base point at infinity: u_o(P) = int_P^inf (nu1, nu2).
// The path from infinity is split into a tail inside the chart at infinity,
// integrated in the local coordinate t where both forms are analytic, and a
// finite-plane polyline from the chart reference point to x_P that detours
// around branch values. A wrong-sheet arrival is fixed by appending winding
// loops around mu1, whose monodromy exponent is 1. The branch values get
// their own local charts, since no x-plane path can end there.

#include <complex>
#include <vector>

#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"
#include "sigma345/forms.hpp"
#include "sigma345/paths.hpp"
#include "sigma345/periods.hpp"

namespace sigma345 {

struct AbelPath {
  AbelVector u;                   // u_o(P)
  std::vector<PathPiece> pieces;  // chart reference point -> P, sheet-true
  Complex y4_ref;                 // y4 at the chart reference point
  AbelVector tail;                // in-chart tail integrals
};

inline AbelPath abel_path(const CurveParams<double>& cp,
                          const SurfacePoint<double>& P,
                          const Quadrature& q = {}) {
  const double tref = cp.t_ref();
  AbelVector tail;
  tail(0) = gl_adaptive(
      [&](double t) { return holomorphic_tail_coeff(cp, 1, Complex(t)); }, 0.0,
      tref, q);
  tail(1) = gl_adaptive(
      [&](double t) { return holomorphic_tail_coeff(cp, 2, Complex(t)); }, 0.0,
      tref, q);
  const SurfacePoint<double> Pref = infinity_chart(cp, Complex(tref));
  const double clr = 0.25 * cp.branch_gap();
  std::vector<PathPiece> pieces =
      lines_through(path_avoid(cp, Pref.x, P.x, clr));
  const std::vector<FormFn> fns = {nu_fn(cp, 1), nu_fn(cp, 2)};
  auto [v, y4_end] = integrate_path(cp, pieces, Pref.y4, fns, q);
  const Complex ratio = P.y4 / y4_end;
  int m = 0;
  double bd = std::abs(ratio - 1.0);
  for (int k = 1; k < 3; ++k) {
    const double d = std::abs(ratio - zeta3<double>(k));
    if (d < bd) {
      bd = d;
      m = k;
    }
  }
  if (bd > 1e-6)
    throw StepCollapse("abel_path: arrival sheet is not a deck translate");
  AbelVector extra = AbelVector::Zero();
  if (m != 0) {
    const Complex mu = cp.mu1;
    const double r = 0.25 * cp.branch_gap();
    std::vector<PathPiece> go =
        lines_through(path_avoid(cp, P.x, mu + r, clr * 0.9));
    std::vector<PathPiece> walk = go;
    for (int k = 0; k < m; ++k)
      walk.push_back(PathPiece::arc(mu, r, 0.0, 2 * pi));
    const std::vector<PathPiece> back = reversed_path(go);
    walk.insert(walk.end(), back.begin(), back.end());
    auto [v2, y4_end2] = integrate_path(cp, walk, y4_end, fns, q);
    if (std::abs(P.y4 / y4_end2 - 1.0) > 1e-6)
      throw StepCollapse("abel_path: sheet fix failed");
    extra = v2;
    pieces.insert(pieces.end(), walk.begin(), walk.end());
  }
  AbelPath out;
  out.u = -(tail + v + extra);
  out.pieces = std::move(pieces);
  out.y4_ref = Pref.y4;
  out.tail = tail;
  return out;
}

inline AbelVector abel_map(const CurveParams<double>& cp, const PeriodData& pd,
                           const SurfacePoint<double>& P,
                           const Quadrature& q = {}) {
  (void)pd;  // reductions are the caller's business; the map itself is exact
  return abel_path(cp, P, q).u;
}

// u_o(B_a) through the branch chart x = mu_a + s^3
inline AbelVector abel_branch(const CurveParams<double>& cp, int a_idx,
                              const Quadrature& q = {}) {
  const Complex mu_a = cp.branch_values()[static_cast<std::size_t>(a_idx)];
  const double r0 = 0.25 * cp.branch_gap();
  const SurfacePoint<double> P_near = lift_x(cp, mu_a + r0)[0];
  const AbelVector u_near = abel_path(cp, P_near, q).u;
  // w^3 is the part of k4 that stays away from zero at the branch point:
  // k2 at mu0 (y4 = s^2 w there), (x - mu_other) k1^2 at mu1, mu2 (y4 = s w)
  const Complex other = a_idx == 1 ? cp.mu2 : cp.mu1;
  auto w_cube = [&](Complex x) {
    return a_idx == 0 ? cp.k2(x) : (x - other) * cp.k1(x) * cp.k1(x);
  };
  const Complex base = w_cube(mu_a);
  const Complex c0 = cbrt_principal(base);
  auto w_of = [&](Complex s) {
    return c0 * cbrt_principal(w_cube(mu_a + s * s * s) / base);
  };
  auto y4_of = [&](Complex s) {
    return (a_idx == 0 ? s * s : s) * w_of(s);
  };
  Complex s1;
  double bd = -1;
  for (int k = 0; k < 3; ++k) {
    const Complex cand = cbrt_principal(Complex(r0)) * zeta3<double>(k);
    const double d = std::abs(y4_of(cand) - P_near.y4);
    if (bd < 0 || d < bd) {
      bd = d;
      s1 = cand;
    }
  }
  if (bd > 1e-8 * std::max(1.0, std::abs(P_near.y4)))
    throw ChartFailure("abel_branch: chart does not match the approach lift");
  // dt coefficients of nu1, nu2 in the s coordinate (dx = 3 s^2 ds)
  auto c1 = [&](Complex s) {
    const Complex w = w_of(s);
    if (a_idx == 0) return s / (w * w);
    return cp.k1(mu_a + s * s * s) / (w * w);
  };
  auto c2 = [&](Complex s) {
    const Complex w = w_of(s);
    return a_idx == 0 ? 1.0 / w : s / w;
  };
  AbelVector seg;
  seg(0) = gl_adaptive([&](double s) { return c1(s1 * (1.0 - s)) * (-s1); },
                       0.0, 1.0, q);
  seg(1) = gl_adaptive([&](double s) { return c2(s1 * (1.0 - s)) * (-s1); },
                       0.0, 1.0, q);
  return u_near - seg;
}

// hat-u(P_1 + ... + P_k) = sum u_o(P_i) + u_o(B_0); the shift places the
// image of the degree-2 divisor theory at the right spot in the Jacobian
inline AbelVector shifted_abel_map(const CurveParams<double>& cp,
                                   const PeriodData& pd,
                                   const std::vector<SurfacePoint<double>>& pts,
                                   const AbelVector& base_shift,
                                   const Quadrature& q = {}) {
  AbelVector u = base_shift;
  for (const auto& p : pts) u += abel_map(cp, pd, p, q);
  return u;
}

inline AbelVector shifted_abel_map(const CurveParams<double>& cp,
                                   const PeriodData& pd,
                                   const std::vector<SurfacePoint<double>>& pts,
                                   const Quadrature& q = {}) {
  return shifted_abel_map(cp, pd, pts, abel_branch(cp, 0, q), q);
}

}  // namespace sigma345
