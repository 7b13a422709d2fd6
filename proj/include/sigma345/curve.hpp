#pragma once

// Algebraic layer of the trigonal space curve cut out by
//   f8  = y4^2 - y5 k1,   f9 = y4 y5 - k2 k1,   f10 = y5^2 - y4 k2,
// with k1 = x - mu0 and k2 = (x - mu1)(x - mu2). On it y4^3 = k2 k1^2 and
// y5^3 = k2^2 k1, so projection to x is a 3-sheeted cyclic cover branched
// over the three mu's and infinity. This header is pure point arithmetic:
// parameters, lifts, the deck action, monomial bases and the chart at
// infinity. Everything is templated on the real scalar.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Core>

#include "sigma345/errors.hpp"

namespace sigma345 {

template <typename Real>
using Cplx = std::complex<Real>;

using Complex = Cplx<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// primitive cube root of unity, exact components
template <typename Real = double>
Cplx<Real> zeta3(int k = 1) {
  const Real h = Real(0.5);
  const Real s = std::sqrt(Real(3)) / Real(2);
  switch (((k % 3) + 3) % 3) {
    case 1: return {-h, s};
    case 2: return {-h, -s};
    default: return {Real(1), Real(0)};
  }
}

// principal cube root: argument lands in (-pi/3, pi/3]
template <typename Real>
Cplx<Real> cbrt_principal(const Cplx<Real>& z) {
  if (z == Cplx<Real>()) return {};
  const Real r = std::abs(z);
  const Real th = std::arg(z);  // in (-pi, pi]
  return std::polar(std::cbrt(r), th / Real(3));
}

// small integer powers without going through exp/log
template <typename Real>
Cplx<Real> ipow(Cplx<Real> z, int n) {
  Cplx<Real> out{Real(1), Real(0)};
  for (int i = 0; i < n; ++i) out *= z;
  return out;
}

template <typename Real>
struct SurfacePoint {
  Cplx<Real> x, y4, y5;
  Real residual_bound = Real(0);  // max defect of f8,f9,f10 at construction
};

template <typename Real>
struct CurveParams {
  using C = Cplx<Real>;

  C mu0, mu1, mu2;
  C lambda1_1;              // coefficient of k1: -mu0
  C lambda2_1, lambda2_2;   // k2 = x^2 + lambda2_1 x + lambda2_2
  Real min_separation;      // enforced floor on pairwise branch distances

  CurveParams(C m0, C m1, C m2, Real minsep = Real(-1))
      : mu0(m0), mu1(m1), mu2(m2) {
    lambda1_1 = -mu0;
    lambda2_1 = -(mu1 + mu2);
    lambda2_2 = mu1 * mu2;
    min_separation = minsep > Real(0)
                         ? minsep
                         : Real(1e-3) * (Real(1) + max_abs());
    if (branch_gap() < min_separation)
      throw ConfigError("branch values closer than min_separation");
  }

  static CurveParams standard() { return {C(0), C(1), C(-1)}; }

  std::array<C, 3> branch_values() const { return {mu0, mu1, mu2}; }

  Real max_abs() const {
    return std::max({std::abs(mu0), std::abs(mu1), std::abs(mu2)});
  }

  // actual smallest pairwise distance between branch values; the geometric
  // scale for loop radii and clearances
  Real branch_gap() const {
    return std::min({std::abs(mu0 - mu1), std::abs(mu0 - mu2),
                     std::abs(mu1 - mu2)});
  }

  C k1(C x) const { return x - mu0; }
  C k2(C x) const { return (x - mu1) * (x - mu2); }
  C k4(C x) const { return k2(x) * k1(x) * k1(x); }
  C k5(C x) const { return k2(x) * k2(x) * k1(x); }

  // d/dx of k4 = k2 k1^2 and k5 = k2^2 k1; k2' = 2x + lambda2_1
  C k4_prime(C x) const {
    return (Real(2) * x + lambda2_1) * k1(x) * k1(x) +
           Real(2) * k1(x) * k2(x);
  }
  C k5_prime(C x) const {
    return Real(2) * k2(x) * (Real(2) * x + lambda2_1) * k1(x) +
           k2(x) * k2(x);
  }

  // Recover y5 from y4 on the curve, dividing by whichever of k1, k2 is the
  // larger to stay conditioned near either kind of branch point.
  C y5_from_y4(C x, C y4) const {
    const C a = k1(x), b = k2(x);
    if (std::abs(a) >= std::abs(b)) return y4 * y4 / a;
    return a * b / y4;
  }

  C dy4_dx(C x, C y4) const { return k4_prime(x) / (Real(3) * y4 * y4); }
  C dy5_dx(C x, C y5) const { return k5_prime(x) / (Real(3) * y5 * y5); }

  // unit factor of the expansion at infinity: k4(1/t^3) t^12
  C unit_factor(C t) const {
    const C t3 = t * t * t;
    return (C(1) - mu1 * t3) * (C(1) - mu2 * t3) * (C(1) - mu0 * t3) *
           (C(1) - mu0 * t3);
  }

  Real t_max() const {
    return std::pow(Real(4) * std::max(max_abs(), Real(1e-12)),
                    Real(-1) / Real(3));
  }
  Real t_ref() const {
    return std::pow(Real(8) * (Real(1) + max_abs()), Real(-1) / Real(3));
  }
};

enum class KPoly { k1, k2, k4, k5 };

template <typename Real>
Cplx<Real> k_eval(const CurveParams<Real>& cp, KPoly which, Cplx<Real> x) {
  switch (which) {
    case KPoly::k1: return cp.k1(x);
    case KPoly::k2: return cp.k2(x);
    case KPoly::k4: return cp.k4(x);
    default: return cp.k5(x);
  }
}

template <typename Real>
std::array<Cplx<Real>, 3> curve_residual(const CurveParams<Real>& cp,
                                         Cplx<Real> x, Cplx<Real> y4,
                                         Cplx<Real> y5) {
  return {y4 * y4 - y5 * cp.k1(x),
          y4 * y5 - cp.k2(x) * cp.k1(x),
          y5 * y5 - y4 * cp.k2(x)};
}

// relative defect, normalized by the x-scale of the heaviest monomial
template <typename Real>
Real relative_residual(const CurveParams<Real>& cp, Cplx<Real> x,
                       Cplx<Real> y4, Cplx<Real> y5) {
  const auto f = curve_residual(cp, x, y4, y5);
  const Real s = ipow(Cplx<Real>(std::max(Real(1), std::abs(x))), 4).real();
  return std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])}) / s;
}

template <typename Real>
SurfacePoint<Real> make_point(const CurveParams<Real>& cp, Cplx<Real> x,
                              Cplx<Real> y4, Cplx<Real> y5) {
  return {x, y4, y5, relative_residual(cp, x, y4, y5)};
}

// The three points above x. Sheet k carries y4 = zeta3^k times the principal
// cube root of k4(x), which makes sheet labels canonical and deterministic.
template <typename Real>
std::array<SurfacePoint<Real>, 3> lift_x(const CurveParams<Real>& cp,
                                         Cplx<Real> x) {
  for (auto m : cp.branch_values())
    if (std::abs(x - m) < cp.min_separation / Real(2))
      throw BranchPointProximity("lift_x: x too close to a branch value");
  const Cplx<Real> r = cbrt_principal(cp.k4(x));
  std::array<SurfacePoint<Real>, 3> out;
  for (int k = 0; k < 3; ++k) {
    const Cplx<Real> y4 = r * zeta3<Real>(k);
    out[static_cast<std::size_t>(k)] =
        make_point(cp, x, y4, cp.y5_from_y4(x, y4));
  }
  return out;
}

// deck transformation (x, y4, y5) -> (x, zeta3^l y4, zeta3^{2l} y5)
template <typename Real>
SurfacePoint<Real> zeta3_action(const SurfacePoint<Real>& p, int ell) {
  return {p.x, p.y4 * zeta3<Real>(ell), p.y5 * zeta3<Real>(2 * ell),
          p.residual_bound};
}

template <typename Real>
SurfacePoint<Real> branch_point(const CurveParams<Real>& cp, int a) {
  const Cplx<Real> m = cp.branch_values()[static_cast<std::size_t>(a)];
  return {m, Cplx<Real>(), Cplx<Real>(), Real(0)};
}

// Monomial basis with poles only at infinity, one member per pole order in
// the hat normalization: phi_hat 0..3 are y4, y5, x y4, x y5; beyond that the
// pattern follows the residue of the index mod 3.
template <typename Real>
Cplx<Real> phi_hat(int i, const SurfacePoint<Real>& p) {
  switch (i) {
    case 0: return p.y4;
    case 1: return p.y5;
    case 2: return p.x * p.y4;
    case 3: return p.x * p.y5;
    default: break;
  }
  switch (i % 3) {
    case 1: return ipow(p.x, (i - 4) / 3) * p.y4 * p.y5;
    case 2: return ipow(p.x, (i + 1) / 3) * p.y4;
    default: return ipow(p.x, i / 3) * p.y5;
  }
}

inline long weight_N_hat(int i) {
  if (i == 0) return 4;
  if (i == 1) return 5;
  return i + 5;
}

inline long weight_N_g2(int i) { return i == 0 ? 0 : i + 2; }

// Plain monomial basis of the coordinate ring ordered by pole order at
// infinity: 1, x, y4, y5, x^2, x y4, x y5, x^3, ...
template <typename Real>
Cplx<Real> phi_g2(int i, const SurfacePoint<Real>& p) {
  if (i == 0) return Cplx<Real>(1);
  const long w = weight_N_g2(i);
  switch (w % 3) {
    case 0: return ipow(p.x, static_cast<int>(w / 3));
    case 1: return ipow(p.x, static_cast<int>((w - 4) / 3)) * p.y4;
    default: return ipow(p.x, static_cast<int>((w - 5) / 3)) * p.y5;
  }
}

// Local coordinate t at infinity: x = 1/t^3, y4 = t^{-4}(1 + O(t^3)),
// y5 = t^{-5}(1 + O(t^3)). The unit factor stays away from the negative real
// axis for |t| below t_max, so the principal cube root is analytic there.
template <typename Real>
SurfacePoint<Real> infinity_chart(const CurveParams<Real>& cp, Cplx<Real> t) {
  if (t == Cplx<Real>() || std::abs(t) >= cp.t_max())
    throw OutOfChart("infinity_chart: need 0 < |t| < t_max");
  const Cplx<Real> u = cbrt_principal(cp.unit_factor(t));
  const Cplx<Real> t3 = t * t * t;
  const Cplx<Real> x = Cplx<Real>(1) / t3;
  const Cplx<Real> y4 = u / (t3 * t);
  const Cplx<Real> y5 = u * u / ((t3 * t * t) * (Cplx<Real>(1) - cp.mu0 * t3));
  return make_point(cp, x, y4, y5);
}

}  // namespace sigma345
