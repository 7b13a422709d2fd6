#pragma once

// Differentials on the curve. Everything is stored as the coefficient of dx
// at a surface point. The basis:
//   nu1  = dx/(3 y5),  nu2 = dx/(3 y4)            (holomorphic)
//   nuII1 = -(2x + l21) dx / (3 y4)
//   nuII2 = -(x + l21 + mu0) dx / (3 y5)           (second kind, dual to nu)
// The constant shift in nuII2 matters: without it the pair (nu, nuII) is dual
// only on the parameter slice mu0 = mu1 + mu2. The shifted form keeps both
// the symmetry-defect identity and the Legendre relation exact for every
// admissible parameter choice.
//
// On top of these sit the sigma kernel (a third-kind building block with a
// simple pole), its Q-derivative, and the symmetric fundamental 2-form.

#include <cmath>
#include <complex>

#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"
#include "sigma345/paths.hpp"

namespace sigma345 {

enum class Chart { x_plane, t_infinity };

struct FormValue {
  Complex coeff;
  Chart chart;
};

template <typename Real>
Cplx<Real> holomorphic_coeff(const CurveParams<Real>& cp, int i,
                             const SurfacePoint<Real>& p) {
  (void)cp;
  if (i == 1) return Cplx<Real>(1) / (Real(3) * p.y5);
  if (i == 2) return Cplx<Real>(1) / (Real(3) * p.y4);
  throw ConfigError("holomorphic_coeff: index must be 1 or 2");
}

template <typename Real>
Cplx<Real> second_kind_coeff(const CurveParams<Real>& cp, int i,
                             const SurfacePoint<Real>& p) {
  if (i == 1) return -(Real(2) * p.x + cp.lambda2_1) / (Real(3) * p.y4);
  if (i == 2)
    return -(p.x + cp.lambda2_1 + cp.mu0) / (Real(3) * p.y5);
  throw ConfigError("second_kind_coeff: index must be 1 or 2");
}

inline FormValue holomorphic_oneform(const CurveParams<double>& cp, int i,
                                     const SurfacePoint<double>& p) {
  return {holomorphic_coeff(cp, i, p), Chart::x_plane};
}

inline FormValue second_kind_oneform(const CurveParams<double>& cp, int i,
                                     const SurfacePoint<double>& p) {
  return {second_kind_coeff(cp, i, p), Chart::x_plane};
}

// pullbacks to the chart at infinity, coefficients of dt on (0, t_max)
inline Complex holomorphic_tail_coeff(const CurveParams<double>& cp, int i,
                                      Complex t) {
  const Complex u = cbrt_principal(cp.unit_factor(t));
  if (i == 1) return -t * (Complex(1) - cp.mu0 * t * t * t) / (u * u);
  if (i == 2) return -1.0 / u;
  throw ConfigError("holomorphic_tail_coeff: index must be 1 or 2");
}

inline FormFn nu_fn(const CurveParams<double>& cp, int i) {
  return [cp, i](const SurfacePoint<double>& p) {
    return holomorphic_coeff(cp, i, p);
  };
}

inline FormFn nuII_fn(const CurveParams<double>& cp, int i) {
  return [cp, i](const SurfacePoint<double>& p) {
    return second_kind_coeff(cp, i, p);
  };
}

// Third-kind kernel: coefficient of Sigma(P,Q) dx_P. Simple pole at P = Q
// with residue +1 (and none at the two rotated lifts over x_Q, where the
// cyclic numerator vanishes).
inline Complex sigma_kernel(const CurveParams<double>& cp,
                            const SurfacePoint<double>& P,
                            const SurfacePoint<double>& Q) {
  (void)cp;
  if (std::abs(P.x - Q.x) < 1e-12 * std::max(1.0, std::abs(Q.x)))
    throw DiagonalPole("sigma_kernel: P over the same x as Q");
  return (P.y4 * P.y5 + P.y4 * Q.y5 + Q.y4 * P.y5) /
         ((P.x - Q.x) * 3.0 * P.y4 * P.y5);
}

inline FormFn sigma_kernel_fn(const CurveParams<double>& cp,
                              const SurfacePoint<double>& Q) {
  return [cp, Q](const SurfacePoint<double>& p) {
    return sigma_kernel(cp, p, Q);
  };
}

// derivative of the kernel in the second slot, coefficient of dx_P dx_Q
inline Complex dq_sigma_kernel(const CurveParams<double>& cp,
                               const SurfacePoint<double>& P,
                               const SurfacePoint<double>& Q) {
  if (std::abs(P.x - Q.x) < 1e-12 * std::max(1.0, std::abs(Q.x)))
    throw DiagonalPole("dq_sigma_kernel: P over the same x as Q");
  const Complex dy4Q = cp.dy4_dx(Q.x, Q.y4);
  const Complex dy5Q = cp.dy5_dx(Q.x, Q.y5);
  const Complex num = P.y4 * P.y5 + P.y4 * Q.y5 + Q.y4 * P.y5;
  const Complex dnum = P.y4 * dy5Q + dy4Q * P.y5;
  const Complex dx = P.x - Q.x;
  return dnum / (dx * 3.0 * P.y4 * P.y5) +
         num / (dx * dx * 3.0 * P.y4 * P.y5);
}

inline FormFn third_kind_form(const CurveParams<double>& cp,
                              const SurfacePoint<double>& P1,
                              const SurfacePoint<double>& P2) {
  return [cp, P1, P2](const SurfacePoint<double>& p) {
    return sigma_kernel(cp, p, P1) - sigma_kernel(cp, p, P2);
  };
}

// Symmetric 2-form with double pole on the diagonal. The second-kind pairing
// enters with a minus sign relative to the kernel derivative; that is the
// orientation under which symmetry, the diagonal normalization and the
// infinity limit hold simultaneously.
inline Complex fundamental_omega(const CurveParams<double>& cp,
                                 const SurfacePoint<double>& P1,
                                 const SurfacePoint<double>& P2) {
  return dq_sigma_kernel(cp, P1, P2) -
         (holomorphic_coeff(cp, 1, P1) * second_kind_coeff(cp, 1, P2) +
          holomorphic_coeff(cp, 2, P1) * second_kind_coeff(cp, 2, P2));
}

// polynomial form of the same 2-form: F = Omega * (x1-x2)^2 * 9 y41 y51 y42 y52
inline Complex omega_polynomial_F(const CurveParams<double>& cp,
                                  const SurfacePoint<double>& P1,
                                  const SurfacePoint<double>& P2) {
  const Complex dx = P1.x - P2.x;
  return fundamental_omega(cp, P1, P2) * dx * dx * 9.0 * P1.y4 * P1.y5 *
         P2.y4 * P2.y5;
}

// defect of exchanging the kernel slots, as a tensor in the dual bases
inline Complex sym_defect_tensor(const CurveParams<double>& cp,
                                 const SurfacePoint<double>& P,
                                 const SurfacePoint<double>& Q) {
  return holomorphic_coeff(cp, 1, P) * second_kind_coeff(cp, 1, Q) +
         holomorphic_coeff(cp, 2, P) * second_kind_coeff(cp, 2, Q) -
         (holomorphic_coeff(cp, 1, Q) * second_kind_coeff(cp, 1, P) +
          holomorphic_coeff(cp, 2, Q) * second_kind_coeff(cp, 2, P));
}

// closed form of the defect on the slice mu0 = mu1 + mu2
inline Complex sym_defect_closed(const CurveParams<double>& cp,
                                 const SurfacePoint<double>& P,
                                 const SurfacePoint<double>& Q) {
  const Complex b2pq =
      P.y4 * Q.y5 * (2.0 * Q.x + cp.lambda2_1 - P.x);
  const Complex b2qp =
      Q.y4 * P.y5 * (2.0 * P.x + cp.lambda2_1 - Q.x);
  return (b2qp - b2pq) / (9.0 * P.y4 * P.y5 * Q.y4 * Q.y5);
}

// relative defect of the slot-exchange identity at one pair of points
inline double slot_exchange_residual(const CurveParams<double>& cp,
                                    const SurfacePoint<double>& P,
                                    const SurfacePoint<double>& Q) {
  const Complex lhs =
      dq_sigma_kernel(cp, P, Q) - dq_sigma_kernel(cp, Q, P);
  const Complex rhs = sym_defect_tensor(cp, P, Q);
  return std::abs(lhs - rhs) /
         std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

// adaptive contour integral of a form over a lifted circle
inline Complex contour_integral(const CurveParams<double>& cp, Complex center,
                                double radius,
                                const SurfacePoint<double>& P_near,
                                const FormFn& coeff, int loops = 1,
                                const Quadrature& q = {1e-12}) {
  const Complex x0 = center + radius;
  const Complex guess =
      P_near.y4 + cp.dy4_dx(P_near.x, P_near.y4) * (x0 - P_near.x);
  const SurfacePoint<double> st = lift_near(cp, x0, guess);
  std::vector<PathPiece> pieces(
      static_cast<std::size_t>(loops),
      PathPiece::arc(center, radius, 0.0, 2 * pi));
  auto [v, y4e] = integrate_path(cp, pieces, st.y4, {coeff}, q);
  if (std::abs(y4e - st.y4) > 1e-9 * std::max(1.0, std::abs(st.y4)))
    throw StepCollapse("contour_integral: lifted circle did not close");
  return v(0);
}

// fixed-node trapezoid loop; spectrally accurate for a periodic integrand
inline Complex trapezoid_loop(const CurveParams<double>& cp, Complex center,
                              double radius,
                              const SurfacePoint<double>& P_near,
                              const FormFn& coeff, int npts = 256,
                              int loops = 1) {
  const Complex x0 = center + radius;
  const Complex guess =
      P_near.y4 + cp.dy4_dx(P_near.x, P_near.y4) * (x0 - P_near.x);
  const SurfacePoint<double> st = lift_near(cp, x0, guess);
  Complex y4 = st.y4;
  Complex xprev = x0;
  Complex total = 0;
  const double h = 2 * pi / npts;
  const int N = npts * loops;
  for (int k = 0; k < N; ++k) {
    const double th = h * k;
    const Complex x = center + radius * std::polar(1.0, th);
    if (k > 0) {
      const Complex pred = y4 + cp.dy4_dx(xprev, y4) * (x - xprev);
      const Complex r = cbrt_principal(cp.k4(x));
      y4 = r * zeta3<double>(nearest_root_index(r, pred));
    }
    xprev = x;
    const SurfacePoint<double> pt{x, y4, cp.y5_from_y4(x, y4), 0.0};
    const Complex dz = Complex(0, radius) * std::polar(1.0, th);
    total += coeff(pt) * dz * h;
  }
  const Complex pred = y4 + cp.dy4_dx(xprev, y4) * (x0 - xprev);
  const Complex r = cbrt_principal(cp.k4(x0));
  const Complex y4e = r * zeta3<double>(nearest_root_index(r, pred));
  if (std::abs(y4e - st.y4) > 1e-9 * std::max(1.0, std::abs(st.y4)))
    throw StepCollapse("trapezoid_loop: lifted circle did not close");
  return total;
}

}  // namespace sigma345
