#pragma once

// Jacobi inversion on two-point divisors: closed forms for the Kleinian
// functions, the pencil functions cutting out the divisors, and the bilinear
// relation tying sigma ratios to integrals of the third-kind kernel.

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
#include "sigma345/paths.hpp"
#include "sigma345/sigma.hpp"

namespace sigma345 {

// roots of a polynomial given by descending coefficients, via the companion
// matrix; leading near-zeros are stripped against the coefficient scale
inline std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs) {
  double scale = 0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0) throw ConfigError("poly_roots: zero polynomial");
  std::size_t lead = 0;
  while (lead + 1 < coeffs.size() && std::abs(coeffs[lead]) <= 1e-14 * scale)
    ++lead;
  const Eigen::Index n = static_cast<Eigen::Index>(coeffs.size() - lead - 1);
  if (n == 0) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    C(0, j) = -coeffs[lead + 1 + static_cast<std::size_t>(j)] / coeffs[lead];
  for (Eigen::Index i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

// common denominator of the two-point formulas; near-zero means the divisor
// is special and the inversion matrix is singular
inline Complex divisor_denominator(const SurfacePoint<double>& P1,
                                   const SurfacePoint<double>& P2) {
  const Complex D = P1.y4 * P2.y5 - P1.y5 * P2.y4;
  const double scale =
      std::max(1.0, std::abs(P1.y4 * P2.y5) + std::abs(P1.y5 * P2.y4));
  if (std::abs(D) < 1e-8 * scale)
    throw SingularDivisor("two-point divisor is special");
  return D;
}

// wp22 and wp21 at the shifted image of P1 + P2, in closed form. The slope
// coefficient is computed in the centered coordinate x + lambda2_1 + mu0,
// the translate in which the second-kind completion vanishes.
inline std::pair<Complex, Complex> wp_closed(const CurveParams<double>& cp,
                                             const SurfacePoint<double>& P1,
                                             const SurfacePoint<double>& P2) {
  const Complex co = cp.lambda2_1 + cp.mu0;
  const Complex D = divisor_denominator(P1, P2);
  const Complex a = P1.y4 * P2.y4 * (P2.x - P1.x) / D;
  const Complex b =
      (P1.y5 * (P2.x + co) * P2.y4 - P2.y5 * (P1.x + co) * P1.y4) / D;
  return {a, -b};
}

// coefficients (a, b) of the pencil function (x + b) y4 - a y5 through P1, P2
inline std::pair<Complex, Complex> mu2_coeffs(const CurveParams<double>& cp,
                                              const SurfacePoint<double>& P1,
                                              const SurfacePoint<double>& P2) {
  (void)cp;
  const Complex D = divisor_denominator(P1, P2);
  const Complex a = P1.y4 * P2.y4 * (P2.x - P1.x) / D;
  const Complex b = (P1.y5 * P2.x * P2.y4 - P2.y5 * P1.x * P1.y4) / D;
  return {a, b};
}

inline Complex mu2(const CurveParams<double>& cp, const SurfacePoint<double>& P,
                   const SurfacePoint<double>& P1,
                   const SurfacePoint<double>& P2) {
  const auto [a, b] = mu2_coeffs(cp, P1, P2);
  return P.x * P.y4 - a * P.y5 + b * P.y4;
}

inline Complex mu1(const CurveParams<double>& cp, const SurfacePoint<double>& P,
                   const SurfacePoint<double>& P1) {
  if (std::abs(P1.y4) < 1e-12 * std::max(1.0, std::abs(P1.y5)))
    throw BranchDegeneracy("mu1: divisor point lies over a branch point");
  return P.y5 - (P1.y5 / P1.y4) * P.y4;
}

// the two zeros of mu2 beyond the divisor: deflate the pencil quartic at the
// known x values and lift the leftover roots to the sheet where mu2 vanishes
inline std::array<SurfacePoint<double>, 2> mu2_extra_zeros(
    const CurveParams<double>& cp, const SurfacePoint<double>& P1,
    const SurfacePoint<double>& P2) {
  const auto [a, b] = mu2_coeffs(cp, P1, P2);
  std::vector<Complex> cq(5, Complex(0));
  const std::array<Complex, 4> cb = {Complex(1), 3.0 * b, 3.0 * b * b,
                                     b * b * b};
  for (int i = 0; i < 4; ++i) cq[static_cast<std::size_t>(i)] += cb[static_cast<std::size_t>(i)];
  for (int i = 0; i < 4; ++i)
    cq[static_cast<std::size_t>(i) + 1] -= cp.mu0 * cb[static_cast<std::size_t>(i)];
  const Complex a3 = a * a * a;
  cq[2] -= a3;
  cq[3] -= a3 * cp.lambda2_1;
  cq[4] -= a3 * cp.lambda2_2;
  std::vector<Complex> rem = poly_roots(cq);
  for (const Complex& xx : {P1.x, P2.x}) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < rem.size(); ++k)
      if (std::abs(rem[k] - xx) < std::abs(rem[best] - xx)) best = k;
    if (std::abs(rem[best] - xx) > 1e-6 * std::max(1.0, std::abs(xx)))
      throw SingularDivisor("mu2_extra_zeros: divisor roots drifted");
    rem.erase(rem.begin() + static_cast<std::ptrdiff_t>(best));
  }
  std::array<SurfacePoint<double>, 2> out{};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto lifts = lift_x(cp, rem[k]);
    std::size_t pick = 0;
    double bv = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < lifts.size(); ++s) {
      const double v =
          std::abs((lifts[s].x + b) * lifts[s].y4 - a * lifts[s].y5);
      if (v < bv) {
        bv = v;
        pick = s;
      }
    }
    out[k] = lifts[pick];
  }
  return out;
}

// second zero of mu1 = y5 - r y4 beyond P1: the other root of the quadratic
// k2 - r^3 k1, lifted to the sheet where mu1 vanishes
inline SurfacePoint<double> mu1_second_zero(const CurveParams<double>& cp,
                                            const SurfacePoint<double>& P1) {
  if (std::abs(P1.y4) < 1e-12 * std::max(1.0, std::abs(P1.y5)))
    throw BranchDegeneracy("mu1_second_zero: divisor point over a branch");
  const Complex r = P1.y5 / P1.y4;
  const Complex r3 = r * r * r;
  const auto rts = poly_roots(
      {Complex(1), cp.lambda2_1 - r3, cp.lambda2_2 + r3 * cp.mu0});
  const Complex xq = std::abs(rts[0] - P1.x) >= std::abs(rts[1] - P1.x)
                         ? rts[0]
                         : rts[1];
  const auto lifts = lift_x(cp, xq);
  std::size_t pick = 0;
  double bv = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < lifts.size(); ++s) {
    const double v = std::abs(lifts[s].y5 - r * lifts[s].y4);
    if (v < bv) {
      bv = v;
      pick = s;
    }
  }
  return lifts[pick];
}

// sigma-derived wp22, wp21 against the closed forms, with the divisor image
// supplied by the caller
inline std::pair<double, double> jacobi_check_w2(
    const SigmaContext& ctx, const SurfacePoint<double>& P1,
    const SurfacePoint<double>& P2, const AbelVector& u) {
  const Eigen::Matrix2cd pp = wp_matrix(ctx, u);
  const auto [w22, w21] = wp_closed(ctx.params, P1, P2);
  return {std::abs(pp(1, 1) - w22) / std::max(1.0, std::abs(w22)),
          std::abs(pp(1, 0) - w21) / std::max(1.0, std::abs(w21))};
}

inline std::pair<double, double> jacobi_check_w2(
    const SigmaContext& ctx, const SurfacePoint<double>& P1,
    const SurfacePoint<double>& P2) {
  const AbelVector u = abel_path(ctx.params, P1, ctx.quad).u +
                       abel_path(ctx.params, P2, ctx.quad).u + ctx.base_shift;
  return jacobi_check_w2(ctx, P1, P2, u);
}

// gradient direction of sigma on the image of the curve: sigma1/sigma2 must
// equal -y5/y4 at the point
inline double jacobi_check_w1(const SigmaContext& ctx,
                              const SurfacePoint<double>& P1,
                              const AbelVector& u1) {
  const SigmaJet j = sigma_raw(ctx, u1, 1);
  const Complex ratio = j.grad(0) / j.grad(1);
  const Complex tgt = -P1.y5 / P1.y4;
  return std::abs(ratio - tgt) / std::max(1.0, std::abs(tgt));
}

inline double jacobi_check_w1(const SigmaContext& ctx,
                              const SurfacePoint<double>& P1) {
  const AbelVector u1 =
      abel_path(ctx.params, P1, ctx.quad).u + ctx.base_shift;
  return jacobi_check_w1(ctx, P1, u1);
}

// the wp matrix at the image of P minus the divisor image, paired with the
// weight-four monomials, against the fundamental 2-form
inline double wp_identity_residual(const SigmaContext& ctx,
                                   const SurfacePoint<double>& P,
                                   const AbelVector& arg,
                                   const SurfacePoint<double>& Pa) {
  const Eigen::Matrix2cd pp = wp_matrix(ctx, arg);
  const std::array<Complex, 2> phP = {P.y4, P.y5};
  const std::array<Complex, 2> phA = {Pa.y4, Pa.y5};
  Complex lhs = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      lhs += pp(i, j) * phP[static_cast<std::size_t>(i)] *
             phA[static_cast<std::size_t>(j)];
  const Complex rhs = fundamental_omega(ctx.params, P, Pa) * 9.0 * P.y4 *
                      P.y5 * Pa.y4 * Pa.y5;
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

inline double wp_identity_residual(const SigmaContext& ctx,
                                   const SurfacePoint<double>& P,
                                   const SurfacePoint<double>& P1,
                                   const SurfacePoint<double>& P2) {
  const auto& cp = ctx.params;
  const AbelVector u = abel_path(cp, P1, ctx.quad).u +
                       abel_path(cp, P2, ctx.quad).u + ctx.base_shift;
  const AbelVector arg = abel_path(cp, P, ctx.quad).u - u;
  return std::max(wp_identity_residual(ctx, P, arg, P1),
                  wp_identity_residual(ctx, P, arg, P2));
}

struct RfrResult {
  double residual = 0;   // exp of half the kernel sum vs the sigma ratio
  double unhalved = 0;   // control: exponent left unhalved
  double flipped = 0;    // control: bilinear correction added, not subtracted
  double coherence = 0;  // holomorphic integrals vs abel difference
};

// bilinear relation: for divisors P1+P2 and P1'+P2' and endpoints P, Q, the
// summed third-kind integrals corrected by period bilinears exponentiate to
// the cross ratio of sigma values
inline RfrResult riemann_fundamental_residual(
    const SigmaContext& ctx, const SurfacePoint<double>& P,
    const SurfacePoint<double>& Q, const SurfacePoint<double>& P1,
    const SurfacePoint<double>& P2, const SurfacePoint<double>& Pp1,
    const SurfacePoint<double>& Pp2) {
  const auto& cp = ctx.params;
  const Quadrature& q = ctx.quad;
  auto same = [](const SurfacePoint<double>& A, const SurfacePoint<double>& B) {
    return std::abs(A.x - B.x) < 1e-14 && std::abs(A.y4 - B.y4) < 1e-14;
  };
  // degenerate configurations make both sides exactly one
  if (same(P, Q) || (same(P1, Pp1) && same(P2, Pp2)) ||
      (same(P1, Pp2) && same(P2, Pp1)))
    return {};

  const std::array<const SurfacePoint<double>*, 6> pts = {&P,  &Q,   &P1,
                                                          &P2, &Pp1, &Pp2};
  std::array<AbelPath, 6> ap;
  for (std::size_t i = 0; i < 6; ++i) ap[i] = abel_path(cp, *pts[i], q);

  // from Q to P: both holomorphic coefficients and the four kernel
  // differences in a single pass
  const auto comp = composite_path(ap[1].pieces, ap[0].pieces);
  std::vector<FormFn> fns = {nu_fn(cp, 1), nu_fn(cp, 2)};
  const std::array<std::pair<int, int>, 4> labels = {
      std::pair{2, 4}, {2, 5}, {3, 4}, {3, 5}};  // indices into pts
  for (const auto& [ia, ib] : labels) {
    const SurfacePoint<double> A = *pts[static_cast<std::size_t>(ia)];
    const SurfacePoint<double> B = *pts[static_cast<std::size_t>(ib)];
    fns.push_back([cp, A, B](const SurfacePoint<double>& p) {
      return sigma_kernel(cp, p, A) - sigma_kernel(cp, p, B);
    });
  }
  auto [vals, y4e] = integrate_path(cp, comp, Q.y4, fns, q);
  if (std::abs(y4e - P.y4) > 1e-8 * std::max(1.0, std::abs(P.y4)))
    throw StepCollapse("riemann_fundamental_residual: lift mismatch at P");
  const AbelVector nuQP(vals(0), vals(1));
  RfrResult out;
  out.coherence = (nuQP - (ap[1].u - ap[0].u)).norm();

  // second-kind integrals from each primed point to each unprimed one
  const std::vector<FormFn> mfns = {nuII_fn(cp, 1), nuII_fn(cp, 2)};
  std::array<AbelVector, 4> m_int;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto [ia, ib] = labels[k];
    const auto cc = composite_path(ap[static_cast<std::size_t>(ib)].pieces,
                                   ap[static_cast<std::size_t>(ia)].pieces);
    auto [mv, y4m] =
        integrate_path(cp, cc, pts[static_cast<std::size_t>(ib)]->y4, mfns, q);
    if (std::abs(y4m - pts[static_cast<std::size_t>(ia)]->y4) >
        1e-8 * std::max(1.0, std::abs(pts[static_cast<std::size_t>(ia)]->y4)))
      throw StepCollapse("riemann_fundamental_residual: lift mismatch");
    m_int[k] = AbelVector(mv(0), mv(1));
  }
  Complex lhs = 0, lhs_flipped = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const Complex bil = (nuQP.transpose() * m_int[k])(0);
    lhs += vals(2 + static_cast<Eigen::Index>(k)) - bil;
    lhs_flipped += vals(2 + static_cast<Eigen::Index>(k)) + bil;
  }
  const AbelVector u12 = ap[2].u + ap[3].u + ctx.base_shift;
  const AbelVector up12 = ap[4].u + ap[5].u + ctx.base_shift;
  const Complex rhs =
      (sigma_eval(ctx, ap[0].u - u12) * sigma_eval(ctx, ap[1].u - up12)) /
      (sigma_eval(ctx, ap[1].u - u12) * sigma_eval(ctx, ap[0].u - up12));
  out.residual = std::abs(std::exp(0.5 * lhs) - rhs) / std::abs(rhs);
  out.unhalved = std::abs(std::exp(lhs) - rhs) / std::abs(rhs);
  out.flipped = std::abs(std::exp(0.5 * lhs_flipped) - rhs) / std::abs(rhs);
  return out;
}

}  // namespace sigma345
