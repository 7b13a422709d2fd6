#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"
#include "sigma345/forms.hpp"

using namespace sigma345;

namespace {
double cdist(Complex a, Complex b) { return std::abs(a - b); }

SurfacePoint<double> pt0() {
  return lift_x(CurveParams<double>::standard(), Complex(2, 0))[0];
}
SurfacePoint<double> ptA() {
  return lift_x(CurveParams<double>::standard(), Complex(1.3, 0.7))[0];
}
SurfacePoint<double> ptB() {
  return lift_x(CurveParams<double>::standard(), Complex(-1.7, 0.4))[1];
}
}  // namespace

TEST_CASE("basis coefficients at a rational point") {
  const auto cp = CurveParams<double>::standard();
  const auto P = pt0();
  const double c12 = std::cbrt(12.0);
  CHECK(cdist(holomorphic_coeff(cp, 1, P), 2.0 / (3.0 * c12 * c12)) < 1e-14);
  CHECK(cdist(holomorphic_coeff(cp, 2, P), 1.0 / (3.0 * c12)) < 1e-14);
  CHECK(cdist(second_kind_coeff(cp, 1, P), -4.0 / (3.0 * c12)) < 1e-14);
  CHECK(cdist(second_kind_coeff(cp, 2, P), -4.0 / (3.0 * c12 * c12)) < 1e-14);
  CHECK_THROWS_AS(holomorphic_coeff(cp, 0, P), ConfigError);
  CHECK_THROWS_AS(holomorphic_coeff(cp, 3, P), ConfigError);
  CHECK_THROWS_AS(second_kind_coeff(cp, 0, P), ConfigError);

  CHECK(holomorphic_oneform(cp, 1, P).chart == Chart::x_plane);
  CHECK(cdist(holomorphic_oneform(cp, 2, P).coeff,
              holomorphic_coeff(cp, 2, P)) == 0.0);
  CHECK(cdist(second_kind_oneform(cp, 1, P).coeff,
              second_kind_coeff(cp, 1, P)) == 0.0);
  CHECK(cdist(nu_fn(cp, 1)(P), holomorphic_coeff(cp, 1, P)) == 0.0);
  CHECK(cdist(nuII_fn(cp, 2)(P), second_kind_coeff(cp, 2, P)) == 0.0);
}

TEST_CASE("pullbacks to the chart at infinity") {
  const auto cp = CurveParams<double>::standard();
  for (double t0 : {0.04, 0.12}) {
    const Complex tc(t0, -0.4 * t0);
    const auto Pt = infinity_chart(cp, tc);
    const Complex dxdt = -3.0 / ipow(tc, 4);
    for (int i = 1; i <= 2; ++i)
      CHECK(cdist(holomorphic_coeff(cp, i, Pt) * dxdt,
                  holomorphic_tail_coeff(cp, i, tc)) < 1e-13);
  }
  // the tails stay finite at t -> 0: nu1 ~ -t dt, nu2 ~ -dt
  CHECK(cdist(holomorphic_tail_coeff(cp, 2, Complex(1e-8, 0)), {-1, 0}) <
        1e-10);
  CHECK(std::abs(holomorphic_tail_coeff(cp, 1, Complex(1e-8, 0))) < 1e-7);
  CHECK_THROWS_AS(holomorphic_tail_coeff(cp, 5, Complex(0.1, 0)), ConfigError);
}

TEST_CASE("sigma kernel pole structure") {
  const auto cp = CurveParams<double>::standard();
  const auto Q = ptA();
  // residue +1 at Q itself
  const Complex J =
      trapezoid_loop(cp, Q.x, 1e-3, Q, sigma_kernel_fn(cp, Q), 256);
  CHECK(cdist(J, Complex(0, 2 * pi)) < 1e-9);
  // no pole at the rotated lifts over the same x
  const Complex J1 = trapezoid_loop(cp, Q.x, 1e-3, zeta3_action(Q, 1),
                                    sigma_kernel_fn(cp, Q), 256);
  CHECK(std::abs(J1) < 1e-9);
  const Complex J2 = trapezoid_loop(cp, Q.x, 1e-3, zeta3_action(Q, 2),
                                    sigma_kernel_fn(cp, Q), 256);
  CHECK(std::abs(J2) < 1e-9);
  // the diagonal itself is rejected
  CHECK_THROWS_AS(sigma_kernel(cp, Q, Q), DiagonalPole);
  CHECK_THROWS_AS(dq_sigma_kernel(cp, Q, Q), DiagonalPole);
}

TEST_CASE("kernel slot derivative against a centered difference") {
  const auto cp = CurveParams<double>::standard();
  const auto P = ptA();
  const auto Q = ptB();
  const double h = 1e-6;
  auto shifted = [&](double s) {
    return lift_near(cp, Q.x + s, Q.y4 + cp.dy4_dx(Q.x, Q.y4) * s);
  };
  const Complex fd =
      (sigma_kernel(cp, P, shifted(h)) - sigma_kernel(cp, P, shifted(-h))) /
      (2.0 * h);
  const Complex an = dq_sigma_kernel(cp, P, Q);
  CHECK(cdist(an, fd) < 1e-8 * std::max(1.0, std::abs(an)));
}

TEST_CASE("slot exchange identity and its closed form") {
  const auto cp = CurveParams<double>::standard();
  const auto P = ptA();
  const auto Q = ptB();
  CHECK(slot_exchange_residual(cp, P, Q) < 1e-12);
  CHECK(slot_exchange_residual(cp, Q, zeta3_action(P, 2)) < 1e-12);
  // the standard curve sits on the slice mu0 = mu1 + mu2
  CHECK(cdist(sym_defect_tensor(cp, P, Q), sym_defect_closed(cp, P, Q)) <
        1e-13);
}

TEST_CASE("fundamental 2-form") {
  const auto cp = CurveParams<double>::standard();
  const auto P = ptA();
  const auto Q = ptB();
  const Complex a = fundamental_omega(cp, P, Q);
  const Complex b = fundamental_omega(cp, Q, P);
  CHECK(cdist(a, b) < 1e-12 * std::max(1.0, std::abs(a)));
  // polynomial form consistency
  const Complex dx = P.x - Q.x;
  CHECK(cdist(omega_polynomial_F(cp, P, Q),
              a * dx * dx * 9.0 * P.y4 * P.y5 * Q.y4 * Q.y5) < 1e-12);
  // diagonal normalization: (x1 - x2)^2 Omega -> 1, second order
  double prev = 1e300;
  for (double h : {1e-2, 1e-3}) {
    const auto Qh = lift_near(cp, P.x + h, P.y4 + cp.dy4_dx(P.x, P.y4) * h);
    const Complex dd = P.x - Qh.x;
    const double dev = std::abs(dd * dd * fundamental_omega(cp, P, Qh) - 1.0);
    CHECK(dev < prev / 30.0);
    prev = dev;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("third kind form residues") {
  const auto cp = CurveParams<double>::standard();
  const auto Pa = ptA();
  const auto Pb = ptB();
  const FormFn form = third_kind_form(cp, Pa, Pb);
  const double r = cp.min_separation / 4.0;
  CHECK(cdist(trapezoid_loop(cp, Pa.x, r, Pa, form), Complex(0, 2 * pi)) <
        1e-8);
  CHECK(cdist(trapezoid_loop(cp, Pb.x, r, Pb, form), Complex(0, -2 * pi)) <
        1e-8);
  CHECK(std::abs(trapezoid_loop(cp, Pa.x, r, zeta3_action(Pa, 1), form)) <
        1e-8);
}

TEST_CASE("contour integration integrates meromorphic coefficients") {
  const auto cp = CurveParams<double>::standard();
  const auto near = lift_x(cp, Complex(3.4, 0))[0];
  const FormFn simple = [](const SurfacePoint<double>& p) {
    return 1.0 / (p.x - 3.0);
  };
  CHECK(cdist(contour_integral(cp, Complex(3, 0), 0.5, near, simple),
              Complex(0, 2 * pi)) < 1e-10);
  CHECK(cdist(trapezoid_loop(cp, Complex(3, 0), 0.5, near, simple),
              Complex(0, 2 * pi)) < 1e-10);
  // three loops around a branch value close up for a third-kind form
  const FormFn form = third_kind_form(cp, ptA(), ptB());
  const double rb = 0.25 * cp.branch_gap();
  const auto nb = lift_x(cp, cp.mu1 + rb)[0];
  CHECK(std::abs(contour_integral(cp, cp.mu1, rb, nb, form, 3)) < 1e-8);
}
