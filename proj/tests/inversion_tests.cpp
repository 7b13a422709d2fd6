#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "sigma345/abel.hpp"
#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"
#include "sigma345/homology.hpp"
#include "sigma345/inversion.hpp"
#include "sigma345/paths.hpp"
#include "sigma345/periods.hpp"
#include "sigma345/sigma.hpp"

using namespace sigma345;

namespace {

const CurveParams<double>& std_curve() {
  static const CurveParams<double> cp = CurveParams<double>::standard();
  return cp;
}

const Quadrature& quad() {
  static const Quadrature q{1e-13, 14};
  return q;
}

const PeriodData& std_periods() {
  static const PeriodData pd = period_matrices(std_curve(), quad());
  return pd;
}

const SigmaContext& std_ctx() {
  static const SigmaContext ctx = [] {
    const auto& cp = std_curve();
    const auto& pd = std_periods();
    const AbelVector T = abel_branch(cp, 0, quad());
    const ThetaChar delta = find_characteristic(pd, cp, quad());
    SigmaContext c = make_sigma_context(cp, pd, delta, T, 1e-12, quad());
    calibrate_c(c);
    return c;
  }();
  return ctx;
}

SurfacePoint<double> pt(Complex x, int sheet) {
  return lift_x(std_curve(), x)[static_cast<std::size_t>(sheet)];
}

AbelVector abel(const SurfacePoint<double>& P) {
  return abel_path(std_curve(), P, quad()).u;
}

}  // namespace

TEST_CASE("polynomial roots via the companion matrix") {
  auto close = [](Complex a, Complex b) { return std::abs(a - b) < 1e-10; };

  auto r2 = poly_roots({Complex(1), Complex(-3), Complex(2)});
  REQUIRE(r2.size() == 2);
  std::sort(r2.begin(), r2.end(),
            [](Complex a, Complex b) { return a.real() < b.real(); });
  CHECK(close(r2[0], 1.0));
  CHECK(close(r2[1], 2.0));

  auto r4 = poly_roots({Complex(1), Complex(-10), Complex(35), Complex(-50),
                        Complex(24)});
  REQUIRE(r4.size() == 4);
  std::sort(r4.begin(), r4.end(),
            [](Complex a, Complex b) { return a.real() < b.real(); });
  for (int k = 0; k < 4; ++k) CHECK(close(r4[static_cast<std::size_t>(k)], k + 1.0));

  // vanishing leading coefficients are stripped
  auto r1 = poly_roots({Complex(1e-20), Complex(1), Complex(-1)});
  REQUIRE(r1.size() == 1);
  CHECK(close(r1[0], 1.0));

  CHECK(poly_roots({Complex(5)}).empty());
  CHECK_THROWS_AS(poly_roots({Complex(0), Complex(0)}), ConfigError);
}

TEST_CASE("divisor denominator flags special pairs") {
  const auto P1 = pt(Complex(1.3, 0.7), 0);
  const auto P2 = pt(Complex(-1.7, 0.4), 1);

  const Complex D = divisor_denominator(P1, P2);
  CHECK(std::abs(D - (P1.y4 * P2.y5 - P1.y5 * P2.y4)) == 0.0);
  CHECK(std::abs(D) > 1e-3);

  CHECK_THROWS_AS(divisor_denominator(P1, P1), SingularDivisor);

  // the second zero of the degree-5 pencil through P1 shares its slope, so
  // the pair is special as well
  const auto Q = mu1_second_zero(std_curve(), P1);
  CHECK_THROWS_AS(divisor_denominator(P1, Q), SingularDivisor);
}

TEST_CASE("pencil coefficient conventions are offset by the centering") {
  const auto& cp = std_curve();
  const auto P1 = pt(Complex(1.3, 0.7), 0);
  const auto P2 = pt(Complex(-1.7, 0.4), 1);
  const Complex co = cp.lambda2_1 + cp.mu0;

  const auto [a_c, nb_c] = wp_closed(cp, P1, P2);
  const auto [a_p, b_p] = mu2_coeffs(cp, P1, P2);
  CHECK(std::abs(a_c - a_p) == 0.0);
  CHECK(std::abs(nb_c - (-b_p + co)) < 1e-13 * std::max(1.0, std::abs(b_p)));
}

TEST_CASE("degree-7 pencil vanishes on its divisor and branch points") {
  const auto& cp = std_curve();
  const auto P1 = pt(Complex(1.3, 0.7), 0);
  const auto P2 = pt(Complex(-1.7, 0.4), 1);

  const double scale = std::abs(P1.x * P1.y4) + std::abs(P2.x * P2.y4) + 1.0;
  CHECK(std::abs(mu2(cp, P1, P1, P2)) < 1e-12 * scale);
  CHECK(std::abs(mu2(cp, P2, P1, P2)) < 1e-12 * scale);
  for (int a = 0; a < 3; ++a)
    CHECK(std::abs(mu2(cp, branch_point(cp, a), P1, P2)) == 0.0);

  const auto extra = mu2_extra_zeros(cp, P1, P2);
  for (const auto& Z : extra) {
    CHECK(relative_residual(cp, Z.x, Z.y4, Z.y5) < 1e-8);
    CHECK(std::abs(mu2(cp, Z, P1, P2)) < 1e-8 * scale);
  }
}

TEST_CASE("degree-7 pencil divisor sums to zero on the jacobian") {
  const auto& cp = std_curve();
  const auto& pd = std_periods();
  const auto P1 = pt(Complex(1.3, 0.7), 0);
  const auto P2 = pt(Complex(-1.7, 0.4), 1);
  const auto extra = mu2_extra_zeros(cp, P1, P2);

  AbelVector s = abel(P1) + abel(P2) + abel(extra[0]) + abel(extra[1]);
  for (int a = 0; a < 3; ++a) s += abel_branch(cp, a, quad());
  CHECK(lattice_dist(pd.lattice, s).first < 1e-8);
}

TEST_CASE("degree-5 pencil vanishes on its divisor and closes up") {
  const auto& cp = std_curve();
  const auto& pd = std_periods();
  const auto P1 = pt(Complex(1.3, 0.7), 0);

  CHECK(std::abs(mu1(cp, P1, P1)) < 1e-13 * std::max(1.0, std::abs(P1.y5)));
  for (int a = 0; a < 3; ++a)
    CHECK(std::abs(mu1(cp, branch_point(cp, a), P1)) == 0.0);

  const auto Q = mu1_second_zero(cp, P1);
  CHECK(relative_residual(cp, Q.x, Q.y4, Q.y5) < 1e-10);
  CHECK(std::abs(mu1(cp, Q, P1)) <
        1e-10 * std::max(1.0, std::abs(Q.y5)));

  // of the two quadratic roots the farther from P1.x is returned
  const Complex r = P1.y5 / P1.y4;
  const Complex r3 = r * r * r;
  const auto rts = poly_roots(
      {Complex(1), cp.lambda2_1 - r3, cp.lambda2_2 + r3 * cp.mu0});
  REQUIRE(rts.size() == 2);
  const double dmax = std::max(std::abs(rts[0] - P1.x), std::abs(rts[1] - P1.x));
  CHECK(std::abs(Q.x - P1.x) == doctest::Approx(dmax).epsilon(1e-9));

  // full zero divisor: P1 + Q + all branch points
  AbelVector s = abel(P1) + abel(Q);
  for (int a = 0; a < 3; ++a) s += abel_branch(cp, a, quad());
  CHECK(lattice_dist(pd.lattice, s).first < 1e-8);

  // equivalently, the pair is inverse up to twice the base image
  const AbelVector T = abel_branch(cp, 0, quad());
  CHECK(lattice_dist(pd.lattice, abel(P1) + abel(Q) + 2.0 * T).first < 1e-8);

  CHECK_THROWS_AS(mu1(cp, P1, branch_point(cp, 0)), BranchDegeneracy);
  CHECK_THROWS_AS(mu1_second_zero(cp, branch_point(cp, 1)), BranchDegeneracy);
}

TEST_CASE("sigma solves the inversion problem on a two-point divisor") {
  const auto& ctx = std_ctx();
  const auto P1 = pt(Complex(1.3, 0.7), 0);
  const auto P2 = pt(Complex(-1.7, 0.4), 1);

  const auto [d22, d21] = jacobi_check_w2(ctx, P1, P2);
  CHECK(d22 < 1e-6);
  CHECK(d21 < 1e-6);

  CHECK(jacobi_check_w1(ctx, P1) < 1e-6);
  CHECK(jacobi_check_w1(ctx, P2) < 1e-6);
}

TEST_CASE("wp pairing reproduces the fundamental form") {
  const auto& ctx = std_ctx();
  const auto P1 = pt(Complex(1.3, 0.7), 0);
  const auto P2 = pt(Complex(-1.7, 0.4), 1);
  const auto P = pt(Complex(2.1, -0.3), 2);

  CHECK(wp_identity_residual(ctx, P, P1, P2) < 1e-5);

  // off the correct argument the pairing misses badly
  const AbelVector u12 = abel(P1) + abel(P2) + ctx.base_shift;
  AbelVector arg = abel(P) - u12;
  arg(0) += 0.07;
  arg(1) -= 0.05;
  CHECK(wp_identity_residual(ctx, P, arg, P1) > 1e-2);
}

TEST_CASE("bilinear third-kind relation ties kernels to sigma ratios") {
  const auto& ctx = std_ctx();
  const auto P = pt(Complex(2.2, 0.0), 0);
  const auto Q = pt(Complex(-2.4, 0.3), 1);
  const auto P1 = pt(Complex(1.3, 0.7), 0);
  const auto P2 = pt(Complex(-1.7, 0.4), 1);
  const auto Pp1 = pt(Complex(0.6, -1.4), 2);
  const auto Pp2 = pt(Complex(-0.5, 1.6), 0);

  const RfrResult r =
      riemann_fundamental_residual(ctx, P, Q, P1, P2, Pp1, Pp2);
  CHECK(r.coherence < 1e-10);
  CHECK(r.residual < 1e-4);
  CHECK(r.unhalved > 1e-2);
  CHECK(r.flipped > 1e-2);

  // degenerate inputs short-circuit to the trivial answer
  const RfrResult d0 =
      riemann_fundamental_residual(ctx, P, P, P1, P2, Pp1, Pp2);
  CHECK(d0.residual == 0.0);
  CHECK(d0.unhalved == 0.0);
  CHECK(d0.flipped == 0.0);
  CHECK(d0.coherence == 0.0);

  const RfrResult d1 =
      riemann_fundamental_residual(ctx, P, Q, P1, P2, P2, P1);
  CHECK(d1.residual == 0.0);
  CHECK(d1.coherence == 0.0);
}
