#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "sigma345/abel.hpp"
#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"
#include "sigma345/homology.hpp"
#include "sigma345/paths.hpp"
#include "sigma345/periods.hpp"
#include "sigma345/sigma.hpp"
#include "sigma345/theta.hpp"

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

const HomologyBasis& std_homology() {
  static const HomologyBasis H = build_homology(std_curve());
  return H;
}

const PeriodData& std_periods() {
  static const PeriodData pd =
      period_matrices(std_curve(), std_homology(), quad());
  return pd;
}

const AbelVector& base_image() {
  static const AbelVector T = abel_branch(std_curve(), 0, quad());
  return T;
}

const CharacteristicSearch& std_search() {
  static const CharacteristicSearch s = find_characteristic_search(
      std_curve(), std_periods(), &std_homology(), base_image(), quad());
  return s;
}

// fully calibrated context shared by the evaluation tests
const SigmaContext& std_ctx() {
  static const SigmaContext ctx = [] {
    SigmaContext c = make_sigma_context(std_curve(), std_periods(),
                                        std_search().delta, base_image(),
                                        1e-12, quad());
    calibrate_c(c);
    return c;
  }();
  return ctx;
}

Eigen::Matrix2cd default_tau() {
  const double s = 1.0 / std::sqrt(3.0);
  Eigen::Matrix2cd t;
  t << Complex(0, 2 * s), Complex(0, -s), Complex(0, -s), Complex(0, 2 * s);
  return t;
}

// independent series sum over a fixed box, same exponent conventions
ThetaResult theta_reference(const Eigen::Vector2cd& z,
                            const Eigen::Matrix2cd& tau, const ThetaChar& d,
                            ThetaVariant variant) {
  const Complex lin = variant == ThetaVariant::two_pi_linear
                          ? Complex(0, 2 * pi)
                          : Complex(0, pi);
  ThetaResult out;
  for (int i = -14; i <= 14; ++i)
    for (int j = -14; j <= 14; ++j) {
      const Eigen::Vector2cd m(Complex(i + d.dpp(0)), Complex(j + d.dpp(1)));
      const Complex q = (m.transpose() * (tau * m))(0);
      const Complex l = (m.transpose() * (z + d.dp.cast<Complex>()))(0);
      const Complex t = std::exp(Complex(0, pi) * q + lin * l);
      out.value += t;
      out.grad += lin * m * t;
      out.hess += (lin * lin) * (m * m.transpose()) * t;
    }
  return out;
}

}  // namespace

TEST_CASE("theta box radius certifies the series truncation") {
  CHECK(theta_box_radius(default_tau(), 1e-12) == 10);
  CHECK(theta_box_radius(default_tau(), 1e-4) == 10);  // clamped from below

  Eigen::Matrix2cd squat = Eigen::Matrix2cd::Zero();
  squat(0, 0) = Complex(0, 0.1);
  squat(1, 1) = Complex(0, 0.1);
  CHECK(theta_box_radius(squat, 1e-12) == 11);

  Eigen::Matrix2cd bad = Eigen::Matrix2cd::Zero();
  bad(0, 0) = Complex(0, -1.0);
  bad(1, 1) = Complex(0, -1.0);
  CHECK_THROWS_AS(theta_box_radius(bad, 1e-12), HomologyRankFailure);

  Eigen::Matrix2cd indef;
  indef << Complex(0, 1), Complex(0, 2), Complex(0, 2), Complex(0, 1);
  CHECK_THROWS_AS(theta_box_radius(indef, 1e-12), HomologyRankFailure);
}

TEST_CASE("theta series agrees with a direct reference sum") {
  const Eigen::Matrix2cd tau = default_tau();
  Eigen::Vector2cd z;
  z << Complex(0.31, 0.11), Complex(-0.27, 0.05);

  ThetaChar d;
  d.dpp << 0.5, 0.0;
  d.dp << 0.0, 0.5;

  for (ThetaVariant v : {ThetaVariant::two_pi_linear, ThetaVariant::pi_linear}) {
    const ThetaResult got = theta2(z, tau, d, 12, 2, v);
    const ThetaResult ref = theta_reference(z, tau, d, v);
    CHECK(std::abs(got.value - ref.value) < 1e-12 * std::abs(ref.value));
    CHECK((got.grad - ref.grad).cwiseAbs().maxCoeff() <
          1e-12 * ref.grad.cwiseAbs().maxCoeff());
    CHECK((got.hess - ref.hess).cwiseAbs().maxCoeff() <
          1e-12 * ref.hess.cwiseAbs().maxCoeff());
  }

  // default characteristic as well
  const ThetaResult g0 = theta2(z, tau, ThetaChar{}, 12, 0);
  const ThetaResult r0 = theta_reference(z, tau, ThetaChar{}, ThetaVariant::two_pi_linear);
  CHECK(std::abs(g0.value - r0.value) < 1e-12 * std::abs(r0.value));
}

TEST_CASE("theta translational laws in the two pi convention") {
  const Eigen::Matrix2cd tau = default_tau();
  Eigen::Vector2cd z;
  z << Complex(0.17, -0.08), Complex(-0.21, 0.13);

  ThetaChar d;
  d.dpp << 0.5, 0.0;
  d.dp << 0.5, 0.5;

  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2cd ek = Eigen::Vector2cd::Zero();
    ek(k) = 1.0;

    // integer shift picks up exp(2 pi i delta''_k)
    const Complex lhs1 = theta2(z + ek, tau, d, 12).value;
    const Complex rhs1 = std::exp(Complex(0, 2 * pi) * d.dpp(k)) *
                         theta2(z, tau, d, 12).value;
    CHECK(std::abs(lhs1 - rhs1) < 1e-12 * std::abs(rhs1));

    // tau-column shift
    const Complex lhs2 = theta2(z + tau.col(k), tau, d, 12).value;
    const Complex rhs2 =
        std::exp(-Complex(0, pi) * tau(k, k) -
                 Complex(0, 2 * pi) * (z(k) + d.dp(k))) *
        theta2(z, tau, d, 12).value;
    CHECK(std::abs(lhs2 - rhs2) < 1e-10 * std::abs(rhs2));
  }

  // the characteristic can be absorbed into the argument
  const Complex lhs3 = theta2(z, tau, d, 12).value;
  const Eigen::Vector2cd dpp_c = d.dpp.cast<Complex>();
  const Complex quad = (dpp_c.transpose() * (tau * dpp_c))(0);
  const Complex cross =
      (dpp_c.transpose() * (z + d.dp.cast<Complex>()))(0);
  const Complex rhs3 =
      std::exp(Complex(0, pi) * quad + Complex(0, 2 * pi) * cross) *
      theta2(z + d.dp.cast<Complex>() + tau * dpp_c, tau, ThetaChar{}, 12).value;
  CHECK(std::abs(lhs3 - rhs3) < 1e-10 * std::abs(rhs3));

  // even at the zero characteristic
  const Complex pv = theta2(z, tau, ThetaChar{}, 12, 1).value;
  const ThetaResult pm = theta2(-z, tau, ThetaChar{}, 12, 1);
  CHECK(std::abs(pm.value - pv) < 1e-12 * std::abs(pv));
  CHECK((pm.grad + theta2(z, tau, ThetaChar{}, 12, 1).grad).cwiseAbs().maxCoeff() <
        1e-10 * pm.grad.cwiseAbs().maxCoeff());
}

TEST_CASE("theta derivatives agree with finite differences") {
  const Eigen::Matrix2cd tau = default_tau();
  Eigen::Vector2cd z;
  z << Complex(0.23, -0.19), Complex(0.05, 0.12);
  ThetaChar d;
  d.dpp << 0.0, 0.5;
  d.dp << 0.5, 0.0;

  const ThetaResult jet = theta2(z, tau, d, 12, 2);
  const double h = 1e-5;
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2cd ek = Eigen::Vector2cd::Zero();
    ek(k) = 1.0;
    const Complex fd_g = (theta2(z + h * ek, tau, d, 12).value -
                          theta2(z - h * ek, tau, d, 12).value) /
                         (2 * h);
    CHECK(std::abs(fd_g - jet.grad(k)) < 1e-6 * std::max(1.0, std::abs(jet.grad(k))));
    for (int l = 0; l < 2; ++l) {
      const Complex fd_h = (theta2(z + h * ek, tau, d, 12, 1).grad(l) -
                            theta2(z - h * ek, tau, d, 12, 1).grad(l)) /
                           (2 * h);
      CHECK(std::abs(fd_h - jet.hess(l, k)) <
            1e-6 * std::max(1.0, std::abs(jet.hess(l, k))));
    }
  }
}

TEST_CASE("characteristic search lands on the even zero characteristic") {
  const auto& s = std_search();
  CHECK(s.delta.dpp.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.delta.dp.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.best_score <= 1e-6);
  CHECK(s.second_score / std::max(s.best_score, 1e-300) >= 1e3);
  CHECK_FALSE(s.fallback_used);

  const ThetaChar d = find_characteristic(std_periods(), std_curve(), quad());
  CHECK(d.dpp.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.dp.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("calibration fixes the leading coefficient") {
  SigmaContext ctx =
      make_sigma_context(std_curve(), std_periods(), std_search().delta,
                         base_image(), 1e-12, quad());
  CHECK(ctx.lattice_radius == 10);

  const SigmaJet jet = sigma_raw(ctx, ctx.base_shift, 2);
  CHECK(std::abs(jet.value) < 1e-9 * jet.grad.norm());
  CHECK(std::abs(jet.grad(0) - Complex(-1.9427867900789277, -3.3650054286903455)) <
        5e-9);

  const Complex c = calibrate_c(ctx);
  CHECK(std::abs(c - Complex(0.1286811302592007, -0.22288225558432392)) < 5e-9);

  // after calibration the first direction has unit leading coefficient
  const auto [v, g] = sigma_grad(ctx, ctx.base_shift);
  CHECK(std::abs(g(0) + 1.0) < 1e-12);

  // a second pass is a no-op
  const Complex c2 = calibrate_c(ctx);
  CHECK(std::abs(c2 - c) < 1e-12 * std::abs(c));
}

TEST_CASE("pinned sigma and wp values at a probe argument") {
  const auto& ctx = std_ctx();
  AbelVector u;
  u << Complex(0.31, -0.22), Complex(0.41, 0.17);

  CHECK(std::abs(sigma_eval(ctx, u) -
                 Complex(0.14953172086649025, -0.2627372058925276)) < 2e-9);

  const Eigen::Matrix2cd pp = wp_matrix(ctx, u);
  Eigen::Matrix2cd want;
  want << Complex(-0.1472052195278804, -0.1494681531840555),
      Complex(-0.3214244439525134, 0.0690249685465796),
      Complex(-0.3214244439525134, 0.0690249685465796),
      Complex(-0.048445375813541, 0.1398329211385962);
  CHECK((pp - want).cwiseAbs().maxCoeff() < 5e-9);
  CHECK(std::abs(pp(0, 1) - pp(1, 0)) < 1e-10);
  CHECK(std::abs(wp_eval(ctx, u, 1, 2) - pp(0, 1)) == 0.0);
  CHECK_THROWS_AS(wp_eval(ctx, u, 0, 1), ConfigError);
  CHECK_THROWS_AS(wp_eval(ctx, u, 1, 3), ConfigError);
}

TEST_CASE("partial derivative interface is consistent") {
  const auto& ctx = std_ctx();
  AbelVector u;
  u << Complex(0.31, -0.22), Complex(0.41, 0.17);

  const auto [v, g] = sigma_grad(ctx, u);
  CHECK(sigma_partial(ctx, u, {}) == v);
  CHECK(sigma_partial(ctx, u, {1}) == g(0));
  CHECK(sigma_partial(ctx, u, {2}) == g(1));

  const double h = 1e-5;
  AbelVector e1 = AbelVector::Zero(), e2 = AbelVector::Zero();
  e1(0) = 1.0;
  e2(1) = 1.0;
  const Complex fd1 =
      (sigma_eval(ctx, u + h * e1) - sigma_eval(ctx, u - h * e1)) / (2 * h);
  CHECK(std::abs(fd1 - g(0)) < 1e-6 * std::max(1.0, std::abs(g(0))));

  const Complex fd12 = (sigma_grad(ctx, u + h * e2).second(0) -
                        sigma_grad(ctx, u - h * e2).second(0)) /
                       (2 * h);
  CHECK(std::abs(fd12 - sigma_partial(ctx, u, {1, 2})) <
        1e-6 * std::max(1.0, std::abs(fd12)));
  const Complex d12 = sigma_partial(ctx, u, {1, 2});
  const Complex d21 = sigma_partial(ctx, u, {2, 1});
  CHECK(std::abs(d12 - d21) < 1e-12 * std::max(1.0, std::abs(d12)));

  CHECK_THROWS_AS(sigma_partial(ctx, u, {3}), ConfigError);
  CHECK_THROWS_AS(sigma_partial(ctx, u, {0}), ConfigError);
  CHECK_THROWS_AS(sigma_partial(ctx, u, {1, 1, 1}), ConfigError);
}

TEST_CASE("quasi-periodicity along lattice generators") {
  const auto& ctx = std_ctx();
  AbelVector u;
  u << Complex(0.213, -0.117), Complex(-0.152, 0.233);

  const Eigen::Vector2d z = Eigen::Vector2d::Zero();
  CHECK(quasi_periodicity_residual(ctx, u, Eigen::Vector2d(1, 0), z) < 1e-6);
  CHECK(quasi_periodicity_residual(ctx, u, Eigen::Vector2d(0, 1), z) < 1e-6);
  CHECK(quasi_periodicity_residual(ctx, u, z, Eigen::Vector2d(1, 0)) < 1e-6);
  CHECK(quasi_periodicity_residual(ctx, u, z, Eigen::Vector2d(0, 1)) < 1e-6);
  CHECK(quasi_periodicity_residual(ctx, u, Eigen::Vector2d(1, -1),
                                   Eigen::Vector2d(0, 1)) < 1e-6);

  // flipping the sign of the linear exponent breaks the law
  CHECK(quasi_periodicity_residual(ctx, u, Eigen::Vector2d(1, 0), z, 1.0) >
        1e-3);

  // flipping the quadratic sign in the context does too
  SigmaContext flipped = ctx;
  flipped.quad_sign = 1.0;
  CHECK(quasi_periodicity_residual(flipped, u, Eigen::Vector2d(1, 0), z) >
        1e-4);
}

TEST_CASE("translation sign factor") {
  const ThetaChar zero;
  CHECK(std::abs(sigma_translation_sign(zero, Eigen::Vector2d(1, 0),
                                        Eigen::Vector2d(0, 1)) -
                 1.0) < 1e-15);
  CHECK(std::abs(sigma_translation_sign(zero, Eigen::Vector2d(1, 1),
                                        Eigen::Vector2d(1, 0)) +
                 1.0) < 1e-15);

  ThetaChar half;
  half.dpp << 0.5, 0.0;
  CHECK(std::abs(sigma_translation_sign(half, Eigen::Vector2d(1, 0),
                                        Eigen::Vector2d(0, 0)) +
                 1.0) < 1e-15);
}

TEST_CASE("argument reduction and periodicity of wp") {
  const auto& ctx = std_ctx();
  const auto& pd = std_periods();
  AbelVector u;
  u << Complex(0.31, -0.22), Complex(0.41, 0.17);

  const AbelVector big = u + pd.omega1.col(0) + 2.0 * pd.omega2.col(1);
  auto [ur, n] = reduce_to_cell(pd, big);
  CHECK((ur - u).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(n(0) == 1);
  CHECK(n(1) == 0);
  CHECK(n(2) == 0);
  CHECK(n(3) == 2);

  const Eigen::Matrix2cd a = wp_matrix(ctx, u);
  const Eigen::Matrix2cd b = wp_matrix(ctx, big);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("sigma vanishes along the shifted curve image") {
  const auto& ctx = std_ctx();
  const auto& cp = std_curve();
  const auto& pd = std_periods();

  const SurfacePoint<double> P = lift_x(cp, Complex(1.3, 0.7))[0];
  const AbelVector s = shifted_abel_map(cp, pd, {P}, ctx.base_shift, quad());
  const auto [v, g] = sigma_grad(ctx, s);
  CHECK(std::abs(v) < 1e-8 * g.norm());

  CHECK_THROWS_AS(wp_matrix(ctx, ctx.base_shift), OnThetaDivisor);
}

TEST_CASE("sigma is even at the zero characteristic") {
  const auto& ctx = std_ctx();
  AbelVector u;
  u << Complex(0.29, 0.07), Complex(-0.33, 0.19);

  const auto [vp, gp] = sigma_grad(ctx, u);
  const auto [vm, gm] = sigma_grad(ctx, -u);
  CHECK(std::abs(vm - vp) < 1e-10 * std::abs(vp));
  CHECK((gm + gp).cwiseAbs().maxCoeff() < 1e-9 * gp.cwiseAbs().maxCoeff());
}

TEST_CASE("leading term of sigma follows the weighted expansion") {
  const auto& ctx = std_ctx();
  const double a = 0.7, b = 1.1;
  const double target = 0.5 * b * b - a;

  auto ratio = [&](double eps) {
    AbelVector u;
    u << Complex(eps * eps * a, 0.0), Complex(eps * b, 0.0);
    return sigma_eval(ctx, ctx.base_shift + u) / (eps * eps);
  };

  const double err2 = std::abs(ratio(1e-2) - target);
  const double err3 = std::abs(ratio(1e-3) - target);
  CHECK(err3 < 0.3 * err2);
  CHECK(err3 < 1e-2);
}
