#pragma once

// Genus-2 Riemann theta series with a real characteristic, together with its
// first two derivative tensors in the series variable. The sum runs over an
// integer box centered where the Gaussian weight peaks; the box radius comes
// from the decay bound, so the dropped tail is certified smaller than the
// requested tolerance.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"

namespace sigma345 {

struct ThetaChar {
  Eigen::Vector2d dpp = Eigen::Vector2d::Zero();  // delta''
  Eigen::Vector2d dp = Eigen::Vector2d::Zero();   // delta'
};

// convention switch for the linear term; the 2 pi variant paired with the
// (2 omega')^{-1} argument is the one that satisfies the translational law
enum class ThetaVariant { two_pi_linear, pi_linear };

struct ThetaResult {
  Complex value{0, 0};
  Eigen::Vector2cd grad = Eigen::Vector2cd::Zero();
  Eigen::Matrix2cd hess = Eigen::Matrix2cd::Zero();
};

// box radius so that exp(-pi lambda_min R^2) clears the tolerance; the
// Cholesky factorization doubles as the positive-definiteness certificate
inline int theta_box_radius(const Eigen::Matrix2cd& tau, double tol) {
  const Eigen::Matrix2d Y = 0.5 * (tau.imag() + tau.imag().transpose());
  const Eigen::LLT<Eigen::Matrix2d> llt(Y);
  if (llt.info() != Eigen::Success)
    throw HomologyRankFailure("theta_box_radius: Im tau not positive definite");
  const double tr = Y(0, 0) + Y(1, 1);
  const double det = Y(0, 0) * Y(1, 1) - Y(0, 1) * Y(1, 0);
  const double lmin = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4 * det)));
  const double R = std::sqrt((-std::log(tol) + 5.0) / (pi * lmin));
  return std::clamp(static_cast<int>(std::ceil(R)), 10, 24);
}

inline ThetaResult theta2(const Eigen::Vector2cd& z,
                          const Eigen::Matrix2cd& tau, const ThetaChar& delta,
                          int R, int want = 0,
                          ThetaVariant variant = ThetaVariant::two_pi_linear) {
  const Eigen::Matrix2d Y = tau.imag();
  const Eigen::Vector2d imz(z(0).imag(), z(1).imag());
  const Eigen::Vector2d ctr =
      -delta.dpp - Y.partialPivLu().solve(imz);
  const int n0 = static_cast<int>(std::lround(ctr(0)));
  const int n1 = static_cast<int>(std::lround(ctr(1)));
  const Complex lin = variant == ThetaVariant::two_pi_linear
                          ? Complex(0, 2 * pi)
                          : Complex(0, pi);
  const Eigen::Vector2cd zs = z + delta.dp.cast<Complex>();
  ThetaResult out;
  for (int i = n0 - R; i <= n0 + R; ++i) {
    for (int j = n1 - R; j <= n1 + R; ++j) {
      const Eigen::Vector2cd m(Complex(i + delta.dpp(0)),
                               Complex(j + delta.dpp(1)));
      const Complex quad = m.transpose() * (tau * m);
      const Complex linr = m.transpose() * zs;
      const Complex t = std::exp(Complex(0, pi) * quad + lin * linr);
      out.value += t;
      if (want >= 1) out.grad += lin * m * t;
      if (want >= 2) out.hess += (lin * lin) * (m * m.transpose()) * t;
    }
  }
  return out;
}

}  // namespace sigma345
