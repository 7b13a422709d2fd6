#pragma once

// Period matrices. Integrates the two holomorphic and the two second-kind
// forms over the four canonical cycles in one quadrature pass, then stores
// the full period matrices (integrals over whole cycles):
//   omega1 = 2 omega',  omega2 = 2 omega''   (holomorphic)
//   eta1   = 2 eta',    eta2   = 2 eta''     (second kind, sign -1/2 int)
// together with tau = omega'^{-1} omega'' and gamma = eta' omega'^{-1}, the
// symmetric matrix of the quadratic form in the sigma exponent. The real
// 4x4 lattice matrix collects the four period generators columnwise.

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"
#include "sigma345/forms.hpp"
#include "sigma345/homology.hpp"
#include "sigma345/paths.hpp"

namespace sigma345 {

using AbelVector = Eigen::Vector2cd;

struct PeriodData {
  Eigen::Matrix2cd omega1, omega2, eta1, eta2;
  Eigen::Matrix2cd tau;    // omega'^{-1} omega''
  Eigen::Matrix2cd gamma;  // eta' omega'^{-1}
  Eigen::Matrix4d lattice;
};

inline Eigen::Matrix4d make_lattice(const Eigen::Matrix2cd& omega1,
                                    const Eigen::Matrix2cd& omega2) {
  Eigen::Matrix4d L;
  for (int j = 0; j < 4; ++j) {
    const Eigen::Vector2cd g =
        j < 2 ? Eigen::Vector2cd(omega1.col(j)) : Eigen::Vector2cd(omega2.col(j - 2));
    L(0, j) = g(0).real();
    L(1, j) = g(0).imag();
    L(2, j) = g(1).real();
    L(3, j) = g(1).imag();
  }
  return L;
}

inline Eigen::Vector4d lattice_coords(const Eigen::Matrix4d& L,
                                      const AbelVector& u) {
  Eigen::Vector4d rhs;
  rhs << u(0).real(), u(0).imag(), u(1).real(), u(1).imag();
  return L.partialPivLu().solve(rhs);
}

inline std::pair<double, Eigen::Vector4d> lattice_dist(
    const Eigen::Matrix4d& L, const AbelVector& u) {
  const Eigen::Vector4d c = lattice_coords(L, u);
  const Eigen::Vector4d r = c - c.array().round().matrix();
  return {r.cwiseAbs().maxCoeff(), c};
}

inline PeriodData period_matrices(const CurveParams<double>& cp,
                                  const HomologyBasis& H,
                                  const Quadrature& q = {}) {
  const std::vector<FormFn> fns = {nu_fn(cp, 1), nu_fn(cp, 2), nuII_fn(cp, 1),
                                   nuII_fn(cp, 2)};
  // per chosen pool cycle: the four form integrals
  Eigen::Matrix<Complex, 4, 4> pool;  // [cycle, form]
  for (int k = 0; k < 4; ++k) {
    const Cycle& cyc = H.pool[static_cast<std::size_t>(H.chosen[static_cast<std::size_t>(k)])];
    auto [v, y4e] = integrate_path(cp, cyc.segments, cyc.y4_start, fns, q);
    if (std::abs(y4e - cyc.y4_start) >
        1e-6 * std::max(1.0, std::abs(cyc.y4_start)))
      throw StepCollapse("period_matrices: cycle lift did not close");
    for (int f = 0; f < 4; ++f) pool(k, f) = v(f);
  }
  // combine into basis cycles a1, a2, b1, b2
  Eigen::Matrix<Complex, 4, 4> per;  // [basis cycle, form]
  per.setZero();
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) {
      const long c = H.basis_coords[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      if (c) per.row(r) += static_cast<double>(c) * pool.row(k);
    }
  Eigen::Matrix2cd w1, w2, e1, e2;  // half periods
  w1 << per(0, 0), per(1, 0), per(0, 1), per(1, 1);
  w2 << per(2, 0), per(3, 0), per(2, 1), per(3, 1);
  e1 << per(0, 2), per(1, 2), per(0, 3), per(1, 3);
  e2 << per(2, 2), per(3, 2), per(2, 3), per(3, 3);
  w1 *= 0.5;
  w2 *= 0.5;
  e1 *= -0.5;
  e2 *= -0.5;
  PeriodData pd;
  pd.omega1 = 2.0 * w1;
  pd.omega2 = 2.0 * w2;
  pd.eta1 = 2.0 * e1;
  pd.eta2 = 2.0 * e2;
  pd.tau = w1.partialPivLu().solve(w2);
  pd.gamma = w1.transpose().partialPivLu().solve(e1.transpose()).transpose();
  pd.lattice = make_lattice(pd.omega1, pd.omega2);
  return pd;
}

inline PeriodData period_matrices(const CurveParams<double>& cp,
                                  const Quadrature& q = {}) {
  const HomologyBasis H = build_homology(cp);
  return period_matrices(cp, H, q);
}

// defect of M J M^T = 2 pi i J for M = [[omega1, omega2], [eta1, eta2]]
inline double legendre_residual(const PeriodData& pd) {
  Eigen::Matrix4cd M, J;
  M << pd.omega1, pd.omega2, pd.eta1, pd.eta2;
  J.setZero();
  J.block<2, 2>(0, 2) = -Eigen::Matrix2cd::Identity();
  J.block<2, 2>(2, 0) = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix4cd R =
      M * J * M.transpose() - Complex(0, 2 * pi) * J;
  return R.cwiseAbs().maxCoeff();
}

inline double tau_symmetry_residual(const PeriodData& pd) {
  return (pd.tau - pd.tau.transpose()).cwiseAbs().maxCoeff();
}

// smallest eigenvalue of Im tau (symmetrized); positive on a correct basis
inline double tau_im_min_eig(const PeriodData& pd) {
  const Eigen::Matrix2d Y =
      0.5 * (pd.tau.imag() + pd.tau.imag().transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Y);
  return es.eigenvalues().minCoeff();
}

}  // namespace sigma345
