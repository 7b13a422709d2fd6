#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"
#include "sigma345/forms.hpp"
#include "sigma345/homology.hpp"
#include "sigma345/paths.hpp"
#include "sigma345/periods.hpp"

using namespace sigma345;

namespace {

const CurveParams<double>& std_curve() {
  static const CurveParams<double> cp = CurveParams<double>::standard();
  return cp;
}

const HomologyBasis& std_homology() {
  static const HomologyBasis H = build_homology(std_curve());
  return H;
}

const PeriodData& std_periods() {
  static const PeriodData pd =
      period_matrices(std_curve(), std_homology(), Quadrature{1e-13, 14});
  return pd;
}

Eigen::Matrix2cd mat2(Complex a, Complex b, Complex c, Complex d) {
  Eigen::Matrix2cd m;
  m << a, b, c, d;
  return m;
}

double mdiff(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("winding words map to the expected monodromy exponents") {
  CHECK(word_exponent({{0, 1}, {1, 1}}) == 0);
  CHECK(word_exponent({{1, 1}}) == 1);
  CHECK(word_exponent({{0, 1}}) == 2);
  CHECK(word_exponent({{1, 1}, {2, -1}}) == 0);
  CHECK(word_exponent({{0, 2}}) == 1);
  CHECK(word_exponent({{0, -1}, {2, -1}}) == 0);
}

TEST_CASE("pfaffian of small antisymmetric matrices") {
  std::vector<std::vector<long>> J = {
      {0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
  CHECK(pfaffian4(J) == 1);
  std::vector<std::vector<long>> M = {
      {0, 2, 1, 0}, {-2, 0, 0, 3}, {-1, 0, 0, 1}, {0, -3, -1, 0}};
  CHECK(pfaffian4(M) == -1);
}

TEST_CASE("symplectic reduction produces a congruent normal form") {
  std::vector<std::vector<long>> M = {
      {0, 2, 1, 0}, {-2, 0, 0, 3}, {-1, 0, 0, 1}, {0, -3, -1, 0}};
  auto [N, U] = symplectic_reduce(M);

  // N must equal U^T M U entrywise
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      long s = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          s += U[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
               M[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
               U[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
      CHECK(s == N[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }

  // unimodular pairing: both hyperbolic blocks have pivot 1
  CHECK(N[0][1] == 1);
  CHECK(N[1][0] == -1);
  CHECK(N[2][3] == 1);
  CHECK(N[3][2] == -1);
  CHECK(N[0][2] == 0);
  CHECK(N[0][3] == 0);
  CHECK(N[1][2] == 0);
  CHECK(N[1][3] == 0);
  for (int i = 0; i < 4; ++i) CHECK(N[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] == 0);
}

TEST_CASE("homology basis of the standard curve") {
  const auto& cp = std_curve();
  const auto& H = std_homology();

  REQUIRE(H.pool.size() == 6);
  const std::vector<std::string> want = {"w01s0", "w01s1", "w02s0",
                                         "w02s1", "w12s0", "w12s1"};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(H.names[i] == want[i]);

  CHECK(H.chosen == std::array<int, 4>{0, 1, 2, 3});

  const long want_coords[4][4] = {
      {1, 0, 0, 0}, {1, 1, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, -1}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(H.basis_coords[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] ==
            want_coords[r][c]);

  // Gram matrix is antisymmetric with zero diagonal
  const std::size_t n = H.gram.size();
  REQUIRE(n == 6);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(H.gram[i][i] == 0);
    for (std::size_t j = 0; j < n; ++j) CHECK(H.gram[i][j] == -H.gram[j][i]);
  }

  // the chosen sub-Gram pairs unimodularly
  std::vector<std::vector<long>> sub(4, std::vector<long>(4, 0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      sub[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          H.gram[static_cast<std::size_t>(H.chosen[static_cast<std::size_t>(i)])]
                [static_cast<std::size_t>(H.chosen[static_cast<std::size_t>(j)])];
  CHECK(std::labs(pfaffian4(sub)) == 1);
  CHECK(pfaffian4(sub) == -1);

  // one crossing count recomputes to the stored Gram entry
  CHECK(intersection_number(cp, H.pool[0], H.pool[1]) == H.gram[0][1]);
}

TEST_CASE("period matrices of the standard curve match pinned values") {
  const auto& pd = std_periods();

  const Complex I(0, 1);
  const Eigen::Matrix2cd w1 =
      mat2(0.7649770185285962 * I, Complex(-0.6624895313570431, 0.3824885092642981),
           0.9638106483299991 * I, Complex(0.8346845058917289, 0.4819053241649997));
  const Eigen::Matrix2cd w2 =
      mat2(Complex(-0.6624895313570444, 0.3824885092642982), -0.7649770185285966 * I,
           Complex(-0.8346845058917292, -0.4819053241649999), 0.9638106483299991 * I);
  const Eigen::Matrix2cd e1 =
      mat2(0.5927626975392639 * I, Complex(0.5133475544847939, 0.296381348769632),
           0.4704760648206676 * I, Complex(-0.4074442240072321, 0.2352380324103334));
  const Eigen::Matrix2cd e2 =
      mat2(Complex(0.5133475544847943, 0.2963813487696321), -0.5927626975392641 * I,
           Complex(0.4074442240072329, -0.2352380324103339), 0.4704760648206677 * I);

  CHECK(mdiff(0.5 * pd.omega1, w1) < 2e-9);
  CHECK(mdiff(0.5 * pd.omega2, w2) < 2e-9);
  CHECK(mdiff(0.5 * pd.eta1, e1) < 2e-9);
  CHECK(mdiff(0.5 * pd.eta2, e2) < 2e-9);

  const double s = 1.0 / std::sqrt(3.0);
  const Eigen::Matrix2cd tau_want =
      mat2(2.0 * s * I, -s * I, -s * I, 2.0 * s * I);
  CHECK(mdiff(pd.tau, tau_want) < 1e-9);

  const Eigen::Matrix2cd gamma_want = mat2(0.0, 0.6150198678198333,
                                           0.6150198678198335, 0.0);
  CHECK(mdiff(pd.gamma, gamma_want) < 1e-9);
}

TEST_CASE("period matrix invariants") {
  const auto& pd = std_periods();
  CHECK(legendre_residual(pd) < 1e-8);
  CHECK(tau_symmetry_residual(pd) < 1e-9);
  CHECK(tau_im_min_eig(pd) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("lattice coordinates and distances") {
  const auto& pd = std_periods();
  const Eigen::Matrix4d L = pd.lattice;

  // column layout: generator j stacked as (Re u1, Im u1, Re u2, Im u2)
  CHECK(L(0, 2) == doctest::Approx(pd.omega2(0, 0).real()));
  CHECK(L(1, 2) == doctest::Approx(pd.omega2(0, 0).imag()));
  CHECK(L(2, 2) == doctest::Approx(pd.omega2(1, 0).real()));
  CHECK(L(3, 2) == doctest::Approx(pd.omega2(1, 0).imag()));
  CHECK((make_lattice(pd.omega1, pd.omega2) - L).cwiseAbs().maxCoeff() == 0.0);

  const AbelVector u = pd.omega1.col(0) + pd.omega2.col(1);
  const Eigen::Vector4d c = lattice_coords(L, u);
  CHECK(std::abs(c(0) - 1.0) < 1e-10);
  CHECK(std::abs(c(1)) < 1e-10);
  CHECK(std::abs(c(2)) < 1e-10);
  CHECK(std::abs(c(3) - 1.0) < 1e-10);

  auto [d0, c0] = lattice_dist(L, u);
  CHECK(d0 < 1e-10);

  const AbelVector v = u + 0.3 * pd.omega1.col(1);
  auto [d1, c1] = lattice_dist(L, v);
  CHECK(d1 == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(c1(1) == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("cycle integrals reproduce the matrix entries") {
  const auto& cp = std_curve();
  const auto& H = std_homology();
  const auto& pd = std_periods();
  const Quadrature q{1e-13, 14};

  // a1 is exactly the first pool cycle, so its nu_1 integral is omega1(0,0)
  const Cycle& a1 = H.pool[static_cast<std::size_t>(H.chosen[0])];
  const Complex p = cycle_integral(cp, nu_fn(cp, 1), a1, q);
  CHECK(std::abs(p - pd.omega1(0, 0)) < 1e-10);

  // second-kind rows carry the opposite sign
  const Complex r = cycle_integral(cp, nuII_fn(cp, 1), a1, q);
  CHECK(std::abs(r + pd.eta1(0, 0)) < 1e-10);
}

TEST_CASE("cycle integral rejects a geometrically broken loop") {
  const auto& cp = std_curve();
  const auto& H = std_homology();
  Cycle broken = H.pool[0];
  REQUIRE(broken.segments.size() > 2);
  broken.segments.pop_back();
  CHECK_THROWS_AS(cycle_integral(cp, nu_fn(cp, 1), broken, Quadrature{1e-10, 10}),
                  StepCollapse);
}
