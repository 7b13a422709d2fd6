#pragma once

// Paths in the x-plane, analytic continuation of the sheet data along them,
// and adaptive Gauss-Legendre quadrature of form coefficients. Continuation
// tracks y4 with an Euler predictor and snaps to the nearest of the three
// cube roots; a step is trusted only while the predictor stays well inside
// the root's basin (the roots are separated by |y4| sqrt(3), so a quarter of
// that is a comfortable margin).

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sigma345/curve.hpp"
#include "sigma345/errors.hpp"

namespace sigma345 {

struct PathPiece {
  enum class Kind { line, arc };
  Kind kind;
  Complex a, b;        // line endpoints
  Complex c;           // arc center
  double r = 0, th0 = 0, th1 = 0;

  static PathPiece line(Complex a, Complex b) {
    PathPiece p;
    p.kind = Kind::line;
    p.a = a;
    p.b = b;
    return p;
  }
  static PathPiece arc(Complex c, double r, double th0, double th1) {
    PathPiece p;
    p.kind = Kind::arc;
    p.c = c;
    p.r = r;
    p.th0 = th0;
    p.th1 = th1;
    return p;
  }

  Complex z(double u) const {
    if (kind == Kind::line) return a + (b - a) * u;
    return c + r * std::polar(1.0, th0 + (th1 - th0) * u);
  }
  Complex dz(double u) const {
    if (kind == Kind::line) return b - a;
    return Complex(0, r * (th1 - th0)) *
           std::polar(1.0, th0 + (th1 - th0) * u);
  }
  PathPiece reversed() const {
    if (kind == Kind::line) return line(b, a);
    return arc(c, r, th1, th0);
  }
};

inline std::vector<PathPiece> reversed_path(const std::vector<PathPiece>& ps) {
  std::vector<PathPiece> out;
  out.reserve(ps.size());
  for (auto it = ps.rbegin(); it != ps.rend(); ++it)
    out.push_back(it->reversed());
  return out;
}

// A -> B built from two paths that share their far endpoint.
inline std::vector<PathPiece> composite_path(const std::vector<PathPiece>& pa,
                                             const std::vector<PathPiece>& pb) {
  std::vector<PathPiece> out = reversed_path(pa);
  out.insert(out.end(), pb.begin(), pb.end());
  return out;
}

// index k minimizing |r zeta3^k - target|, first index on ties
inline int nearest_root_index(Complex r, Complex target) {
  int best = 0;
  double bd = std::abs(r - target);
  for (int k = 1; k < 3; ++k) {
    const double d = std::abs(r * zeta3<double>(k) - target);
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  return best;
}

// nearest lift above x to a y4 guess
inline SurfacePoint<double> lift_near(const CurveParams<double>& cp, Complex x,
                                      Complex y4_guess) {
  const Complex r = cbrt_principal(cp.k4(x));
  const Complex y4 = r * zeta3<double>(nearest_root_index(r, y4_guess));
  return make_point(cp, x, y4, cp.y5_from_y4(x, y4));
}

// Gauss-Legendre nodes and weights mapped to [0,1]
struct GLRule {
  std::vector<double> u, w;
};

inline GLRule gauss_legendre(int n) {
  GLRule g;
  g.u.resize(static_cast<std::size_t>(n));
  g.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    // nodes come out descending in i; store ascending
    const std::size_t k = static_cast<std::size_t>(n - 1 - i);
    g.u[k] = 0.5 * (t + 1.0);
    g.w[k] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return g;
}

inline const GLRule& gl20() {
  static const GLRule g = gauss_legendre(20);
  return g;
}
inline const GLRule& gl40() {
  static const GLRule g = gauss_legendre(40);
  return g;
}

// quadrature settings threaded through every integral in the pipeline
struct Quadrature {
  double tol = 1e-13;
  int max_depth = 14;            // bisection cap for path panels
  const GLRule* rule = nullptr;  // base rule; nullptr means 20 nodes
  const GLRule& gl() const { return rule ? *rule : gl20(); }
};

// adaptive GL for an analytic scalar integrand on a real interval
template <typename F>
Complex gl_adaptive(F&& f, double a, double b, const Quadrature& q = {},
                    int depth = 0) {
  const GLRule& gl = q.gl();
  auto panel = [&](double lo, double hi) {
    Complex s = 0;
    for (std::size_t k = 0; k < gl.u.size(); ++k)
      s += gl.w[k] * f(lo + (hi - lo) * gl.u[k]);
    return s * (hi - lo);
  };
  const Complex whole = panel(a, b);
  const double m = 0.5 * (a + b);
  const Complex better = panel(a, m) + panel(m, b);
  if (std::abs(whole - better) <=
          q.tol * std::max(1e-30, std::abs(better)) + 1e-18 ||
      depth > q.max_depth - 1)
    return better;
  return gl_adaptive(f, a, m, q, depth + 1) +
         gl_adaptive(f, m, b, q, depth + 1);
}

// track y4 along a piece from u=0 to u=1, refining by midpoint insertion
// whenever the predictor lands outside a quarter of the root separation
inline Complex continue_y4(const CurveParams<double>& cp, const PathPiece& pc,
                           Complex y4_start, int nsub = 64) {
  std::vector<double> us(static_cast<std::size_t>(nsub) + 1);
  for (int i = 0; i <= nsub; ++i)
    us[static_cast<std::size_t>(i)] = static_cast<double>(i) / nsub;
  Complex y4 = y4_start;
  double u_prev = 0.0;
  std::size_t i = 1;
  const double margin = 0.25 * std::sqrt(3.0);
  while (i < us.size()) {
    const double u = us[i];
    const Complex x0 = pc.z(u_prev), x1 = pc.z(u);
    const Complex pred = y4 + cp.dy4_dx(x0, y4) * (x1 - x0);
    const Complex r = cbrt_principal(cp.k4(x1));
    const Complex cand = r * zeta3<double>(nearest_root_index(r, pred));
    if (std::abs(cand - pred) > margin * std::abs(cand) + 1e-300) {
      us.insert(us.begin() + static_cast<std::ptrdiff_t>(i),
                0.5 * (u_prev + u));
      continue;
    }
    y4 = cand;
    u_prev = u;
    ++i;
  }
  return y4;
}

using FormFn = std::function<Complex(const SurfacePoint<double>&)>;

namespace detail {

// one GL panel over [u0,u1]; continuation rides the quadrature nodes
inline std::pair<Eigen::VectorXcd, Complex> quad_panel(
    const CurveParams<double>& cp, const PathPiece& pc, double u0, double u1,
    Complex y4_at_u0, const std::vector<FormFn>& forms, const GLRule& gl) {
  Eigen::VectorXcd vals =
      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(forms.size()));
  Complex y4 = y4_at_u0;
  Complex xprev = pc.z(u0);
  for (std::size_t k = 0; k < gl.u.size(); ++k) {
    const double u = u0 + (u1 - u0) * gl.u[k];
    const Complex x = pc.z(u);
    const Complex pred = y4 + cp.dy4_dx(xprev, y4) * (x - xprev);
    const Complex r = cbrt_principal(cp.k4(x));
    y4 = r * zeta3<double>(nearest_root_index(r, pred));
    xprev = x;
    const SurfacePoint<double> pt{x, y4, cp.y5_from_y4(x, y4), 0.0};
    const Complex dz = pc.dz(u) * (u1 - u0);
    for (std::size_t idx = 0; idx < forms.size(); ++idx)
      vals(static_cast<Eigen::Index>(idx)) += gl.w[k] * forms[idx](pt) * dz;
  }
  const Complex xe = pc.z(u1);
  const Complex pred = y4 + cp.dy4_dx(xprev, y4) * (xe - xprev);
  const Complex r = cbrt_principal(cp.k4(xe));
  const Complex y4e = r * zeta3<double>(nearest_root_index(r, pred));
  return {vals, y4e};
}

inline std::pair<Eigen::VectorXcd, Complex> quad_rec(
    const CurveParams<double>& cp, const PathPiece& pc, double u0, double u1,
    Complex y4_0, const std::vector<FormFn>& forms, const Quadrature& q,
    int depth) {
  const GLRule& gl = q.gl();
  const auto [whole, y4w] = quad_panel(cp, pc, u0, u1, y4_0, forms, gl);
  (void)y4w;
  const double um = 0.5 * (u0 + u1);
  const auto [left, y4m] = quad_panel(cp, pc, u0, um, y4_0, forms, gl);
  const auto [right, y4e] = quad_panel(cp, pc, um, u1, y4m, forms, gl);
  const Eigen::VectorXcd better = left + right;
  const double err = (whole - better).cwiseAbs().maxCoeff();
  const double scale = std::max(1e-30, better.cwiseAbs().maxCoeff());
  if (err <= q.tol * scale + 1e-16 || depth > q.max_depth)
    return {better, y4e};
  const auto [lv, y4m2] =
      quad_rec(cp, pc, u0, um, y4_0, forms, q, depth + 1);
  const auto [rv, y4e2] =
      quad_rec(cp, pc, um, u1, y4m2, forms, q, depth + 1);
  return {lv + rv, y4e2};
}

}  // namespace detail

// integrate every form coefficient against dx along the lifted piece;
// returns the vector of integrals and y4 at the end of the piece
inline std::pair<Eigen::VectorXcd, Complex> integrate_piece(
    const CurveParams<double>& cp, const PathPiece& pc, Complex y4_start,
    const std::vector<FormFn>& forms, const Quadrature& q = {}) {
  return detail::quad_rec(cp, pc, 0.0, 1.0, y4_start, forms, q, 0);
}

inline std::pair<Eigen::VectorXcd, Complex> integrate_path(
    const CurveParams<double>& cp, const std::vector<PathPiece>& pieces,
    Complex y4_start, const std::vector<FormFn>& forms,
    const Quadrature& q = {}) {
  Eigen::VectorXcd total =
      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(forms.size()));
  Complex y4 = y4_start;
  for (const auto& pc : pieces) {
    auto [v, y4e] = integrate_piece(cp, pc, y4, forms, q);
    total += v;
    y4 = y4e;
  }
  return {total, y4};
}

// sample the pieces into a closed-ish polyline for intersection counting
inline std::vector<Complex> polyline_of(const std::vector<PathPiece>& pieces,
                                        int pts_per_piece = 160) {
  std::vector<Complex> zs;
  for (const auto& pc : pieces) {
    const int n = pc.kind == PathPiece::Kind::arc
                      ? pts_per_piece
                      : std::max(24, pts_per_piece / 3);
    for (int i = 0; i < n; ++i)
      zs.push_back(pc.z(static_cast<double>(i) / n));
  }
  zs.push_back(pieces.back().z(1.0));
  return zs;
}

// canonical sheet index and y4 value at every polyline vertex
inline std::pair<std::vector<int>, std::vector<Complex>> sheets_along(
    const CurveParams<double>& cp, const std::vector<Complex>& zs,
    Complex y4_start) {
  std::vector<int> sheets;
  std::vector<Complex> y4s;
  sheets.reserve(zs.size());
  y4s.reserve(zs.size());
  Complex y4 = y4_start;
  const double margin = 0.3 * std::sqrt(3.0);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (i > 0) {
      const Complex x0 = zs[i - 1], x1 = zs[i];
      const Complex pred = y4 + cp.dy4_dx(x0, y4) * (x1 - x0);
      const Complex r = cbrt_principal(cp.k4(x1));
      int j = nearest_root_index(r, pred);
      if (std::abs(r * zeta3<double>(j) - pred) >
          margin * std::abs(r * zeta3<double>(j))) {
        // coarse vertex spacing; redo this edge in 8 substeps
        const int m = 8;
        Complex yy = y4;
        for (int k = 1; k <= m; ++k) {
          const Complex xa = x0 + (x1 - x0) * (static_cast<double>(k - 1) / m);
          const Complex xm = x0 + (x1 - x0) * (static_cast<double>(k) / m);
          const Complex pr = yy + cp.dy4_dx(xa, yy) * (x1 - x0) / double(m);
          const Complex rr = cbrt_principal(cp.k4(xm));
          yy = rr * zeta3<double>(nearest_root_index(rr, pr));
        }
        j = nearest_root_index(r, yy);
      }
      y4 = r * zeta3<double>(j);
    }
    const Complex r = cbrt_principal(cp.k4(zs[i]));
    sheets.push_back(nearest_root_index(r, y4));
    y4s.push_back(y4);
  }
  return {sheets, y4s};
}

// canonical sheet at zp reached from (z_from, y4_from) in one predictor step
inline int local_sheet(const CurveParams<double>& cp, Complex z_from,
                       Complex y4_from, Complex zp) {
  const Complex pred = y4_from + cp.dy4_dx(z_from, y4_from) * (zp - z_from);
  const Complex r = cbrt_principal(cp.k4(zp));
  return nearest_root_index(r, pred);
}

// polyline z0 -> z1 detouring around branch values by the given clearance
inline std::vector<Complex> path_avoid(const CurveParams<double>& cp,
                                       Complex z0, Complex z1,
                                       double clearance) {
  std::vector<Complex> pts{z0, z1};
  bool changed = true;
  int guard = 0;
  while (changed && guard < 12) {
    changed = false;
    ++guard;
    std::vector<Complex> out{pts.front()};
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const Complex a = pts[k], b = pts[k + 1];
      const Complex d = b - a;
      const double L = std::abs(d);
      if (L < 1e-15) {
        out.push_back(b);
        continue;
      }
      const Complex dh = d / L;
      bool have_worst = false;
      double wdist = 0, wt = 0;
      Complex wm;
      for (auto m : cp.branch_values()) {
        const double t = ((m - a) / dh).real();
        if (t > 0.02 * L && t < 0.98 * L) {
          const double dist = std::abs(a + t * dh - m);
          if (dist < clearance * 0.999 && (!have_worst || dist < wdist)) {
            have_worst = true;
            wdist = dist;
            wm = m;
            wt = t;
          }
        }
      }
      if (have_worst) {
        const Complex foot = a + wt * dh;
        Complex n = foot - wm;
        n = std::abs(n) > 1e-12 ? n / std::abs(n) : Complex(0, 1) * dh;
        out.push_back(wm + n * clearance * 1.25);
        changed = true;
      }
      out.push_back(b);
    }
    pts = std::move(out);
  }
  return pts;
}

inline std::vector<PathPiece> lines_through(const std::vector<Complex>& pts) {
  std::vector<PathPiece> out;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    out.push_back(PathPiece::line(pts[k], pts[k + 1]));
  return out;
}

// Public stepping interface: carry a known lift along x-plane waypoints.
struct StepControl {
  double initial_step = 1.0 / 64;
  double tolerance = 0.25 * std::sqrt(3.0);  // predictor basin fraction
  int max_halvings = 30;
};

struct SurfacePath {
  std::vector<Complex> waypoints;
  SurfacePoint<double> start;
  StepControl step_control;
};

inline SurfacePoint<double> continue_along_path(const CurveParams<double>& cp,
                                                const SurfacePath& path) {
  Complex a = path.start.x;
  Complex y4 = path.start.y4;
  const StepControl& sc = path.step_control;
  for (Complex b : path.waypoints) {
    for (auto m : cp.branch_values()) {
      // distance from the branch value to segment [a,b]
      const Complex d = b - a;
      const double L2 = std::norm(d);
      double t = L2 > 0 ? ((m - a) * std::conj(d)).real() / L2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      if (std::abs(a + t * d - m) < cp.min_separation / 2)
        throw BranchPointProximity(
            "continue_along_path: segment passes a branch value");
    }
    double u = 0.0, du = sc.initial_step;
    int halvings = 0;
    while (u < 1.0 - 1e-15) {
      const double unext = std::min(1.0, u + du);
      const Complex x0 = a + (b - a) * u, x1 = a + (b - a) * unext;
      const Complex pred = y4 + cp.dy4_dx(x0, y4) * (x1 - x0);
      const Complex r = cbrt_principal(cp.k4(x1));
      const Complex cand = r * zeta3<double>(nearest_root_index(r, pred));
      if (std::abs(cand - pred) > sc.tolerance * std::abs(cand) + 1e-300) {
        du *= 0.5;
        if (++halvings > sc.max_halvings)
          throw StepCollapse("continue_along_path: step underflow");
        continue;
      }
      y4 = cand;
      u = unext;
    }
    a = b;
  }
  return make_point(cp, a, y4, cp.y5_from_y4(a, y4));
}

}  // namespace sigma345
