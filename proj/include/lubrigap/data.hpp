#pragma once

// Boundary data on the bottom surface: the normal velocity w* and the
// tangential velocity v*, plus their values and gradients at the contact
// point, which select the asymptotic regime.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lubrigap/error.hpp"
#include "lubrigap/geometry.hpp"

namespace lubrigap {

/// Jacobian of a planar vector field: xy = d v_x / d y.
struct Jac2 {
  double xx = 0.0;
  double xy = 0.0;
  double yx = 0.0;
  double yy = 0.0;

  double trace() const { return xx + yy; }
};

/// Polynomial in (x, y): sum of c * x^i * y^j.
class Poly2 {
 public:
  struct Term {
    int i = 0;
    int j = 0;
    double c = 0.0;
  };

  Poly2() = default;
  explicit Poly2(std::vector<Term> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (t.i < 0 || t.j < 0) throw Error(ErrorCode::config, "polynomial exponents must be non-negative");
    }
  }

  static Poly2 constant(double c) { return Poly2({{0, 0, c}}); }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.i + t.j);
    return d;
  }
  const std::vector<Term>& terms() const { return terms_; }

  double operator()(double x, double y) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.c * ipow(x, t.i) * ipow(y, t.j);
    return s;
  }
  double dx(double x, double y) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.i > 0) s += t.c * t.i * ipow(x, t.i - 1) * ipow(y, t.j);
    }
    return s;
  }
  double dy(double x, double y) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.j > 0) s += t.c * t.j * ipow(x, t.i) * ipow(y, t.j - 1);
    }
    return s;
  }

 private:
  static double ipow(double b, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
  }

  std::vector<Term> terms_;
};

struct BoundaryData {
  std::function<double(double, double)> w_star;
  std::function<Vec2(double, double)> v_star;
  std::function<Vec2(double, double)> grad_w_star;  // optional
  std::function<Jac2(double, double)> jac_v_star;   // optional
  double w0 = 0.0;
  Vec2 grad_w0;
  Vec2 v0;
  double fd_step = 1e-6;

  /// Fills w0, grad_w0, v0 from the functions.
  static BoundaryData make(std::function<double(double, double)> w,
                           std::function<Vec2(double, double)> v,
                           std::function<Vec2(double, double)> grad_w = {},
                           std::function<Jac2(double, double)> jac_v = {}) {
    BoundaryData d;
    d.w_star = std::move(w);
    d.v_star = std::move(v);
    d.grad_w_star = std::move(grad_w);
    d.jac_v_star = std::move(jac_v);
    d.w0 = d.w_star(0.0, 0.0);
    d.grad_w0 = d.grad_w(0.0, 0.0);
    d.v0 = d.v_star(0.0, 0.0);
    return d;
  }

  static BoundaryData from_polynomials(Poly2 w, Poly2 vx, Poly2 vy) {
    return make([w](double x, double y) { return w(x, y); },
                [vx, vy](double x, double y) { return Vec2{vx(x, y), vy(x, y)}; },
                [w](double x, double y) { return Vec2{w.dx(x, y), w.dy(x, y)}; },
                [vx, vy](double x, double y) {
                  return Jac2{vx.dx(x, y), vx.dy(x, y), vy.dx(x, y), vy.dy(x, y)};
                });
  }

  /// w* = w0, v* = 0.
  static BoundaryData normal_const(double w0 = 1.0) {
    return from_polynomials(Poly2::constant(w0), Poly2{}, Poly2{});
  }
  /// w* = fc x + fs y, v* = 0.
  static BoundaryData costheta(double fc = 1.0, double fs = 0.0) {
    return from_polynomials(Poly2({{1, 0, fc}, {0, 1, fs}}), Poly2{}, Poly2{});
  }
  /// w* = 0, v* = (vx, vy).
  static BoundaryData tangential_const(double vx = 1.0, double vy = 0.0) {
    return from_polynomials(Poly2{}, Poly2::constant(vx), Poly2::constant(vy));
  }
  /// w* = x^2 + y^2, v* = (x, y): data vanishing with its gradient at the origin.
  static BoundaryData favorable() {
    return from_polynomials(Poly2({{2, 0, 1.0}, {0, 2, 1.0}}), Poly2({{1, 0, 1.0}}), Poly2({{0, 1, 1.0}}));
  }

  Vec2 grad_w(double x, double y) const {
    if (grad_w_star) return grad_w_star(x, y);
    const double d = fd_step;
    return {(w_star(x + d, y) - w_star(x - d, y)) / (2 * d),
            (w_star(x, y + d) - w_star(x, y - d)) / (2 * d)};
  }

  Jac2 jac_v(double x, double y) const {
    if (jac_v_star) return jac_v_star(x, y);
    const double d = fd_step;
    const Vec2 xp = v_star(x + d, y), xm = v_star(x - d, y);
    const Vec2 yp = v_star(x, y + d), ym = v_star(x, y - d);
    return {(xp.x - xm.x) / (2 * d), (yp.x - ym.x) / (2 * d), (xp.y - xm.y) / (2 * d),
            (yp.y - ym.y) / (2 * d)};
  }

  double div_v(double x, double y) const { return jac_v(x, y).trace(); }

  /// The cached origin values agree with the functions.
  bool consistent(double tol = 1e-8) const {
    const Vec2 g = grad_w(0.0, 0.0);
    const Vec2 v = v_star(0.0, 0.0);
    return std::abs(w_star(0.0, 0.0) - w0) <= tol && norm(g - grad_w0) <= tol && norm(v - v0) <= tol;
  }
};

}  // namespace lubrigap
