#pragma once

// Gap geometries: the two boundary profiles facing each other across a thin
// aperture, the minimal gap h and the patch radius L over which the
// lubrication model is posed.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lubrigap/error.hpp"

namespace lubrigap {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Symmetric 2x2 matrix (Hessians of scalar profiles).
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double trace() const { return xx + yy; }
  double frobenius() const { return std::sqrt(xx * xx + 2.0 * xy * xy + yy * yy); }
  double min_eigenvalue() const {
    const double m = 0.5 * (xx + yy);
    const double d = std::hypot(0.5 * (xx - yy), xy);
    return m - d;
  }
  double max_eigenvalue() const {
    const double m = 0.5 * (xx + yy);
    const double d = std::hypot(0.5 * (xx - yy), xy);
    return m + d;
  }
};

inline Sym2 operator-(const Sym2& a, const Sym2& b) {
  return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
}

/// A boundary profile z = value(x, y). Derivatives are optional; when absent
/// they are replaced by centred finite differences.
struct Profile {
  std::function<double(double, double)> value;
  std::function<Vec2(double, double)> gradient;
  std::function<Sym2(double, double)> hessian;
};

/// Profile depending on u = x^2 + y^2 only, given P(u), P'(u), P''(u).
inline Profile radial_profile(std::function<std::array<double, 3>(double)> p) {
  Profile prof;
  prof.value = [p](double x, double y) { return p(x * x + y * y)[0]; };
  prof.gradient = [p](double x, double y) {
    const double d1 = p(x * x + y * y)[1];
    return Vec2{2.0 * x * d1, 2.0 * y * d1};
  };
  prof.hessian = [p](double x, double y) {
    const auto v = p(x * x + y * y);
    return Sym2{4.0 * x * x * v[2] + 2.0 * v[1], 4.0 * x * y * v[2], 4.0 * y * y * v[2] + 2.0 * v[1]};
  };
  return prof;
}

enum class GeometryKind { general, sphere_sphere, radial };

inline std::string to_string(GeometryKind k) {
  switch (k) {
    case GeometryKind::general: return "general";
    case GeometryKind::sphere_sphere: return "sphere";
    case GeometryKind::radial: return "radial_poly";
  }
  return "general";
}

struct GapSample {
  double top = 0.0;     // gamma_t
  double bottom = 0.0;  // gamma_b
  double gap = 0.0;     // gamma = h + gamma_t - gamma_b
};

/// Aperture between the bottom surface z = gamma_b(x,y) and the top surface
/// z = h + gamma_t(x,y), over the disk of radius L. Immutable.
class GapGeometry {
 public:
  GapGeometry(Profile top, Profile bottom, double h, double L,
              GeometryKind kind = GeometryKind::general)
      : top_(std::move(top)), bottom_(std::move(bottom)), h_(h), L_(L), kind_(kind) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw Error(ErrorCode::invalid_geometry, "gap width h must be positive and finite");
    }
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw Error(ErrorCode::invalid_geometry, "patch radius L must be positive and finite");
    }
    if (!top_.value || !bottom_.value) {
      throw Error(ErrorCode::invalid_geometry, "both profiles need a value function");
    }
  }

  double h() const { return h_; }
  double L() const { return L_; }
  GeometryKind kind() const { return kind_; }
  bool is_radial() const { return kind_ != GeometryKind::general; }

  /// Same profiles with a different minimal gap.
  GapGeometry with_gap(double h) const {
    return GapGeometry(top_, bottom_, h, L_, kind_);
  }

  GapSample eval(double x, double y) const {
    if (x * x + y * y > L_ * L_ * (1.0 + 1e-12)) {
      throw Error(ErrorCode::out_of_domain,
                  "point (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") lies outside the disk of radius " + std::to_string(L_));
    }
    return eval_unchecked(x, y);
  }

  GapSample eval_unchecked(double x, double y) const {
    GapSample s;
    s.top = top_.value(x, y);
    s.bottom = bottom_.value(x, y);
    s.gap = h_ + s.top - s.bottom;
    return s;
  }

  double gap(double x, double y) const {
    return h_ + top_.value(x, y) - bottom_.value(x, y);
  }
  double top(double x, double y) const { return top_.value(x, y); }
  double bottom(double x, double y) const { return bottom_.value(x, y); }

  Vec2 grad_top(double x, double y) const { return gradient_of(top_, x, y); }
  Vec2 grad_bottom(double x, double y) const { return gradient_of(bottom_, x, y); }
  Sym2 hess_top(double x, double y) const { return hessian_of(top_, x, y); }
  Sym2 hess_bottom(double x, double y) const { return hessian_of(bottom_, x, y); }

  bool has_analytic_derivatives() const {
    return top_.gradient && top_.hessian && bottom_.gradient && bottom_.hessian;
  }

  /// Finite-difference step for first derivatives of the profiles.
  double fd_step() const {
    return std::max(1e-6 * L_, std::sqrt(std::numeric_limits<double>::epsilon()) * L_);
  }

 private:
  Vec2 gradient_of(const Profile& p, double x, double y) const {
    if (p.gradient) return p.gradient(x, y);
    const double d = fd_step();
    return {(p.value(x + d, y) - p.value(x - d, y)) / (2.0 * d),
            (p.value(x, y + d) - p.value(x, y - d)) / (2.0 * d)};
  }

  Sym2 hessian_of(const Profile& p, double x, double y) const {
    if (p.hessian) return p.hessian(x, y);
    if (p.gradient) {
      const double d = fd_step();
      const Vec2 gxp = p.gradient(x + d, y), gxm = p.gradient(x - d, y);
      const Vec2 gyp = p.gradient(x, y + d), gym = p.gradient(x, y - d);
      return {(gxp.x - gxm.x) / (2.0 * d),
              0.25 * ((gxp.y - gxm.y) + (gyp.x - gym.x)) / d,
              (gyp.y - gym.y) / (2.0 * d)};
    }
    // Second differences of values need a larger step than fd_step() to keep
    // the round-off below the truncation error.
    const double d = 1e-4 * L_;
    const double f0 = p.value(x, y);
    const double fxx = (p.value(x + d, y) - 2.0 * f0 + p.value(x - d, y)) / (d * d);
    const double fyy = (p.value(x, y + d) - 2.0 * f0 + p.value(x, y - d)) / (d * d);
    const double fxy = (p.value(x + d, y + d) - p.value(x + d, y - d) -
                        p.value(x - d, y + d) + p.value(x - d, y - d)) /
                       (4.0 * d * d);
    return {fxx, fxy, fyy};
  }

  Profile top_;
  Profile bottom_;
  double h_;
  double L_;
  GeometryKind kind_;
};

/// Two spheres: the container of radius R below (its surface is the bottom
/// profile) and the body of radius S above, closest at the origin.
struct SphereGap {
  double R = 0.0;
  double S = 0.0;
  double h = 0.0;
  double L = 0.0;
  double R1 = 0.0;  // 1/R1 = 1/S + 1/R
  double R3 = 0.0;  // 1/R3^3 = 1/S^3 + 1/R^3

  GapGeometry geometry() const {
    const double s = S, r = R;
    // S - sqrt(S^2 - u) written without cancellation near u = 0.
    Profile top = radial_profile([s](double u) -> std::array<double, 3> {
      const double q = std::sqrt(s * s - u);
      return {u / (s + q), 0.5 / q, 0.25 / (q * q * q)};
    });
    Profile bottom = radial_profile([r](double u) -> std::array<double, 3> {
      const double q = std::sqrt(r * r - u);
      return {-u / (r + q), -0.5 / q, -0.25 / (q * q * q)};
    });
    return GapGeometry(std::move(top), std::move(bottom), h, L, GeometryKind::sphere_sphere);
  }

  SphereGap with_gap(double new_h) const {
    SphereGap g = *this;
    if (!(new_h > 0.0) || !std::isfinite(new_h)) {
      throw Error(ErrorCode::invalid_geometry, "gap width h must be positive and finite");
    }
    g.h = new_h;
    return g;
  }
};

inline SphereGap make_sphere_gap(double R, double S, double h, double L) {
  for (auto [name, v] : {std::pair{"R", R}, std::pair{"S", S}, std::pair{"h", h}, std::pair{"L", L}}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::invalid_geometry,
                  std::string(name) + " must be positive and finite (got " + std::to_string(v) + ")");
    }
  }
  if (L >= std::min(R, S)) {
    throw Error(ErrorCode::profile_domain, "patch radius L must be smaller than min(R, S)");
  }
  SphereGap g;
  g.R = R;
  g.S = S;
  g.h = h;
  g.L = L;
  g.R1 = 1.0 / (1.0 / S + 1.0 / R);
  g.R3 = std::cbrt(1.0 / (1.0 / (S * S * S) + 1.0 / (R * R * R)));
  return g;
}

/// Profiles given as polynomials in u = r^2: gamma(r) = sum_k c_k u^k.
inline Profile radial_poly_profile(std::vector<double> coeffs) {
  return radial_profile([c = std::move(coeffs)](double u) -> std::array<double, 3> {
    double p = 0.0, d1 = 0.0, d2 = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
      d2 = d2 * u + 2.0 * d1;
      d1 = d1 * u + p;
      p = p * u + c[k];
    }
    return {p, d1, d2};
  });
}

inline GapGeometry make_radial_poly_gap(std::vector<double> coeffs_t, std::vector<double> coeffs_b,
                                        double h, double L) {
  return GapGeometry(radial_poly_profile(std::move(coeffs_t)), radial_poly_profile(std::move(coeffs_b)),
                     h, L, GeometryKind::radial);
}

/// Evaluate the profiles and the gap at (x, y); throws out_of_domain outside the disk.
inline GapSample eval_gap(const GapGeometry& geom, double x, double y) { return geom.eval(x, y); }

struct LubPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Anisotropic rescaling of the aperture: horizontal lengths by sqrt(h),
/// vertical by h.
inline LubPoint to_lub_coordinates(double x, double y, double z, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_parameter, "h must be positive");
  const double s = std::sqrt(h);
  return {x / s, y / s, z / h};
}

inline LubPoint from_lub_coordinates(double xt, double yt, double zt, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_parameter, "h must be positive");
  const double s = std::sqrt(h);
  return {xt * s, yt * s, zt * h};
}

}  // namespace lubrigap
