#pragma once

// Aperture velocity field reconstructed from a Reynolds pressure:
//
//   v_par = (1/2)(z - a)(z - b) grad p + ((a - z) / gamma) u,
//   v_z   = int_z^a div_xy v_par(s) ds,
//
// with a = h + gamma_t, b = gamma_b, gamma = a - b, p = chi_L q (or q) and
// u = chi_L v*. The divergence of v_par is a quadratic d0 + d1 s + d2 s^2 in
// the vertical variable, so v_z and every z-integral are exact.

#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "lubrigap/data.hpp"
#include "lubrigap/error.hpp"
#include "lubrigap/geometry.hpp"
#include "lubrigap/grid.hpp"
#include "lubrigap/quadrature.hpp"
#include "lubrigap/reynolds.hpp"

namespace lubrigap {

/// C^2 smoothstep: 1 on [0, L/2], 0 beyond L.
inline double cutoff(double r, double L) {
  if (r <= 0.5 * L) return 1.0;
  if (r >= L) return 0.0;
  const double t = 2.0 * r / L - 1.0;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// d chi_L / dr.
inline double cutoff_derivative(double r, double L) {
  if (r <= 0.5 * L || r >= L) return 0.0;
  const double t = 2.0 * r / L - 1.0;
  return -(2.0 / L) * 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Rows are velocity components (x, y, z), columns derivatives (x, y, z).
using Mat3 = std::array<std::array<double, 3>, 3>;

enum class EnergyTerm { dz_par, horizontal, all };

struct EnergyBreakdown {
  double dz_par = 0.0;        // int |d_z v_par|^2
  double dz_poiseuille = 0.0;  // pressure-driven part of the above
  double dz_couette = 0.0;     // shear part of the above
  double dz_cross = 0.0;       // 2 int (Poiseuille . Couette); zero for exact z-integration
  double horizontal = 0.0;     // int |grad_xy v_par|^2 + |grad_xy v_z|^2 + |d_z v_z|^2
  double all = 0.0;            // int |grad v|^2 = dz_par + horizontal
};

class ApertureField {
 public:
  /// Everything the velocity needs above one horizontal point.
  struct Column {
    double a = 0.0, b = 0.0;
    Vec2 ga, gb;        // gradients of a and b
    Vec2 G;             // grad p
    Jac2 H;             // Hessian of p
    Vec2 u;             // chi_L v*
    Jac2 Ju;            // Jacobian of u
    std::array<double, 3> d{};  // div v_par = d0 + d1 z + d2 z^2
    std::array<Vec2, 3> gd{};   // gradients of d_k

    double gap() const { return a - b; }
  };

  ApertureField(const GapGeometry& geom, const PressureSolution& pressure, const BoundaryData& data,
                bool cutoff_active = true)
      : geom_(geom),
        data_(data),
        cutoff_active_(cutoff_active),
        grid_(pressure.pressure.grid),
        p_(grid_, "p"),
        gx_(grid_), gy_(grid_), hxx_(grid_), hxy_(grid_), hyx_(grid_), hyy_(grid_),
        d_{ScalarField(grid_), ScalarField(grid_), ScalarField(grid_)},
        gdx_{ScalarField(grid_), ScalarField(grid_), ScalarField(grid_)},
        gdy_{ScalarField(grid_), ScalarField(grid_), ScalarField(grid_)} {
    if (std::abs(grid_.L() - geom.L()) > 1e-12 * geom.L()) {
      throw Error(ErrorCode::invalid_parameter, "pressure grid radius differs from the geometry patch radius");
    }
    const int nr = grid_.n_r(), nt = grid_.n_theta();
    for (int i = 0; i < nr; ++i) {
      const double chi = cutoff_active_ ? cutoff(grid_.r(i), geom.L()) : 1.0;
      for (int j = 0; j < nt; ++j) p_(i, j) = chi * pressure.pressure(i, j);
    }
    GradientField g1 = cartesian_gradient(p_, nr, true);
    gx_ = std::move(g1.dx);
    gy_ = std::move(g1.dy);
    GradientField gxx = cartesian_gradient(gx_, g1.valid_rings);
    GradientField gyy = cartesian_gradient(gy_, g1.valid_rings);
    hxx_ = std::move(gxx.dx);
    hxy_ = std::move(gxx.dy);
    hyx_ = std::move(gyy.dx);
    hyy_ = std::move(gyy.dy);
    const int hv = gxx.valid_rings;
    for (int i = 0; i < hv; ++i) {
      for (int j = 0; j < nt; ++j) {
        Column c = local_column(i, j);
        compute_d(c);
        for (int k = 0; k < 3; ++k) d_[k](i, j) = c.d[k];
      }
    }
    for (int k = 0; k < 3; ++k) {
      GradientField gd = cartesian_gradient(d_[k], hv);
      gdx_[k] = std::move(gd.dx);
      gdy_[k] = std::move(gd.dy);
      valid_rings_ = gd.valid_rings;
    }
  }

  const GapGeometry& geometry() const { return geom_; }
  const PolarGrid& grid() const { return grid_; }
  const BoundaryData& data() const { return data_; }
  bool cutoff_active() const { return cutoff_active_; }
  /// Rings whose columns carry every derivative needed for the energy.
  int valid_rings() const { return valid_rings_; }
  const ScalarField& pressure() const { return p_; }

  /// Column data at cell centre (i, j); i < valid_rings().
  Column column(int i, int j) const {
    Column c = local_column(i, j);
    for (int k = 0; k < 3; ++k) {
      c.d[k] = d_[k](i, j);
      c.gd[k] = {gdx_[k](i, j), gdy_[k](i, j)};
    }
    return c;
  }

  /// Column data at an arbitrary point; grid fields are interpolated
  /// bilinearly in (r, theta), geometric and data terms are exact.
  Column column_at(double x, double y) const {
    Column c = analytic_column(x, y);
    c.G = {interpolate(gx_, x, y), interpolate(gy_, x, y)};
    c.H = {interpolate(hxx_, x, y), interpolate(hxy_, x, y), interpolate(hyx_, x, y), interpolate(hyy_, x, y)};
    for (int k = 0; k < 3; ++k) {
      c.d[k] = interpolate(d_[k], x, y);
      c.gd[k] = {interpolate(gdx_[k], x, y), interpolate(gdy_[k], x, y)};
    }
    return c;
  }

  static Vec3 velocity(const Column& c, double z) {
    const double P = 0.5 * (z - c.a) * (z - c.b);
    const double C = (c.a - z) / c.gap();
    Vec3 v;
    v.x = P * c.G.x + C * c.u.x;
    v.y = P * c.G.y + C * c.u.y;
    const double a = c.a;
    v.z = c.d[0] * (a - z) + c.d[1] * (a * a - z * z) / 2.0 + c.d[2] * (a * a * a - z * z * z) / 3.0;
    return v;
  }

  static Mat3 velocity_gradient(const Column& c, double z) {
    const double g = c.gap();
    const double P = 0.5 * (z - c.a) * (z - c.b);
    const double C = (c.a - z) / g;
    const Vec2 gg = c.ga - c.gb;
    const Vec2 gP = -0.5 * ((z - c.b) * c.ga + (z - c.a) * c.gb);
    const Vec2 gC = (1.0 / g) * c.ga - ((c.a - z) / (g * g)) * gg;
    Mat3 m{};
    // horizontal derivatives of v_par
    m[0][0] = gP.x * c.G.x + P * c.H.xx + gC.x * c.u.x + C * c.Ju.xx;
    m[0][1] = gP.y * c.G.x + P * c.H.xy + gC.y * c.u.x + C * c.Ju.xy;
    m[1][0] = gP.x * c.G.y + P * c.H.yx + gC.x * c.u.y + C * c.Ju.yx;
    m[1][1] = gP.y * c.G.y + P * c.H.yy + gC.y * c.u.y + C * c.Ju.yy;
    // vertical derivatives of v_par
    const double mid = z - 0.5 * (c.a + c.b);
    m[0][2] = mid * c.G.x - c.u.x / g;
    m[1][2] = mid * c.G.y - c.u.y / g;
    // v_z = sum_k d_k (a^(k+1) - z^(k+1)) / (k + 1)
    double apow = 1.0, zpow = 1.0;
    Vec2 gvz;
    for (int k = 0; k < 3; ++k) {
      const double ak1 = apow * c.a, zk1 = zpow * z;
      gvz += ((ak1 - zk1) / (k + 1)) * c.gd[k] + (c.d[k] * apow) * c.ga;
      apow = ak1;
      zpow = zk1;
    }
    m[2][0] = gvz.x;
    m[2][1] = gvz.y;
    m[2][2] = -(c.d[0] + z * (c.d[1] + z * c.d[2]));
    return m;
  }

  /// Velocity at a point of the aperture.
  Vec3 eval_velocity(double x, double y, double z) const {
    const double r = std::hypot(x, y);
    if (r > geom_.L() * (1.0 + 1e-12)) {
      throw Error(ErrorCode::out_of_domain, "point lies outside the disk of radius L");
    }
    const Column c = column_at(x, y);
    const double tol = 1e-12 * std::max(1.0, std::abs(c.a));
    if (z < c.b - tol || z > c.a + tol) {
      throw Error(ErrorCode::out_of_domain, "z = " + std::to_string(z) + " lies outside the aperture [" +
                                                std::to_string(c.b) + ", " + std::to_string(c.a) + "]");
    }
    return velocity(c, z);
  }

  /// Peak velocity magnitude over the grid columns: Poiseuille peak plus shear.
  double velocity_scale() const {
    double s = 0.0;
    for (int i = 0; i < grid_.n_r(); ++i) {
      for (int j = 0; j < grid_.n_theta(); ++j) {
        const Column c = local_column(i, j);
        s = std::max(s, 0.125 * c.gap() * c.gap() * norm(c.G) + norm(c.u));
      }
    }
    return s;
  }

  /// Energies integrated exactly in z and by the midpoint rule over the
  /// cells of the pressure grid.
  EnergyBreakdown energy_breakdown() const {
    const auto& gl = GaussLegendre<5>::instance();
    EnergyBreakdown e;
    for (int i = 0; i < valid_rings_; ++i) {
      const double area = grid_.cell_area(i);
      for (int j = 0; j < grid_.n_theta(); ++j) {
        const Column c = column(i, j);
        const double half = 0.5 * c.gap(), mid = 0.5 * (c.a + c.b);
        EnergyBreakdown loc;
        for (int q = 0; q < 5; ++q) {
          const double z = mid + half * gl.nodes[q];
          const double w = half * gl.weights[q];
          const Mat3 m = velocity_gradient(c, z);
          const double s = z - mid;
          const Vec2 pz{s * c.G.x, s * c.G.y};
          const Vec2 cz{-c.u.x / c.gap(), -c.u.y / c.gap()};
          loc.dz_poiseuille += w * dot(pz, pz);
          loc.dz_couette += w * dot(cz, cz);
          loc.dz_cross += w * 2.0 * dot(pz, cz);
          loc.dz_par += w * (m[0][2] * m[0][2] + m[1][2] * m[1][2]);
          double hsum = m[2][2] * m[2][2];
          for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 2; ++b) hsum += m[a][b] * m[a][b];
          }
          loc.horizontal += w * hsum;
        }
        e.dz_par += area * loc.dz_par;
        e.dz_poiseuille += area * loc.dz_poiseuille;
        e.dz_couette += area * loc.dz_couette;
        e.dz_cross += area * loc.dz_cross;
        e.horizontal += area * loc.horizontal;
      }
    }
    e.all = e.dz_par + e.horizontal;
    return e;
  }

 private:
  Column analytic_column(double x, double y) const {
    Column c;
    c.a = geom_.h() + geom_.top(x, y);
    c.b = geom_.bottom(x, y);
    c.ga = geom_.grad_top(x, y);
    c.gb = geom_.grad_bottom(x, y);
    const double r = std::hypot(x, y);
    const double L = geom_.L();
    const double chi = cutoff(r, L);
    const double dchi = cutoff_derivative(r, L);
    const Vec2 gchi = r > 0.0 ? Vec2{dchi * x / r, dchi * y / r} : Vec2{};
    const Vec2 v = data_.v_star(x, y);
    const Jac2 J = data_.jac_v(x, y);
    c.u = chi * v;
    c.Ju = {chi * J.xx + v.x * gchi.x, chi * J.xy + v.x * gchi.y, chi * J.yx + v.y * gchi.x,
            chi * J.yy + v.y * gchi.y};
    return c;
  }

  Column local_column(int i, int j) const {
    Column c = analytic_column(grid_.x(i, j), grid_.y(i, j));
    c.G = {gx_(i, j), gy_(i, j)};
    c.H = {hxx_(i, j), hxy_(i, j), hyx_(i, j), hyy_(i, j)};
    return c;
  }

  static void compute_d(Column& c) {
    const double lap = c.H.xx + c.H.yy;
    const double g = c.gap();
    const Vec2 gg = c.ga - c.gb;
    const double divu = c.Ju.trace();
    const double ggu = dot(gg, c.u);
    c.d[2] = 0.5 * lap;
    c.d[1] = -0.5 * (c.a + c.b) * lap - 0.5 * dot(c.ga + c.gb, c.G) - divu / g + ggu / (g * g);
    c.d[0] = 0.5 * c.a * c.b * lap + 0.5 * dot(c.b * c.ga + c.a * c.gb, c.G) + c.a * divu / g +
             dot(c.ga, c.u) / g - c.a * ggu / (g * g);
  }

  GapGeometry geom_;
  BoundaryData data_;
  bool cutoff_active_;
  PolarGrid grid_;
  ScalarField p_;
  ScalarField gx_, gy_;
  ScalarField hxx_, hxy_, hyx_, hyy_;
  std::array<ScalarField, 3> d_;
  std::array<ScalarField, 3> gdx_, gdy_;
  int valid_rings_ = 0;
};

inline double gap_energy(const ApertureField& field, const std::set<EnergyTerm>& terms) {
  if (terms.empty()) throw Error(ErrorCode::invalid_parameter, "gap_energy needs at least one term");
  const EnergyBreakdown e = field.energy_breakdown();
  if (terms.count(EnergyTerm::all)) return e.all;
  double s = 0.0;
  if (terms.count(EnergyTerm::dz_par)) s += e.dz_par;
  if (terms.count(EnergyTerm::horizontal)) s += e.horizontal;
  return s;
}

inline double gap_energy(const ApertureField& field, EnergyTerm term = EnergyTerm::all) {
  return gap_energy(field, std::set<EnergyTerm>{term});
}

/// max |div v| over the cell centres of the pressure grid (rings 1 to
/// N_r - 3) and n_z layer midpoints per column. Horizontal derivatives are
/// centred polar differences between neighbouring columns at the same
/// physical height, applied to the Cartesian components; the vertical one is
/// a centred difference of step gamma / n_z.
inline double divergence_residual(const ApertureField& field, int n_z) {
  if (n_z < 16) throw Error(ErrorCode::invalid_parameter, "N_z must be >= 16");
  const PolarGrid& g = field.grid();
  const int nt = g.n_theta();
  const int last = std::min(field.valid_rings(), g.n_r() - 2);
  double worst = 0.0;
  std::array<ApertureField::Column, 5> cols;
  for (int i = 1; i < last; ++i) {
    const auto w = radial_derivative_weights(g, i);
    const double r = g.r(i);
    for (int j = 0; j < nt; ++j) {
      cols = {field.column(i - 1, j), field.column(i, j), field.column(i + 1, j), field.column(i, j - 1),
              field.column(i, j + 1)};
      const auto& c = cols[1];
      const double dz = c.gap() / n_z;
      for (int l = 0; l < n_z; ++l) {
        const double z = c.b + (l + 0.5) * dz;
        // Cartesian components, so a locally constant vector differences
        // exactly and no 1/r amplification appears near the pole
        Vec3 v[5];
        for (int q = 0; q < 5; ++q) v[q] = ApertureField::velocity(cols[q], z);
        const double dvx_r = w[0] * v[0].x + w[1] * v[1].x + w[2] * v[2].x;
        const double dvy_r = w[0] * v[0].y + w[1] * v[1].y + w[2] * v[2].y;
        const double dvx_t = (v[4].x - v[3].x) / (2.0 * g.dtheta());
        const double dvy_t = (v[4].y - v[3].y) / (2.0 * g.dtheta());
        const double cs = g.cos_theta(j), sn = g.sin_theta(j);
        const double div_h = cs * dvx_r - sn * dvx_t / r + sn * dvy_r + cs * dvy_t / r;
        const double vz_p = ApertureField::velocity(c, z + dz).z;
        const double vz_m = ApertureField::velocity(c, z - dz).z;
        const double div = div_h + (vz_p - vz_m) / (2.0 * dz);
        worst = std::max(worst, std::abs(div));
      }
    }
  }
  return worst;
}

/// As above with an explicit (N_r, N_theta, N_z) sampling spec; the
/// horizontal sampling is the pressure grid, so N_r and N_theta must match it.
inline double divergence_residual(const ApertureField& field, const std::array<int, 3>& spec) {
  if (spec[0] < 16 || spec[1] < 16 || spec[2] < 16) {
    throw Error(ErrorCode::invalid_parameter, "divergence sampling resolutions must be >= 16");
  }
  if (spec[0] != field.grid().n_r() || spec[1] != field.grid().n_theta()) {
    throw Error(ErrorCode::invalid_parameter, "horizontal sampling must match the pressure grid");
  }
  return divergence_residual(field, spec[2]);
}

enum class Surface { top, bottom };

/// max over cell centres with r < L/2 of |v - expected trace| on the given
/// surface; returns {tangential, normal} errors. On the top the trace is 0;
/// on the bottom it is (chi_L v*, w*).
inline std::array<double, 2> boundary_trace_error(const ApertureField& field, Surface side) {
  const BoundaryData& data = field.data();
  const PolarGrid& g = field.grid();
  const double half = 0.5 * field.geometry().L();
  std::array<double, 2> err{0.0, 0.0};
  for (int i = 0; i < field.valid_rings() && g.r(i) < half; ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      const auto c = field.column(i, j);
      if (side == Surface::top) {
        const Vec3 v = ApertureField::velocity(c, c.a);
        err[0] = std::max(err[0], std::hypot(v.x, v.y));
        err[1] = std::max(err[1], std::abs(v.z));
      } else {
        const Vec3 v = ApertureField::velocity(c, c.b);
        err[0] = std::max(err[0], std::hypot(v.x - c.u.x, v.y - c.u.y));
        err[1] = std::max(err[1], std::abs(v.z - data.w_star(g.x(i, j), g.y(i, j))));
      }
    }
  }
  return err;
}

}  // namespace lubrigap
