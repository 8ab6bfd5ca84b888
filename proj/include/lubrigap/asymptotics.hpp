#pragma once

// Closed-form small-gap expansions for the sphere-sphere gap and the radial
// ODEs behind them.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lubrigap/error.hpp"
#include "lubrigap/geometry.hpp"
#include "lubrigap/quadrature.hpp"

namespace lubrigap {

/// Factor between the divergence form -(1/12) div(gamma^3 grad p) = f and the
/// expanded radial ODEs, whose right-hand sides carry -12 f.
inline constexpr double kReynoldsFactor = 12.0;

namespace detail {

inline void check_regime(double h) {
  if (!(h > 0.0 && h < 1.0)) {
    throw Error(ErrorCode::out_of_regime, "expansion needs h in (0, 1), got " + std::to_string(h));
  }
}

inline double sphere_gap_width(const SphereGap& g, double r) {
  const double u = r * r;
  return g.h + u / (g.S + std::sqrt(g.S * g.S - u)) + u / (g.R + std::sqrt(g.R * g.R - u));
}

}  // namespace detail

/// f0 * int_r^L 6 s / gamma(s)^3 ds, the pressure of the constant mode.
inline double radial_pressure_const(const SphereGap& geom, double f0, double r) {
  if (!(r >= 0.0) || r > geom.L * (1.0 + 1e-14)) {
    throw Error(ErrorCode::out_of_domain, "r must lie in [0, L]");
  }
  if (f0 == 0.0 || r >= geom.L) return 0.0;
  auto integrand = [&](double s) {
    const double g = detail::sphere_gap_width(geom, s);
    return 6.0 * s / (g * g * g);
  };
  // break the interval at multiples of the contact width sqrt(h)
  std::vector<double> cuts{r};
  for (double m : {1.0, 10.0, 100.0}) {
    const double c = m * std::sqrt(geom.h);
    if (c > r && c < geom.L) cuts.push_back(c);
  }
  cuts.push_back(geom.L);
  // two adaptive rules of different order must agree; the built-in error
  // estimate of boost is pessimistic on short pieces
  double total = 0.0, check = 0.0, l1_sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double l1 = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, cuts[k], cuts[k + 1], 20,
                                                                           1e-12, nullptr, &l1);
    check += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, cuts[k], cuts[k + 1], 20,
                                                                           1e-12);
    l1_sum += l1;
  }
  if (!std::isfinite(total) || std::abs(total - check) > 1e-10 * l1_sum) {
    throw Error(ErrorCode::integration, "adaptive quadrature did not reach relative tolerance 1e-10");
  }
  return f0 * total;
}

/// 72 pi f0^2 (R1^2 / h - 3 R1^4 / R3^3 |ln h|).
inline double energy_const_mode(double R1, double R3, double f0, double h) {
  detail::check_regime(h);
  return 72.0 * std::numbers::pi * f0 * f0 *
         (R1 * R1 / h - 3.0 * std::pow(R1, 4) / std::pow(R3, 3) * std::abs(std::log(h)));
}

/// (fc^2 + fs^2) (288 pi R1^3 / 5) |ln h|.
inline double energy_costheta_mode(double R1, double fc, double fs, double h) {
  detail::check_regime(h);
  return (fc * fc + fs * fs) * 288.0 * std::numbers::pi * std::pow(R1, 3) / 5.0 * std::abs(std::log(h));
}

/// Sign of the (S - R) / (2 (R + S)) coefficient mixing u_par(0) into the
/// gradient term. The two published conventions disagree; `theorem` (+1) is
/// the one re-derived for the cos-theta source, `proof` (-1) the opposite.
/// For R = S the coefficient vanishes and both agree.
enum class MixingSign { theorem = 1, proof = -1 };

struct EnergyExpansion {
  struct Parts {
    double const_mode_1_over_h = 0.0;  // coefficient of 1/h
    double const_mode_log = 0.0;       // coefficients of |ln h|
    double couette_log = 0.0;
    double gradient_log = 0.0;
  };

  double R = 0.0, S = 0.0, h = 0.0;
  double R1 = 0.0, R3 = 0.0;
  MixingSign sign = MixingSign::theorem;
  Parts parts;
  double a_over_h = 0.0;
  double b_log = 0.0;

  double value(double at_h) const { return a_over_h / at_h + b_log * std::abs(std::log(at_h)); }
  double total() const { return value(h); }
};

inline EnergyExpansion stokes_energy_expansion(double R, double S, double u_perp0, Vec2 u_par0,
                                               Vec2 grad_u_perp0, double h,
                                               MixingSign sign = MixingSign::theorem) {
  if (!(R > 0.0) || !(S > 0.0) || !std::isfinite(R) || !std::isfinite(S)) {
    throw Error(ErrorCode::invalid_geometry, "sphere radii must be positive and finite");
  }
  detail::check_regime(h);
  const double pi = std::numbers::pi;
  EnergyExpansion e;
  e.R = R;
  e.S = S;
  e.h = h;
  e.sign = sign;
  e.R1 = 1.0 / (1.0 / S + 1.0 / R);
  e.R3 = std::cbrt(1.0 / (1.0 / (S * S * S) + 1.0 / (R * R * R)));
  const double R1 = e.R1, R3c = e.R3 * e.R3 * e.R3;
  const double up2 = u_perp0 * u_perp0;
  e.parts.const_mode_1_over_h = 6.0 * pi * up2 * R1 * R1;
  e.parts.const_mode_log =
      6.0 * pi * up2 * (16.0 * R1 / 5.0 - 8.0 * R1 * R1 * R1 / (R * S) - 3.0 * std::pow(R1, 4) / R3c);
  e.parts.couette_log = 2.0 * pi * R1 * dot(u_par0, u_par0);
  const double mix = static_cast<double>(static_cast<int>(sign)) * (S - R) / (2.0 * (R + S));
  const Vec2 w = R1 * grad_u_perp0 + mix * u_par0;
  e.parts.gradient_log = 24.0 * pi / 5.0 * R1 * dot(w, w);
  e.a_over_h = e.parts.const_mode_1_over_h;
  e.b_log = e.parts.const_mode_log + e.parts.couette_log + e.parts.gradient_log;
  return e;
}

struct OdeSolution {
  std::vector<double> s_grid;
  std::vector<double> q_values;
  std::vector<double> dq_values;
  double R1 = 0.0;
  double far_field_coeff = 0.0;     // c in s^3 q ~ c + d / s, fitted over the last decade
  double far_field_residual = 0.0;  // rms misfit of that fit relative to |c|
  double s3q_end = 0.0;             // s_max^3 q(s_max)
  double s4dq_end = 0.0;            // s_max^4 q'(s_max)
};

namespace detail {

// Nodes xi = k/N mapped by s = l sinh(xi asinh(s_max / l)).
inline std::vector<double> sinh_mesh(double s_max, int n, double l) {
  std::vector<double> s(n + 1);
  const double span = std::asinh(s_max / l);
  for (int k = 0; k <= n; ++k) s[k] = l * std::sinh(span * k / n);
  s.front() = 0.0;
  s.back() = s_max;
  return s;
}

// Solve a tridiagonal system in place (Thomas); lower[0] and upper[n-1] unused.
inline std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                             std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t k = 1; k < n; ++k) {
    if (!(std::abs(diag[k - 1]) > 1e-300)) throw Error(ErrorCode::discretization, "singular ODE system");
    const double m = lower[k] / diag[k - 1];
    diag[k] -= m * upper[k - 1];
    rhs[k] -= m * rhs[k - 1];
  }
  if (!(std::abs(diag[n - 1]) > 1e-300)) throw Error(ErrorCode::discretization, "singular ODE system");
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) x[k] = (rhs[k] - upper[k] * x[k + 1]) / diag[k];
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::discretization, "ODE solve produced non-finite values");
  }
  return x;
}

// Three-point derivative weights at s[k] from (k-1, k, k+1).
inline std::array<double, 3> centred_weights(double h1, double h2) {
  return {-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))};
}

}  // namespace detail

/// q'' + (1/s + 3s / (R1 (1 + s^2/(2 R1)))) q' - q / s^2 = -12 s / (1 + s^2/(2 R1))^3
/// on (0, s_max], q(0) = 0, with the decay condition q' + 3 q / s = 0 at
/// s_max. Second-order differences on a mesh clustered at the origin.
inline OdeSolution solve_profile_ode(double R1, double s_max, int n, bool check_domain = true) {
  if (!(R1 > 0.0) || !std::isfinite(R1)) throw Error(ErrorCode::invalid_parameter, "R1 must be positive");
  if (check_domain && !(s_max >= 50.0)) throw Error(ErrorCode::invalid_parameter, "s_max must be >= 50");
  if (check_domain && n < 1000) throw Error(ErrorCode::invalid_parameter, "N must be >= 1000");
  if (n < 8) throw Error(ErrorCode::invalid_parameter, "N must be >= 8");
  const std::vector<double> s = detail::sinh_mesh(s_max, n, std::sqrt(R1));
  // unknowns q_1 .. q_N (q_0 = 0)
  std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs(n, 0.0);
  for (int k = 1; k < n; ++k) {
    const double h1 = s[k] - s[k - 1], h2 = s[k + 1] - s[k];
    const double sk = s[k];
    const double w = 1.0 + sk * sk / (2.0 * R1);
    const double beta = 1.0 / sk + 3.0 * sk / (R1 * w);
    const auto d1 = detail::centred_weights(h1, h2);
    const double c_m = 2.0 / (h1 * (h1 + h2)), c_p = 2.0 / (h2 * (h1 + h2));
    const int row = k - 1;
    lo[row] = c_m + beta * d1[0];
    di[row] = -(c_m + c_p) + beta * d1[1] - 1.0 / (sk * sk);
    up[row] = c_p + beta * d1[2];
    rhs[row] = -12.0 * sk / (w * w * w);
  }
  // q'(s_N) by the second-order backward formula, then q' + 3q/s = 0
  const double h1 = s[n - 1] - s[n - 2], h2 = s[n] - s[n - 1];
  const double bm2 = h2 / (h1 * (h1 + h2));
  const double bm1 = -(h1 + h2) / (h1 * h2);
  const double b0 = (h1 + 2.0 * h2) / (h2 * (h1 + h2));
  {
    const int row = n - 1;
    // eliminate the q_{N-2} coefficient using row N-1 (which couples N-2, N-1, N)
    const int prev = n - 2;
    const double m = bm2 / lo[prev];
    lo[row] = bm1 - m * di[prev];
    di[row] = b0 + 3.0 / s[n] - m * up[prev];
    rhs[row] = -m * rhs[prev];
  }
  const std::vector<double> q = detail::solve_tridiagonal(lo, di, up, rhs);

  OdeSolution out;
  out.R1 = R1;
  out.s_grid = s;
  out.q_values.assign(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) out.q_values[k] = q[k - 1];
  out.dq_values.assign(n + 1, 0.0);
  {
    // one-sided second-order at the origin
    const double a1 = s[1], a2 = s[2];
    out.dq_values[0] = (out.q_values[1] * a2 * a2 - out.q_values[2] * a1 * a1) / (a1 * a2 * (a2 - a1));
  }
  for (int k = 1; k < n; ++k) {
    const auto w = detail::centred_weights(s[k] - s[k - 1], s[k + 1] - s[k]);
    out.dq_values[k] = w[0] * out.q_values[k - 1] + w[1] * out.q_values[k] + w[2] * out.q_values[k + 1];
  }
  out.dq_values[n] = bm2 * out.q_values[n - 2] + bm1 * out.q_values[n - 1] + b0 * out.q_values[n];
  out.s3q_end = s_max * s_max * s_max * out.q_values[n];
  out.s4dq_end = s_max * s_max * s_max * s_max * out.dq_values[n];

  // s^3 q = c + d / s over [s_max / 10, s_max]
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k <= n; ++k) {
    if (s[k] < 0.1 * s_max) continue;
    const double x = 1.0 / s[k], y = s[k] * s[k] * s[k] * out.q_values[k];
    pts.emplace_back(x, y);
    sw += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = sw * sxx - sx * sx;
  if (pts.size() < 3 || !(std::abs(det) > 0.0)) {
    throw Error(ErrorCode::truncation_domain, "too few mesh points in the last decade");
  }
  const double c = (sxx * sy - sx * sxy) / det;
  const double d = (sw * sxy - sx * sy) / det;
  double ss = 0.0;
  for (const auto& [x, y] : pts) ss += (y - c - d * x) * (y - c - d * x);
  out.far_field_coeff = c;
  out.far_field_residual = std::sqrt(ss / static_cast<double>(pts.size())) / std::abs(c);
  if (!(out.far_field_residual <= 0.05)) {
    throw Error(ErrorCode::truncation_domain, "far-field fit residual " + std::to_string(out.far_field_residual) +
                                                  " exceeds 5%; increase s_max");
  }
  return out;
}

/// Self-convergence ratio max|q_N - q_2N| / max|q_2N - q_4N| over the nodes
/// of the coarsest mesh; about 4 for a second-order scheme.
inline double profile_ode_convergence_ratio(double R1, double s_max, int n) {
  const OdeSolution a = solve_profile_ode(R1, s_max, n, false);
  const OdeSolution b = solve_profile_ode(R1, s_max, 2 * n, false);
  const OdeSolution c = solve_profile_ode(R1, s_max, 4 * n, false);
  double e1 = 0.0, e2 = 0.0;
  for (int k = 0; k <= n; ++k) {
    e1 = std::max(e1, std::abs(a.q_values[k] - b.q_values[2 * k]));
    e2 = std::max(e2, std::abs(b.q_values[2 * k] - c.q_values[4 * k]));
  }
  return e1 / e2;
}

struct CosThetaProfile {
  std::vector<double> r;
  std::vector<double> q;
  double energy = 0.0;  // pi int gamma^3 (q'^2 + q^2 / r^2) r dr
  double h = 0.0;
};

/// (1/r)(gamma^3 r q')' - gamma^3 q / r^2 = -12 r on (0, L), q(0) = q(L) = 0.
/// Conservative nodal scheme on a mesh graded at scale sqrt(h); the face
/// coefficients are exact 1D transmissibilities of gamma^3 r.
inline CosThetaProfile solve_costheta_ode(const SphereGap& geom, int n) {
  if (n < 512) throw Error(ErrorCode::invalid_parameter, "grid_N must be >= 512");
  const std::vector<double> r = detail::sinh_mesh(geom.L, n, std::sqrt(geom.h));
  const auto& gl = GaussLegendre<8>::instance();
  std::vector<double> T(n);
  for (int k = 0; k < n; ++k) {
    const double res = gl.integrate(
        [&](double x) {
          const double g = detail::sphere_gap_width(geom, x);
          return 1.0 / (g * g * g * x);
        },
        r[k], r[k + 1]);
    T[k] = 1.0 / res;
  }
  const int m = n - 1;  // interior nodes 1 .. n-1
  std::vector<double> lo(m, 0.0), di(m, 0.0), up(m, 0.0), rhs(m, 0.0), vol(m, 0.0), g3(m, 0.0);
  for (int k = 1; k < n; ++k) {
    const int row = k - 1;
    const double V = 0.5 * (r[k + 1] - r[k - 1]);
    const double g = detail::sphere_gap_width(geom, r[k]);
    vol[row] = V;
    g3[row] = g * g * g;
    lo[row] = -T[k - 1];
    up[row] = -T[k];
    di[row] = T[k - 1] + T[k] + g3[row] / r[k] * V;
    rhs[row] = kReynoldsFactor * r[k] * r[k] * V;
  }
  const std::vector<double> x = detail::solve_tridiagonal(lo, di, up, rhs);
  CosThetaProfile out;
  out.r = r;
  out.h = geom.h;
  out.q.assign(n + 1, 0.0);
  for (int k = 1; k < n; ++k) out.q[k] = x[k - 1];
  double e = 0.0;
  for (int k = 0; k < n; ++k) e += T[k] * (out.q[k + 1] - out.q[k]) * (out.q[k + 1] - out.q[k]);
  for (int k = 1; k < n; ++k) e += g3[k - 1] * out.q[k] * out.q[k] / r[k] * vol[k - 1];
  out.energy = std::numbers::pi * e;
  return out;
}

}  // namespace lubrigap
