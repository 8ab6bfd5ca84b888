#pragma once

// Finite-volume solver for the Reynolds problem
//
//   -(1/12) div(gamma^3 grad p) = f  on B(0, L),   p = 0 on r = L,
//
// on a PolarGrid, and the weighted seminorms int gamma^(3+n) |D^k p|^2.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lubrigap/data.hpp"
#include "lubrigap/error.hpp"
#include "lubrigap/geometry.hpp"
#include "lubrigap/grid.hpp"
#include "lubrigap/quadrature.hpp"

namespace lubrigap {

enum class SourceVariant { plain, interior };

inline std::string to_string(SourceVariant v) { return v == SourceVariant::plain ? "plain" : "interior"; }

/// f = w* - (1/2) div((gamma_t + gamma_b) v*), and for the interior variant
/// additionally - (1/2)(h - 2 gamma_b) div v*. Divergences are centred
/// differences of the product fields.
inline ScalarField assemble_source(const GapGeometry& geom, const BoundaryData& data, const PolarGrid& grid,
                                   SourceVariant variant = SourceVariant::plain) {
  if (!data.w_star || !data.v_star) {
    throw Error(ErrorCode::data_evaluation, "boundary data needs both w* and v*");
  }
  const double d = 1e-5 * geom.L();
  auto flux = [&](double x, double y) {
    const double s = geom.top(x, y) + geom.bottom(x, y);
    const Vec2 v = data.v_star(x, y);
    return Vec2{s * v.x, s * v.y};
  };
  auto div_v = [&](double x, double y) {
    const Vec2 xp = data.v_star(x + d, y), xm = data.v_star(x - d, y);
    const Vec2 yp = data.v_star(x, y + d), ym = data.v_star(x, y - d);
    return (xp.x - xm.x + yp.y - ym.y) / (2.0 * d);
  };
  ScalarField f(grid, "f");
  for (int i = 0; i < grid.n_r(); ++i) {
    for (int j = 0; j < grid.n_theta(); ++j) {
      const double x = grid.x(i, j), y = grid.y(i, j);
      const double div = (flux(x + d, y).x - flux(x - d, y).x + flux(x, y + d).y - flux(x, y - d).y) / (2.0 * d);
      double v = data.w_star(x, y) - 0.5 * div;
      if (variant == SourceVariant::interior) v -= 0.5 * (geom.h() - 2.0 * geom.bottom(x, y)) * div_v(x, y);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::data_evaluation,
                    "source is not finite at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
      }
      f(i, j) = v;
    }
  }
  return f;
}

/// Five-point conservative operator A with A p = 12 * (integral of f over
/// each cell) for the discrete problem. Face coefficients are exact 1D
/// transmissibilities of gamma^3 along the segment joining two centres; the
/// radial ones carry a flux density that is constant along the segment, which
/// keeps the cells around the pole exact for quadratic pressures.
class ReynoldsOperator {
 public:
  ReynoldsOperator(const GapGeometry& geom, const PolarGrid& grid) : grid_(grid) {
    if (std::abs(grid.L() - geom.L()) > 1e-12 * geom.L()) {
      throw Error(ErrorCode::invalid_parameter, "grid radius differs from the geometry patch radius");
    }
    const int nr = grid.n_r(), nt = grid.n_theta();
    radial_.assign(grid.size(), 0.0);
    angular_.assign(grid.size(), 0.0);
    diag_.assign(grid.size(), 0.0);
    const auto& gl = GaussLegendre<8>::instance();
    const double dt = grid.dtheta();
    const bool radial_geom = geom.is_radial();
    for (int i = 0; i < nr; ++i) {
      const double a = grid.r(i);
      const double b = i + 1 < nr ? grid.r(i + 1) : grid.L();
      const double rf = grid.face(i + 1);
      const int jmax = radial_geom ? 1 : nt;
      for (int j = 0; j < jmax; ++j) {
        const double c = grid.cos_theta(j), s = grid.sin_theta(j);
        const double res = gl.integrate(
            [&](double r) {
              const double g = geom.gap(r * c, r * s);
              return 1.0 / (g * g * g);
            },
            a, b);
        radial_[grid.index(i, j)] = dt * rf / res;
        const double th = grid.theta(j);
        const double ri = grid.r(i);
        const double res_t = gl.integrate(
            [&](double t) {
              const double g = geom.gap(ri * std::cos(t), ri * std::sin(t));
              return 1.0 / (g * g * g);
            },
            th, th + dt);
        angular_[grid.index(i, j)] = grid.dr(i) / (ri * res_t);
      }
      if (radial_geom) {
        for (int j = 1; j < nt; ++j) {
          radial_[grid.index(i, j)] = radial_[grid.index(i, 0)];
          angular_[grid.index(i, j)] = angular_[grid.index(i, 0)];
        }
      }
    }
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < nt; ++j) {
        double dsum = radial_[grid.index(i, j)] + angular_[grid.index(i, j)] + angular_[grid.index(i, j - 1)];
        if (i > 0) dsum += radial_[grid.index(i - 1, j)];
        diag_[grid.index(i, j)] = dsum;
      }
    }
  }

  const PolarGrid& grid() const { return grid_; }

  /// Coefficient of the face between (i, j) and (i + 1, j); for the last
  /// ring it couples to the boundary value p = 0 at r = L.
  double radial(int i, int j) const { return radial_[grid_.index(i, j)]; }
  /// Coefficient of the face between (i, j) and (i, j + 1).
  double angular(int i, int j) const { return angular_[grid_.index(i, j)]; }
  const std::vector<double>& diagonal() const { return diag_; }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const int nr = grid_.n_r(), nt = grid_.n_theta();
    for (int i = 0; i < nr; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * nt;
      for (int j = 0; j < nt; ++j) {
        const std::size_t k = row + j;
        const std::size_t jp = row + (j + 1 == nt ? 0 : j + 1);
        const std::size_t jm = row + (j == 0 ? nt - 1 : j - 1);
        double v = diag_[k] * x[k] - angular_[k] * x[jp] - angular_[jm] * x[jm];
        if (i + 1 < nr) v -= radial_[k] * x[k + nt];
        if (i > 0) v -= radial_[k - nt] * x[k - nt];
        y[k] = v;
      }
    }
  }

  /// Right-hand side 12 f r_i dr_i dtheta.
  std::vector<double> rhs(const ScalarField& f) const {
    std::vector<double> b(grid_.size());
    for (int i = 0; i < grid_.n_r(); ++i) {
      for (int j = 0; j < grid_.n_theta(); ++j) b[grid_.index(i, j)] = 12.0 * f(i, j) * grid_.cell_area(i);
    }
    return b;
  }

 private:
  PolarGrid grid_;
  std::vector<double> radial_;
  std::vector<double> angular_;
  std::vector<double> diag_;
};

struct PressureSolution {
  ScalarField pressure;
  ScalarField source;
  double residual = 0.0;  // relative algebraic residual |b - A p| / |b|
  int iterations = 0;
  double h = 0.0;
  double tol = 0.0;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace detail

/// Jacobi-preconditioned conjugate gradients. A max_iterations of 0 means
/// 50 * N_r * N_theta.
inline PressureSolution solve_reynolds(const GapGeometry& geom, const PolarGrid& grid, const ScalarField& source,
                                       double tol = 1e-10, long max_iterations = 0) {
  if (!(tol > 0.0) || tol > 1e-4) throw Error(ErrorCode::invalid_parameter, "tol must be in (0, 1e-4]");
  if (!source.grid.same_as(grid)) throw Error(ErrorCode::invalid_parameter, "source lives on a different grid");
  if (!source.all_finite()) throw Error(ErrorCode::data_evaluation, "source has non-finite values");
  const ReynoldsOperator op(geom, grid);
  const std::size_t n = grid.size();
  if (max_iterations <= 0) max_iterations = 50L * static_cast<long>(n);

  PressureSolution sol{ScalarField(grid, "pressure"), source, 0.0, 0, geom.h(), tol};
  const std::vector<double> b = op.rhs(source);
  const double bnorm = std::sqrt(detail::dot(b, b));
  if (bnorm == 0.0) return sol;

  std::vector<double>& x = sol.pressure.values;
  std::vector<double> r = b, z(n), p(n), q(n);
  std::vector<double> inv_diag(n);
  for (std::size_t k = 0; k < n; ++k) inv_diag[k] = 1.0 / op.diagonal()[k];

  long it = 0;
  double rel = 1.0;
  while (true) {
    for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
    p = z;
    double rz = detail::dot(r, z);
    while (it < max_iterations) {
      op.apply(p, q);
      const double alpha = rz / detail::dot(p, q);
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += alpha * p[k];
        r[k] -= alpha * q[k];
      }
      ++it;
      rel = std::sqrt(detail::dot(r, r)) / bnorm;
      if (rel <= tol) break;
      for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
      const double rz_new = detail::dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    // the recursive residual drifts; confirm with the true one and restart if needed
    op.apply(x, q);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
    rel = std::sqrt(detail::dot(r, r)) / bnorm;
    if (rel <= tol || it >= max_iterations || !std::isfinite(rel)) break;
  }
  sol.iterations = static_cast<int>(it);
  sol.residual = rel;
  if (!(rel <= tol)) {
    throw SolverFailure("conjugate gradients did not reach tol " + std::to_string(tol) + " in " +
                            std::to_string(it) + " iterations (residual " + std::to_string(rel) + ")",
                        rel, static_cast<int>(it));
  }
  return sol;
}

inline PressureSolution solve_reynolds(const GapGeometry& geom, const PolarGrid& grid, const BoundaryData& data,
                                       SourceVariant variant = SourceVariant::plain, double tol = 1e-10) {
  return solve_reynolds(geom, grid, assemble_source(geom, data, grid, variant), tol);
}

namespace detail {

inline ScalarField gap_field(const GapGeometry& geom, const PolarGrid& g) {
  return ScalarField::sample(g, [&](double x, double y) { return geom.gap(x, y); }, "gamma");
}

// int gamma^(3+n) |grad p|^2 from the face fluxes: the flux density along each dual
// segment is constant in the 1D model that defines the transmissibility, so
// the weighted square of the gradient integrates exactly along it.
inline double seminorm_first_order(const PressureSolution& sol, const GapGeometry& geom, double n) {
  const PolarGrid& g = sol.pressure.grid;
  const ReynoldsOperator op(geom, g);
  const auto& gl = GaussLegendre<8>::instance();
  const double e = n - 3.0;
  const double dt = g.dtheta();
  const bool radial_geom = geom.is_radial();
  double total = 0.0;
  for (int i = 0; i < g.n_r(); ++i) {
    const double a = g.r(i);
    const double b = i + 1 < g.n_r() ? g.r(i + 1) : g.L();
    const double ri = g.r(i);
    const double rf = g.face(i + 1);
    double wr = 0.0, wt = 0.0;
    for (int j = 0; j < g.n_theta(); ++j) {
      if (j == 0 || !radial_geom) {
        const double c = g.cos_theta(j), s = g.sin_theta(j);
        wr = gl.integrate([&](double r) { return std::pow(geom.gap(r * c, r * s), e); }, a, b) / rf;
        const double th = g.theta(j);
        wt = gl.integrate(
            [&](double t) { return std::pow(geom.gap(ri * std::cos(t), ri * std::sin(t)), e) * ri; }, th,
            th + dt);
      }
      const double p0 = sol.pressure(i, j);
      const double dpr = (i + 1 < g.n_r() ? sol.pressure(i + 1, j) : 0.0) - p0;
      const double dpt = sol.pressure(i, j + 1) - p0;
      const double fr = op.radial(i, j) * dpr;
      const double ft = op.angular(i, j) * dpt;
      total += fr * fr / dt * wr + ft * ft / g.dr(i) * wt;
    }
  }
  return total;
}

}  // namespace detail

/// int_{B(0,L)} gamma^(3+n) |D^k p|^2 for k in {1, 2, 3}. First order uses
/// the face fluxes of the scheme; higher orders use repeated centred polar
/// differences with the outer k rings dropped and the midpoint rule.
inline double weighted_seminorm(const PressureSolution& sol, const GapGeometry& geom, double n, int k) {
  if (k < 1 || k > 3) throw Error(ErrorCode::invalid_parameter, "seminorm order k must be 1, 2 or 3");
  if (!std::isfinite(n) || n < -3.0) throw Error(ErrorCode::invalid_parameter, "weight exponent 3+n must be >= 0");
  const PolarGrid& g = sol.pressure.grid;
  if (g.n_r() < 32 * k) {
    throw Error(ErrorCode::resolution, "N_r = " + std::to_string(g.n_r()) + " is too coarse for k = " +
                                           std::to_string(k) + " (needs N_r >= " + std::to_string(32 * k) + ")");
  }
  if (k == 1) return detail::seminorm_first_order(sol, geom, n);

  std::vector<ScalarField> comps{sol.pressure};
  int valid = g.n_r();
  for (int order = 0; order < k; ++order) {
    std::vector<ScalarField> next;
    int next_valid = valid;
    for (const auto& c : comps) {
      GradientField gf = cartesian_gradient(c, valid, order == 0);
      next_valid = gf.valid_rings;
      next.push_back(std::move(gf.dx));
      next.push_back(std::move(gf.dy));
    }
    comps = std::move(next);
    valid = next_valid;
  }
  const int rings = std::min(valid, g.n_r() - k);
  double total = 0.0;
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      double s = 0.0;
      for (const auto& c : comps) s += c(i, j) * c(i, j);
      total += std::pow(geom.gap(g.x(i, j), g.y(i, j)), 3.0 + n) * s * g.cell_area(i);
    }
  }
  return total;
}

}  // namespace lubrigap
