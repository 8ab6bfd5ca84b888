#pragma once

// Grid-sampled checks of the non-degenerate contact assumptions: flat contact
// at the origin (zero profile gradients) and a gap Hessian bounded below by a
// positive multiple of the identity. The constants reported here are the ones
// the weighted estimates depend on.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lubrigap/error.hpp"
#include "lubrigap/geometry.hpp"
#include "lubrigap/grid.hpp"

namespace lubrigap {

struct ConstantsReport {
  double C_cvx = 0.0;              // min of Laplacian(gamma)
  double C_ell = 0.0;              // min of (gamma - h) / r^2, r >= L/100
  double C_upper = 0.0;            // max of (gamma - h) / r^2, r >= L/100
  std::vector<double> C_reg;       // C_reg[k] = max(|D^k gamma_t| + |D^k gamma_b|)
  double a1_residual = 0.0;        // |grad gamma_t(0)| + |grad gamma_b(0)|
  double a2_min_eigenvalue = 0.0;  // min eigenvalue of Hess(gamma_t - gamma_b)
  double K_gradient = 0.0;         // max (|grad gamma_t| + |grad gamma_b|) / sqrt(gamma)
  double K_sum = 0.0;              // max (gamma_t + gamma_b) / gamma
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

namespace detail {

// Frobenius norm of the third-derivative tensor from differences of Hessians.
inline double third_derivative_norm(const GapGeometry& geom, bool top, double x, double y) {
  const double d = 1e-4 * geom.L();
  auto hess = [&](double a, double b) { return top ? geom.hess_top(a, b) : geom.hess_bottom(a, b); };
  const Sym2 hxp = hess(x + d, y), hxm = hess(x - d, y);
  const Sym2 hyp = hess(x, y + d), hym = hess(x, y - d);
  const double fxxx = (hxp.xx - hxm.xx) / (2 * d);
  const double fxxy = (hyp.xx - hym.xx) / (2 * d);
  const double fxyy = (hxp.yy - hxm.yy) / (2 * d);
  const double fyyy = (hyp.yy - hym.yy) / (2 * d);
  return std::sqrt(fxxx * fxxx + 3 * fxxy * fxxy + 3 * fxyy * fxyy + fyyy * fyyy);
}

}  // namespace detail

/// Sample the geometry on the grid and report the contact constants. Never
/// throws on a degenerate geometry; the violations are listed instead.
inline ConstantsReport assess_contact(const GapGeometry& geom, const PolarGrid& grid, int k_max = 2) {
  if (k_max < 0 || k_max > 3) throw Error(ErrorCode::invalid_parameter, "k_max must be in [0, 3]");
  if (grid.L() < geom.L() * (1.0 - 1e-12)) {
    throw Error(ErrorCode::invalid_parameter, "grid does not cover the disk of radius L");
  }
  const double h = geom.h();
  const double r_min = geom.L() / 100.0;
  const double inf = std::numeric_limits<double>::infinity();

  ConstantsReport rep;
  rep.C_cvx = inf;
  rep.C_ell = inf;
  rep.C_upper = -inf;
  rep.a2_min_eigenvalue = inf;
  rep.C_reg.assign(static_cast<std::size_t>(k_max) + 1, 0.0);

  const Vec2 gt0 = geom.grad_top(0.0, 0.0), gb0 = geom.grad_bottom(0.0, 0.0);
  rep.a1_residual = norm(gt0) + norm(gb0);

  auto visit = [&](double x, double y) {
    const GapSample s = geom.eval_unchecked(x, y);
    const Vec2 gt = geom.grad_top(x, y), gb = geom.grad_bottom(x, y);
    const Sym2 ht = geom.hess_top(x, y), hb = geom.hess_bottom(x, y);
    const Sym2 hg = ht - hb;
    rep.C_cvx = std::min(rep.C_cvx, hg.trace());
    rep.a2_min_eigenvalue = std::min(rep.a2_min_eigenvalue, hg.min_eigenvalue());
    const double r2 = x * x + y * y;
    if (r2 >= r_min * r_min) {
      rep.C_ell = std::min(rep.C_ell, (s.gap - h) / r2);
      rep.C_upper = std::max(rep.C_upper, (s.gap - h) / r2);
    }
    rep.K_gradient = std::max(rep.K_gradient, (norm(gt) + norm(gb)) / std::sqrt(s.gap));
    rep.K_sum = std::max(rep.K_sum, (s.top + s.bottom) / s.gap);
    rep.C_reg[0] = std::max(rep.C_reg[0], std::abs(s.top) + std::abs(s.bottom));
    if (k_max >= 1) rep.C_reg[1] = std::max(rep.C_reg[1], norm(gt) + norm(gb));
    if (k_max >= 2) rep.C_reg[2] = std::max(rep.C_reg[2], ht.frobenius() + hb.frobenius());
    if (k_max >= 3) {
      rep.C_reg[3] = std::max(rep.C_reg[3], detail::third_derivative_norm(geom, true, x, y) +
                                                detail::third_derivative_norm(geom, false, x, y));
    }
  };
  visit(0.0, 0.0);
  for (int i = 0; i < grid.n_r(); ++i) {
    if (grid.r(i) > geom.L()) break;
    for (int j = 0; j < grid.n_theta(); ++j) visit(grid.x(i, j), grid.y(i, j));
  }

  const double grad_tol = 1e-6;
  if (rep.a1_residual > grad_tol) {
    rep.violations.push_back("profile gradients do not vanish at the origin (A1): residual " +
                             std::to_string(rep.a1_residual));
  }
  if (!(rep.a2_min_eigenvalue > 0.0)) {
    rep.violations.push_back("gap Hessian is not positive definite (A2): min eigenvalue " +
                             std::to_string(rep.a2_min_eigenvalue));
  }
  if (!(rep.C_cvx > 0.0)) {
    rep.violations.push_back("Laplacian of the gap is not positive: C_cvx = " + std::to_string(rep.C_cvx));
  }
  if (!(rep.C_ell > 0.0)) {
    rep.violations.push_back("no paraboloid minorant: C_ell = " + std::to_string(rep.C_ell));
  }
  return rep;
}

/// As assess_contact, but a degenerate contact is an error.
inline ConstantsReport validate_contact(const GapGeometry& geom, const PolarGrid& grid, int k_max = 2) {
  ConstantsReport rep = assess_contact(geom, grid, k_max);
  if (!rep.ok()) {
    std::string msg = "degenerate contact";
    for (const auto& v : rep.violations) msg += "; " + v;
    throw Error(ErrorCode::degenerate_contact, msg);
  }
  return rep;
}

}  // namespace lubrigap
