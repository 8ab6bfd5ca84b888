#pragma once

// Tensor-product (r, theta) discretisation of the disk B(0, L) and the
// scalar fields sampled on it. Cells are centred in r, so there is no node at
// the pole; the ring facing the pole is closed by a zero-length face.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "lubrigap/error.hpp"
#include "lubrigap/geometry.hpp"

namespace lubrigap {

enum class RadialSpacing { uniform, graded };

inline std::string to_string(RadialSpacing s) {
  return s == RadialSpacing::uniform ? "uniform" : "graded";
}

class PolarGrid {
 public:
  /// r_i = (i + 1/2) L / n_r.
  static PolarGrid uniform(double L, int n_r, int n_theta) {
    check(L, n_r, n_theta);
    std::vector<double> faces(n_r + 1);
    for (int i = 0; i <= n_r; ++i) faces[i] = L * static_cast<double>(i) / n_r;
    faces.back() = L;
    return PolarGrid(L, n_theta, std::move(faces), RadialSpacing::uniform, 0.0);
  }

  /// Faces at r = l sinh(xi asinh(L / l)), xi uniform in [0, 1]: cells of
  /// size ~l asinh(L/l)/n_r near the pole, growing geometrically outwards.
  static PolarGrid graded(double L, int n_r, int n_theta, double length_scale) {
    check(L, n_r, n_theta);
    if (!(length_scale > 0.0)) {
      throw Error(ErrorCode::invalid_parameter, "graded grid needs a positive length scale");
    }
    const double span = std::asinh(L / length_scale);
    std::vector<double> faces(n_r + 1);
    for (int i = 0; i <= n_r; ++i) {
      faces[i] = length_scale * std::sinh(span * static_cast<double>(i) / n_r);
    }
    faces.front() = 0.0;
    faces.back() = L;
    return PolarGrid(L, n_theta, std::move(faces), RadialSpacing::graded, length_scale);
  }

  double L() const { return L_; }
  int n_r() const { return static_cast<int>(centers_.size()); }
  int n_theta() const { return n_theta_; }
  std::size_t size() const { return centers_.size() * static_cast<std::size_t>(n_theta_); }
  RadialSpacing spacing() const { return spacing_; }
  double length_scale() const { return length_scale_; }

  double r(int i) const { return centers_[i]; }
  double face(int i) const { return faces_[i]; }
  double dr(int i) const { return faces_[i + 1] - faces_[i]; }
  double dtheta() const { return dtheta_; }
  double theta(int j) const { return dtheta_ * j; }
  const std::vector<double>& centers() const { return centers_; }
  const std::vector<double>& faces() const { return faces_; }

  /// Midpoint quadrature weight r_i dr_i dtheta; sums to pi L^2.
  double cell_area(int i) const { return centers_[i] * dr(i) * dtheta_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * n_theta_ + static_cast<std::size_t>(wrap(j));
  }
  int wrap(int j) const { return ((j % n_theta_) + n_theta_) % n_theta_; }

  double x(int i, int j) const { return centers_[i] * cos_[wrap(j)]; }
  double y(int i, int j) const { return centers_[i] * sin_[wrap(j)]; }
  double cos_theta(int j) const { return cos_[wrap(j)]; }
  double sin_theta(int j) const { return sin_[wrap(j)]; }

  bool same_as(const PolarGrid& o) const {
    return n_theta_ == o.n_theta_ && L_ == o.L_ && faces_ == o.faces_;
  }

 private:
  PolarGrid(double L, int n_theta, std::vector<double> faces, RadialSpacing spacing, double ls)
      : L_(L), n_theta_(n_theta), faces_(std::move(faces)), spacing_(spacing), length_scale_(ls) {
    centers_.resize(faces_.size() - 1);
    for (std::size_t i = 0; i < centers_.size(); ++i) centers_[i] = 0.5 * (faces_[i] + faces_[i + 1]);
    dtheta_ = 2.0 * std::numbers::pi / n_theta_;
    cos_.resize(n_theta_);
    sin_.resize(n_theta_);
    for (int j = 0; j < n_theta_; ++j) {
      cos_[j] = std::cos(dtheta_ * j);
      sin_[j] = std::sin(dtheta_ * j);
    }
    // exact values on the axes so that quarter-turn rotations are exact
    for (int q = 0; q < 4; ++q) {
      const int j = q * n_theta_ / 4;
      cos_[j] = q == 0 ? 1.0 : (q == 2 ? -1.0 : 0.0);
      sin_[j] = q == 1 ? 1.0 : (q == 3 ? -1.0 : 0.0);
    }
  }

  static void check(double L, int n_r, int n_theta) {
    if (!(L > 0.0)) throw Error(ErrorCode::invalid_parameter, "grid radius must be positive");
    if (n_r < 8) throw Error(ErrorCode::invalid_parameter, "N_r must be >= 8");
    if (n_theta < 8 || n_theta % 4 != 0) {
      throw Error(ErrorCode::invalid_parameter, "N_theta must be >= 8 and a multiple of 4");
    }
  }

  double L_;
  int n_theta_;
  std::vector<double> faces_;
  std::vector<double> centers_;
  std::vector<double> cos_, sin_;
  double dtheta_ = 0.0;
  RadialSpacing spacing_;
  double length_scale_;
};

/// Values at the cell centres of a grid, indexed (i, j) with i radial.
struct ScalarField {
  PolarGrid grid;
  std::vector<double> values;
  std::string name;

  ScalarField(PolarGrid g, std::string n = {})
      : grid(std::move(g)), values(grid.size(), 0.0), name(std::move(n)) {}

  double& operator()(int i, int j) { return values[grid.index(i, j)]; }
  double operator()(int i, int j) const { return values[grid.index(i, j)]; }

  bool all_finite() const {
    for (double v : values) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  template <class F>
  static ScalarField sample(const PolarGrid& g, F&& f, std::string n = {}) {
    ScalarField out(g, std::move(n));
    for (int i = 0; i < g.n_r(); ++i) {
      for (int j = 0; j < g.n_theta(); ++j) out(i, j) = f(g.x(i, j), g.y(i, j));
    }
    return out;
  }
};

/// Cartesian gradient of a cell-centred field, valid on rings [0, valid_rings).
struct GradientField {
  ScalarField dx;
  ScalarField dy;
  int valid_rings = 0;
};

/// Three-point weights for d/dr at centre i from (i-1, i, i+1). Ring -1 is the
/// mirror image of ring 0 through the pole (r = -r_0, theta + pi); ring n_r is
/// the ghost ring mirrored through r = L.
inline std::array<double, 3> radial_derivative_weights(const PolarGrid& g, int i) {
  const double rm = i == 0 ? -g.r(0) : g.r(i - 1);
  const double rp = i + 1 < g.n_r() ? g.r(i + 1) : 2.0 * g.L() - g.r(i);
  const double r0 = g.r(i);
  const double h1 = r0 - rm, h2 = rp - r0;
  return {-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))};
}

/// Periodic spectral differentiation matrix on n equispaced angles (n even):
/// D_jk = (-1)^(j-k) cot((j-k) dtheta / 2) / 2 off the diagonal. Exact for
/// trigonometric polynomials below the Nyquist mode.
inline std::vector<double> angular_derivative_matrix(int n) {
  const double dt = 2.0 * std::numbers::pi / n;
  std::vector<double> D(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const int m = j - k;
      D[static_cast<std::size_t>(j) * n + k] = 0.5 * ((m % 2 == 0) ? 1.0 : -1.0) / std::tan(0.5 * m * dt);
    }
  }
  return D;
}

/// Polar differences converted to Cartesian components: three-point
/// differences in r, spectral differentiation in theta.
///
/// `valid_rings` tells how many inner rings of `f` hold meaningful values.
/// With `dirichlet_ghost` the ring outside r = L takes the odd reflection of
/// the last ring (zero trace), so no ring is lost; otherwise the outermost
/// valid ring is dropped.
inline GradientField cartesian_gradient(const ScalarField& f, int valid_rings,
                                        bool dirichlet_ghost = false) {
  const PolarGrid& g = f.grid;
  const int nt = g.n_theta();
  const int half = nt / 2;
  GradientField out{ScalarField(g, "d" + f.name + "/dx"), ScalarField(g, "d" + f.name + "/dy"), 0};
  const bool ghost = dirichlet_ghost && valid_rings == g.n_r();
  out.valid_rings = ghost ? valid_rings : valid_rings - 1;
  const std::vector<double> D = angular_derivative_matrix(nt);
  for (int i = 0; i < out.valid_rings; ++i) {
    const auto w = radial_derivative_weights(g, i);
    const double r = g.r(i);
    const double* ring = &f.values[g.index(i, 0)];
    for (int j = 0; j < nt; ++j) {
      const double fm = i == 0 ? f(0, j + half) : f(i - 1, j);
      const double fp = i + 1 < g.n_r() ? f(i + 1, j) : -f(i, j);
      const double fr = w[0] * fm + w[1] * f(i, j) + w[2] * fp;
      const double* row = &D[static_cast<std::size_t>(j) * nt];
      double ft = 0.0;
      for (int k = 0; k < nt; ++k) ft += row[k] * ring[k];
      const double c = g.cos_theta(j), s = g.sin_theta(j);
      out.dx(i, j) = c * fr - s * ft / r;
      out.dy(i, j) = s * fr + c * ft / r;
    }
  }
  return out;
}

/// Bilinear interpolation in (r, theta) of a cell-centred field. Points
/// inside the first ring interpolate across the pole.
inline double interpolate(const ScalarField& f, double x, double y) {
  const PolarGrid& g = f.grid;
  const double r = std::hypot(x, y);
  double th = std::atan2(y, x);
  if (th < 0.0) th += 2.0 * std::numbers::pi;
  const double tj = th / g.dtheta();
  const int j0 = static_cast<int>(std::floor(tj));
  const double wt = tj - j0;
  auto at_ring = [&](int i) { return (1.0 - wt) * f(i, j0) + wt * f(i, j0 + 1); };
  const auto& c = g.centers();
  if (r <= c.front()) {
    // segment between the mirrored ring (-r_0, theta + pi) and ring 0
    const int half = g.n_theta() / 2;
    const double fm = (1.0 - wt) * f(0, j0 + half) + wt * f(0, j0 + 1 + half);
    const double s = (r + c[0]) / (2.0 * c[0]);
    return (1.0 - s) * fm + s * at_ring(0);
  }
  if (r >= c.back()) return at_ring(g.n_r() - 1);
  const auto it = std::upper_bound(c.begin(), c.end(), r);
  const int i1 = static_cast<int>(it - c.begin());
  const int i0 = i1 - 1;
  const double s = (r - c[i0]) / (c[i1] - c[i0]);
  return (1.0 - s) * at_ring(i0) + s * at_ring(i1);
}

}  // namespace lubrigap
