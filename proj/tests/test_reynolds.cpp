#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lubrigap/reynolds.hpp"
#include "oracles.hpp"

using namespace lubrigap;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

ScalarField constant_source(const PolarGrid& g, double c) {
  return ScalarField::sample(g, [c](double, double) { return c; });
}

}  // namespace

TEST(Reynolds, FlatGapPoissonIsSecondOrder) {
  // gamma = h: -(h^3/12) Lap p = 1 gives p = 3 (L^2 - r^2) / h^3
  const double h = 0.5, L = 1.0;
  const GapGeometry geom = make_radial_poly_gap({0.0}, {0.0}, h, L);
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const PolarGrid g = PolarGrid::uniform(L, n, 16);
    const PressureSolution sol = solve_reynolds(geom, g, constant_source(g, 1.0));
    double err = 0.0;
    for (int i = 0; i < g.n_r(); ++i) {
      err = std::max(err, std::abs(sol.pressure(i, 0) - 3.0 * (L * L - g.r(i) * g.r(i)) / (h * h * h)));
    }
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 3.5) << "n_r = " << n;
    }
    prev = err;
  }
  EXPECT_LT(prev, 1e-3 * 3.0 / (h * h * h));
}

TEST(Reynolds, ConstModePressureMatchesQuadrature) {
  const double h = 1e-3;
  const SphereGap sg = make_sphere_gap(2.0, 2.0, h, 1.0);
  const PolarGrid g = PolarGrid::graded(1.0, 512, 16, std::sqrt(h));
  const PressureSolution sol = solve_reynolds(sg.geometry(), g, BoundaryData::normal_const());
  for (int i : {0, 20, 60, 150, 300, 500}) {
    const double ref = oracle::const_mode_pressure(2.0, 2.0, h, 1.0, g.r(i));
    EXPECT_NEAR(sol.pressure(i, 3), ref, 2e-4 * oracle::const_mode_pressure(2.0, 2.0, h, 1.0, 0.0)) << i;
  }
}

TEST(Reynolds, ConstModeEnergyMatchesQuadrature) {
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const SphereGap sg = make_sphere_gap(2.0, 2.0, h, 1.0);
    const PolarGrid g = PolarGrid::graded(1.0, 512, 16, std::sqrt(h));
    const PressureSolution sol = solve_reynolds(sg.geometry(), g, BoundaryData::normal_const());
    const double e = weighted_seminorm(sol, sg.geometry(), 0.0, 1);
    EXPECT_NEAR(e / oracle::const_mode_energy(2.0, 2.0, h, 1.0), 1.0, 2e-3) << "h = " << h;
  }
}

TEST(Reynolds, WeightedConstModeEnergyMatchesQuadrature) {
  for (double n : {1.0, 2.0}) {
    for (double h : {1e-2, 1e-4}) {
      const SphereGap sg = make_sphere_gap(2.0, 2.0, h, 1.0);
      const PolarGrid g = PolarGrid::graded(1.0, 512, 16, std::sqrt(h));
      const PressureSolution sol = solve_reynolds(sg.geometry(), g, BoundaryData::normal_const());
      const double e = weighted_seminorm(sol, sg.geometry(), n, 1);
      EXPECT_NEAR(e / oracle::const_mode_weighted_energy(2.0, 2.0, h, 1.0, n), 1.0, 2e-3)
          << "n = " << n << ", h = " << h;
    }
  }
}

TEST(Reynolds, FavorableDataEnergyMatchesQuadrature) {
  // equal spheres: gamma_t + gamma_b = 0, so f = w* = r^2
  for (double h : {1e-3, 1e-4}) {
    const SphereGap sg = make_sphere_gap(2.0, 2.0, h, 1.0);
    const PolarGrid g = PolarGrid::graded(1.0, 512, 16, std::sqrt(h));
    const PressureSolution sol = solve_reynolds(sg.geometry(), g, BoundaryData::favorable());
    const double e = weighted_seminorm(sol, sg.geometry(), -0.5, 1);
    EXPECT_NEAR(e / oracle::r2_source_energy(2.0, h, 1.0), 1.0, 2e-3) << "h = " << h;
  }
}

TEST(Reynolds, FirstOrderSeminormIsDiscreteEnergy) {
  const SphereGap sg = make_sphere_gap(2.0, 3.0, 1e-2, 1.0);
  const PolarGrid g = PolarGrid::graded(1.0, 64, 32, 0.1);
  const BoundaryData d = BoundaryData::costheta(1.0, 0.5);
  const PressureSolution sol = solve_reynolds(sg.geometry(), g, d);
  const ReynoldsOperator op(sg.geometry(), g);
  std::vector<double> ap(g.size());
  op.apply(sol.pressure.values, ap);
  double pap = 0.0;
  for (std::size_t k = 0; k < ap.size(); ++k) pap += sol.pressure.values[k] * ap[k];
  // A carries the factor 12 of the equation
  EXPECT_NEAR(weighted_seminorm(sol, sg.geometry(), 0.0, 1), pap, 1e-9 * pap);
}

TEST(Reynolds, SourceOfPolynomialData) {
  // gamma_t = r^2 / 4, gamma_b = -r^2 / 2, w* = 1 + x y, v* = (x, 0)
  const double h = 1e-2;
  const GapGeometry geom = make_radial_poly_gap({0.0, 0.25}, {0.0, -0.5}, h, 1.0);
  const BoundaryData d = BoundaryData::from_polynomials(Poly2({{0, 0, 1.0}, {1, 1, 1.0}}), Poly2({{1, 0, 1.0}}),
                                                        Poly2{});
  const PolarGrid g = PolarGrid::uniform(1.0, 32, 16);
  const ScalarField plain = assemble_source(geom, d, g, SourceVariant::plain);
  const ScalarField interior = assemble_source(geom, d, g, SourceVariant::interior);
  for (int i = 0; i < g.n_r(); ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      const double x = g.x(i, j), y = g.y(i, j), r2 = x * x + y * y;
      // div((gamma_t + gamma_b) v*) = -(3 x^2 + y^2) / 4
      const double f = 1.0 + x * y + 0.125 * (3.0 * x * x + y * y);
      EXPECT_NEAR(plain(i, j), f, 1e-8);
      EXPECT_NEAR(interior(i, j), f - 0.5 * (h + r2), 1e-8);
    }
  }
}

TEST(Reynolds, SourceRejectsNonFiniteData) {
  const GapGeometry geom = make_sphere_gap(2.0, 2.0, 1e-2, 1.0).geometry();
  const BoundaryData d = BoundaryData::make([](double x, double) { return 1.0 / (x - x); },
                                            [](double, double) { return Vec2{}; });
  try {
    assemble_source(geom, d, PolarGrid::uniform(1.0, 16, 8), SourceVariant::plain);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::data_evaluation);
  }
}

TEST(Reynolds, Linearity) {
  const double tol = 1e-10;
  const GapGeometry geom = make_sphere_gap(2.0, 3.0, 1e-3, 1.0).geometry();
  const PolarGrid g = PolarGrid::graded(1.0, 128, 32, std::sqrt(1e-3));
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f1(g), f2(g);
  for (auto& v : f1.values) v = u(rng);
  for (auto& v : f2.values) v = u(rng);
  const double a = 1.7, b = -0.6;
  ScalarField f3(g);
  for (std::size_t k = 0; k < f3.values.size(); ++k) f3.values[k] = a * f1.values[k] + b * f2.values[k];
  const auto p1 = solve_reynolds(geom, g, f1, tol), p2 = solve_reynolds(geom, g, f2, tol),
             p3 = solve_reynolds(geom, g, f3, tol);
  std::vector<double> diff(g.size());
  for (std::size_t k = 0; k < diff.size(); ++k) {
    diff[k] = p3.pressure.values[k] - (a * p1.pressure.values[k] + b * p2.pressure.values[k]);
  }
  // compare in the energy norm the residual controls
  const ReynoldsOperator op(geom, g);
  std::vector<double> adiff(g.size());
  op.apply(diff, adiff);
  const std::vector<double> rhs = op.rhs(f3);
  double rn = 0.0, bn = 0.0;
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    rn += adiff[k] * adiff[k];
    bn += rhs[k] * rhs[k];
  }
  EXPECT_LE(std::sqrt(rn / bn), 10.0 * tol);
  EXPECT_LE(max_abs(diff), 1e-6 * max_abs(p3.pressure.values));
}

TEST(Reynolds, QuarterTurnEquivariance) {
  const double tol = 1e-10;
  const GapGeometry geom = make_sphere_gap(2.0, 3.0, 1e-3, 1.0).geometry();
  const PolarGrid g = PolarGrid::graded(1.0, 128, 32, std::sqrt(1e-3));
  const auto px = solve_reynolds(geom, g, BoundaryData::costheta(1.0, 0.0), SourceVariant::plain, tol);
  const auto py = solve_reynolds(geom, g, BoundaryData::costheta(0.0, 1.0), SourceVariant::plain, tol);
  const int q = g.n_theta() / 4;
  double err = 0.0;
  for (int i = 0; i < g.n_r(); ++i) {
    for (int j = 0; j < g.n_theta(); ++j) err = std::max(err, std::abs(py.pressure(i, j + q) - px.pressure(i, j)));
  }
  EXPECT_LE(err, 10.0 * tol * max_abs(px.pressure.values));
}

TEST(Reynolds, DiscreteMaximumPrinciple) {
  const GapGeometry geom = make_sphere_gap(2.0, 3.0, 1e-3, 1.0).geometry();
  const PolarGrid g = PolarGrid::graded(1.0, 128, 32, std::sqrt(1e-3));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  const auto p = solve_reynolds(geom, g, f);
  for (double v : p.pressure.values) EXPECT_GT(v, 0.0);
  // a source supported on one ring: p peaks on that ring and decreases outwards
  ScalarField f2(g);
  for (int j = 0; j < g.n_theta(); ++j) f2(40, j) = 1.0;
  const auto p2 = solve_reynolds(geom, g, f2);
  const double peak = max_abs(p2.pressure.values);
  EXPECT_NEAR(p2.pressure(40, 5), peak, 1e-9 * peak);
  for (int i = 41; i < g.n_r(); ++i) EXPECT_LT(p2.pressure(i, 0), p2.pressure(i - 1, 0));
}

TEST(Reynolds, ZeroSourceNeedsNoIterations) {
  const GapGeometry geom = make_sphere_gap(2.0, 2.0, 1e-2, 1.0).geometry();
  const PolarGrid g = PolarGrid::uniform(1.0, 16, 8);
  const auto p = solve_reynolds(geom, g, ScalarField(g));
  EXPECT_EQ(p.iterations, 0);
  EXPECT_EQ(max_abs(p.pressure.values), 0.0);
}

TEST(Reynolds, SolverFailureCarriesDiagnostics) {
  const GapGeometry geom = make_sphere_gap(2.0, 2.0, 1e-3, 1.0).geometry();
  const PolarGrid g = PolarGrid::graded(1.0, 64, 16, std::sqrt(1e-3));
  try {
    solve_reynolds(geom, g, constant_source(g, 1.0), 1e-10, 5);
    FAIL();
  } catch (const SolverFailure& e) {
    EXPECT_EQ(e.code(), ErrorCode::solver_failure);
    EXPECT_EQ(e.iterations(), 5);
    EXPECT_GT(e.last_residual(), 1e-10);
  }
  EXPECT_THROW(solve_reynolds(geom, g, constant_source(g, 1.0), 0.0), Error);
  EXPECT_THROW(solve_reynolds(geom, g, constant_source(g, 1.0), 1e-3), Error);
}

TEST(Reynolds, SeminormArgumentChecks) {
  const GapGeometry geom = make_sphere_gap(2.0, 2.0, 1e-2, 1.0).geometry();
  const PolarGrid g = PolarGrid::uniform(1.0, 48, 16);
  const auto p = solve_reynolds(geom, g, BoundaryData::normal_const());
  try {
    weighted_seminorm(p, geom, 0.0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::resolution);
  }
  EXPECT_THROW(weighted_seminorm(p, geom, -3.5, 1), Error);
  EXPECT_THROW(weighted_seminorm(p, geom, 0.0, 4), Error);
  EXPECT_GT(weighted_seminorm(p, geom, -0.5, 1), 0.0);
}

TEST(Reynolds, SecondOrderSeminormOfParabola) {
  // flat gap, p = 3 (L^2 - r^2) / h^3: |D^2 p|^2 = 72 / h^6
  const double h = 0.5;
  const GapGeometry geom = make_radial_poly_gap({0.0}, {0.0}, h, 1.0);
  const PolarGrid g = PolarGrid::uniform(1.0, 256, 32);
  const auto p = solve_reynolds(geom, g, constant_source(g, 1.0));
  const double full = 72.0 / std::pow(h, 3) * std::numbers::pi;
  const double v = weighted_seminorm(p, geom, 0.0, 2);
  EXPECT_NEAR(v / full, 1.0, 0.03);
  EXPECT_LT(weighted_seminorm(p, geom, 0.0, 3), 1e-2 * full);
}
