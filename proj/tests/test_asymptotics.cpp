#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lubrigap/asymptotics.hpp"
#include "lubrigap/fit.hpp"
#include "lubrigap/reynolds.hpp"
#include "oracles.hpp"

using namespace lubrigap;

constexpr double pi = std::numbers::pi;

TEST(ClosedForms, ConstModeAgreesWithQuadratureAsymptotically) {
  // fit of the exact radial energy isolates the 1/h and |ln h| coefficients
  std::vector<double> h{1e-5, 3e-6, 1e-6, 3e-7, 1e-7, 3e-8};
  std::vector<double> v;
  for (double x : h) v.push_back(oracle::const_mode_energy(2.0, 2.0, x, 1.0));
  const ScalingFit f = fit_scaling(h, v);
  const double R3 = std::cbrt(4.0);
  const double lead = energy_const_mode(1.0, R3, 1.0, 1e-6);
  const double lead2 = energy_const_mode(1.0, R3, 1.0, 1e-7);
  EXPECT_NEAR(f.a, 72.0 * pi, 1e-5 * 72.0 * pi);
  EXPECT_NEAR(f.b, -54.0 * pi, 0.01 * 54.0 * pi);
  // the closed form carries exactly these two terms
  EXPECT_NEAR((lead - lead2) , 72.0 * pi * (1e6 - 1e7) + 54.0 * pi * std::log(10.0), 1e-6 * 72.0 * pi * 1e7);
}

TEST(ClosedForms, ConstModeScalesWithRadii) {
  const double R1 = 1.5, R3 = 2.0, h = 1e-3;
  EXPECT_NEAR(energy_const_mode(R1, R3, 2.0, h),
              4.0 * 72.0 * pi * (R1 * R1 / h - 3.0 * std::pow(R1, 4) / 8.0 * std::log(1.0 / h)), 1e-9);
  EXPECT_NEAR(energy_costheta_mode(1.0, 3.0, 4.0, h), 25.0 * 288.0 * pi / 5.0 * std::log(1.0 / h), 1e-9);
}

TEST(ClosedForms, RegimeChecks) {
  for (double h : {0.0, 1.0, 2.0, -1e-3}) {
    try {
      energy_const_mode(1.0, 1.0, 1.0, h);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::out_of_regime);
    }
    EXPECT_THROW(energy_costheta_mode(1.0, 1.0, 0.0, h), Error);
  }
}

TEST(ClosedForms, RadialPressureMatchesIndependentQuadrature) {
  const double h = 1e-4;
  const SphereGap sg = make_sphere_gap(2.0, 3.0, h, 1.0);
  for (double r : {0.0, 1e-3, 1e-2, 0.1, 0.5, 0.99}) {
    const double ref = oracle::const_mode_pressure(2.0, 3.0, h, 1.0, r);
    EXPECT_NEAR(radial_pressure_const(sg, 1.0, r), ref, 1e-9 * std::max(ref, 1.0));
  }
  EXPECT_EQ(radial_pressure_const(sg, 1.0, 1.0), 0.0);
  EXPECT_THROW(radial_pressure_const(sg, 1.0, 1.5), Error);
}

TEST(Expansion, EqualSpheres) {
  const EnergyExpansion e = stokes_energy_expansion(2.0, 2.0, 1.0, {}, {}, 1e-3);
  EXPECT_NEAR(e.R1, 1.0, 1e-15);
  EXPECT_NEAR(e.parts.const_mode_1_over_h, 6.0 * pi, 1e-12);
  // 16/5 - 8/4 - 3/4 = 0.45
  EXPECT_NEAR(e.parts.const_mode_log, 6.0 * pi * 0.45, 1e-12);
  EXPECT_EQ(e.parts.couette_log, 0.0);
  EXPECT_EQ(e.parts.gradient_log, 0.0);
  EXPECT_NEAR(e.value(std::exp(-1.0)), 6.0 * pi * (std::exp(1.0) + 0.45), 1e-12);
  EXPECT_NEAR(e.total(), 6.0 * pi * (1e3 + 0.45 * std::log(1e3)), 1e-9);
}

TEST(Expansion, CouetteAndGradientParts) {
  const double R = 2.0, S = 6.0;
  const EnergyExpansion e = stokes_energy_expansion(R, S, 0.0, {3.0, 4.0}, {0.0, 0.0}, 1e-3);
  EXPECT_NEAR(e.parts.couette_log, 2.0 * pi * 1.5 * 25.0, 1e-12);
  // sigma (S - R) / (2 (R + S)) u_par with R1 = 1.5
  const double m = 4.0 / 16.0;
  EXPECT_NEAR(e.parts.gradient_log, 24.0 * pi / 5.0 * 1.5 * m * m * 25.0, 1e-12);
  const EnergyExpansion p = stokes_energy_expansion(R, S, 0.0, {3.0, 4.0}, {1.0, 0.0}, 1e-3, MixingSign::proof);
  const EnergyExpansion t = stokes_energy_expansion(R, S, 0.0, {3.0, 4.0}, {1.0, 0.0}, 1e-3, MixingSign::theorem);
  EXPECT_NE(p.parts.gradient_log, t.parts.gradient_log);
  // equal radii cannot tell the signs apart
  const EnergyExpansion p2 = stokes_energy_expansion(2.0, 2.0, 0.0, {3.0, 4.0}, {1.0, 0.0}, 1e-3, MixingSign::proof);
  const EnergyExpansion t2 = stokes_energy_expansion(2.0, 2.0, 0.0, {3.0, 4.0}, {1.0, 0.0}, 1e-3);
  EXPECT_EQ(p2.parts.gradient_log, t2.parts.gradient_log);
  EXPECT_THROW(stokes_energy_expansion(-1.0, 2.0, 1.0, {}, {}, 1e-3), Error);
}

TEST(ProfileOde, FarFieldDecay) {
  const OdeSolution s = solve_profile_ode(1.0, 200.0, 8000);
  EXPECT_NEAR(s.s3q_end, 9.6, 0.096);
  EXPECT_NEAR(s.s4dq_end, -28.8, 0.576);
  EXPECT_NEAR(s.far_field_coeff, 48.0 / 5.0, 0.05);
  EXPECT_LT(s.far_field_residual, 0.05);
  EXPECT_GE(profile_ode_convergence_ratio(1.0, 200.0, 8000), 3.5);
}

TEST(ProfileOde, CubicScalingInR1) {
  const OdeSolution a = solve_profile_ode(1.0, 400.0, 8000);
  const OdeSolution b = solve_profile_ode(2.0, 400.0, 8000);
  EXPECT_NEAR(b.far_field_coeff / a.far_field_coeff, 8.0, 0.1);
}

TEST(ProfileOde, ArgumentChecks) {
  EXPECT_THROW(solve_profile_ode(0.0, 200.0, 8000), Error);
  EXPECT_THROW(solve_profile_ode(1.0, 20.0, 8000), Error);
  EXPECT_THROW(solve_profile_ode(1.0, 200.0, 100), Error);
}

TEST(CosThetaOde, MatchesTwoDimensionalSolve) {
  const double h = 1e-2;
  const SphereGap sg = make_sphere_gap(2.0, 2.0, h, 1.0);
  const CosThetaProfile p = solve_costheta_ode(sg, 2048);
  const PolarGrid g = PolarGrid::graded(1.0, 512, 32, std::sqrt(h));
  const PressureSolution sol = solve_reynolds(sg.geometry(), g, BoundaryData::costheta());
  EXPECT_NEAR(weighted_seminorm(sol, sg.geometry(), 0.0, 1) / p.energy, 1.0, 2e-3);
  EXPECT_THROW(solve_costheta_ode(sg, 256), Error);
}

TEST(CosThetaOde, LogCoefficient) {
  std::vector<double> h{1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6};
  std::vector<double> v;
  for (double x : h) v.push_back(solve_costheta_ode(make_sphere_gap(2.0, 2.0, x, 1.0), 4096).energy);
  const ScalingFit f = fit_scaling(h, v);
  EXPECT_NEAR(f.b / (288.0 * pi / 5.0), 1.0, 0.03);
  EXPECT_LT(std::abs(f.a), 1e-3 * f.b);
}
