#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lubrigap/io.hpp"
#include "lubrigap/sweep.hpp"

using namespace lubrigap;

namespace {

json base_config() {
  return json::parse(R"js({
    "geometry": {"kind": "sphere", "R": 2.0, "S": 2.0, "L": 1.0},
    "h_list": [1e-2, 3e-3, 1e-3, 3e-4],
    "grid": {"N_r": 256, "N_theta": 16},
    "data_case": "normal_const",
    "outputs": ["seminorm(0,1)", "fit"],
    "record_wall_time": false
  })js");
}

ErrorCode config_error(const json& j) {
  try {
    parse_sweep_config(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io;
}

}  // namespace

TEST(Format, ShortestRoundTrip) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::ldexp(u(rng), static_cast<int>(u(rng)));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-10), "1e-10");
}

TEST(Config, QuantityNames) {
  json j = base_config();
  j["outputs"] = {"seminorm(1, 1)", "seminorm(-0.5,1)", "gap_energy", "gap_energy(dz_par)", "closed_forms"};
  const SweepConfig c = parse_sweep_config(j);
  ASSERT_EQ(c.quantities.size(), 5u);
  EXPECT_EQ(c.quantities[0].name, "seminorm(1,1)");
  EXPECT_EQ(c.quantities[1].name, "seminorm(-0.5,1)");
  EXPECT_EQ(c.quantities[2].name, "gap_energy");
  EXPECT_EQ(c.quantities[3].name, "gap_energy(dz_par)");
  EXPECT_FALSE(c.fit);
}

TEST(Config, Rejections) {
  auto with = [](const char* key, json v) {
    json j = base_config();
    j[key] = std::move(v);
    return j;
  };
  EXPECT_EQ(config_error(with("h_list", {1e-3, 1e-2})), ErrorCode::config);
  EXPECT_EQ(config_error(with("h_list", json::array())), ErrorCode::config);
  EXPECT_EQ(config_error(with("h_list", {2.0})), ErrorCode::config);
  EXPECT_EQ(config_error(with("outputs", {"pressure"})), ErrorCode::config);
  EXPECT_EQ(config_error(with("outputs", {"seminorm(0,4)"})), ErrorCode::config);
  EXPECT_EQ(config_error(with("data_case", "nope")), ErrorCode::config);
  EXPECT_EQ(config_error(with("tol", 1e-2)), ErrorCode::config);
  EXPECT_EQ(config_error(with("variant", "outer")), ErrorCode::config);
  EXPECT_EQ(config_error(with("grid", {{"N_r", 16}, {"N_theta", 16}})), ErrorCode::config);
  EXPECT_EQ(config_error(with("grid", {{"N_theta", 18}})), ErrorCode::config);
  EXPECT_EQ(config_error(with("geometry", {{"kind", "cube"}, {"L", 1.0}})), ErrorCode::config);
  EXPECT_EQ(config_error(with("geometry", {{"kind", "sphere"}, {"R", "two"}, {"S", 2.0}, {"L", 1.0}})),
            ErrorCode::config);
  json custom = with("data_case", "custom");
  EXPECT_EQ(config_error(custom), ErrorCode::config);
  custom["custom_data"] = {{"w", {{7, 0, 1.0}}}};
  EXPECT_EQ(config_error(custom), ErrorCode::config);
  custom["custom_data"] = {{"w", {{2, 0, 1.0}}}, {"vx", 0.5}};
  EXPECT_EQ(config_error(custom), ErrorCode::io);
  json poly = with("geometry", {{"kind", "radial_poly"}, {"coeffs_t", {0.0, 0.25}}, {"coeffs_b", {0.0, -0.25}},
                                {"L", 1.0}});
  poly["outputs"] = {"closed_forms"};
  EXPECT_EQ(config_error(poly), ErrorCode::config);
}

TEST(Sweep, ConstModeFitAndRows) {
  const SweepResult res = run_sweep(parse_sweep_config(base_config()), 1);
  ASSERT_EQ(res.rows.size(), 4u);
  for (const auto& r : res.rows) {
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.quantity, "seminorm(0,1)");
    EXPECT_GT(r.iterations, 0);
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_EQ(r.wall_time_s, 0.0);
  }
  ASSERT_TRUE(res.fits.count("seminorm(0,1)"));
  const FitRecord& f = res.fits.at("seminorm(0,1)");
  ASSERT_TRUE(f.ok);
  EXPECT_NEAR(f.fit.a / (72.0 * std::numbers::pi), 1.0, 0.02);
  EXPECT_EQ(res.version, kVersion);
  EXPECT_EQ(res.config_hash.size(), 16u);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  const SweepConfig cfg = parse_sweep_config(base_config());
  const SweepResult a = run_sweep(cfg, 1);
  const SweepResult b = run_sweep(cfg, 3);
  EXPECT_EQ(report_csv(a), report_csv(b));
  EXPECT_EQ(report_json(a).dump(2), report_json(b).dump(2));
}

TEST(Sweep, JsonRoundTrip) {
  const SweepResult a = run_sweep(parse_sweep_config(base_config()), 1);
  const json j = json::parse(report_json(a).dump(2));
  const SweepResult b = parse_report(j);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].h, b.rows[k].h);
    EXPECT_EQ(a.rows[k].value, b.rows[k].value);
    EXPECT_EQ(a.rows[k].iterations, b.rows[k].iterations);
    EXPECT_EQ(a.rows[k].residual, b.rows[k].residual);
  }
  EXPECT_EQ(a.fits.at("seminorm(0,1)").fit.a, b.fits.at("seminorm(0,1)").fit.a);
  EXPECT_EQ(a.fits.at("seminorm(0,1)").fit.b, b.fits.at("seminorm(0,1)").fit.b);
  EXPECT_EQ(a.config_hash, b.config_hash);
  EXPECT_EQ(report_json(a).dump(), report_json(b).dump());
}

TEST(Sweep, ClosedFormRows) {
  json j = base_config();
  j["outputs"] = {"closed_forms"};
  const SweepResult res = run_sweep(parse_sweep_config(j), 1);
  ASSERT_EQ(res.rows.size(), 12u);
  EXPECT_EQ(res.rows[0].quantity, "energy_const_mode");
  EXPECT_EQ(res.rows[1].quantity, "energy_costheta_mode");
  EXPECT_EQ(res.rows[2].quantity, "expansion_total");
  EXPECT_NEAR(res.rows[0].value, 72.0 * std::numbers::pi * (100.0 - 0.75 * std::log(100.0)), 1e-9);
  EXPECT_EQ(res.rows[1].value, 0.0);
  EXPECT_EQ(res.rows[0].iterations, 0);
}

TEST(Sweep, FailedSolvesBecomeErrorRows) {
  json j = base_config();
  j["tol"] = 1e-300;
  j["grid"] = {{"N_r", 32}, {"N_theta", 8}};
  try {
    run_sweep(parse_sweep_config(j), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::sweep_failure);
  }

  SweepResult res = run_sweep(parse_sweep_config(base_config()), 1);
  SweepRow bad;
  bad.h = 1e-4;
  bad.quantity = "*";
  bad.value = std::nan("");
  bad.ok = false;
  bad.message = "solver-failure: stalled";
  res.rows.push_back(bad);
  const std::string csv = report_csv(res);
  EXPECT_EQ(csv.find("0.0001,"), std::string::npos);
  EXPECT_EQ(csv.rfind("h,quantity,value,iterations,residual,wall_time_s\n", 0), 0u);
  const json jr = report_json(res);
  EXPECT_EQ(jr["rows"][4]["status"], "error");
  EXPECT_TRUE(jr["rows"][4]["value"].is_null());
  const SweepResult back = parse_report(jr);
  EXPECT_FALSE(back.rows[4].ok);
  EXPECT_EQ(back.rows[4].message, "solver-failure: stalled");
}

TEST(Sweep, FitNeedsFourSamples) {
  json j = base_config();
  j["h_list"] = {1e-2, 1e-3, 1e-4};
  const SweepResult res = run_sweep(parse_sweep_config(j), 1);
  ASSERT_TRUE(res.fits.count("seminorm(0,1)"));
  EXPECT_FALSE(res.fits.at("seminorm(0,1)").ok);
  EXPECT_EQ(report_json(res)["fit"]["seminorm(0,1)"]["status"], "error");
  j["outputs"] = {"seminorm(0,1)"};
  EXPECT_FALSE(report_json(run_sweep(parse_sweep_config(j), 1)).contains("fit"));
}

TEST(Io, FieldCsvLayout) {
  const PolarGrid g = PolarGrid::uniform(1.0, 8, 8);
  const ScalarField f = ScalarField::sample(g, [](double x, double y) { return x + 2 * y; });
  const std::string s = field_csv(f);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 64);
  EXPECT_EQ(s.rfind("r,theta,x,y,value\n", 0), 0u);
}

TEST(Io, GeometrySpecRoundTrip) {
  const GeometrySpec g = parse_geometry(json{{"kind", "sphere"}, {"R", 2.0}, {"S", 3.0}, {"L", 0.5}, {"h", 1e-3}});
  const GeometrySpec g2 = parse_geometry(g.to_json());
  EXPECT_EQ(g2.R, 2.0);
  EXPECT_EQ(g2.S, 3.0);
  EXPECT_EQ(*g2.h, 1e-3);
  EXPECT_NEAR(g2.make(1e-2).gap(0.1, 0.0), g.sphere(1e-2).geometry().gap(0.1, 0.0), 0.0);
}
