#pragma once

// h-sweeps: solve the same geometry/data case over a decreasing list of gap
// widths, collect the requested quantities, and fit a/h + b ln(1/h) + c.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include "lubrigap/asymptotics.hpp"
#include "lubrigap/contact.hpp"
#include "lubrigap/field.hpp"
#include "lubrigap/fit.hpp"
#include "lubrigap/io.hpp"
#include "lubrigap/reynolds.hpp"

#ifndef LUBRIGAP_VERSION
#define LUBRIGAP_VERSION "0.1.0"
#endif

namespace lubrigap {

inline constexpr const char* kVersion = LUBRIGAP_VERSION;

struct GridSpec {
  int n_r = 512;
  int n_theta = 64;
  RadialSpacing spacing = RadialSpacing::graded;
  double stretch = 1.0;  // graded length scale = stretch * sqrt(h)

  PolarGrid make(double L, double h) const {
    if (spacing == RadialSpacing::uniform) return PolarGrid::uniform(L, n_r, n_theta);
    return PolarGrid::graded(L, n_r, n_theta, stretch * std::sqrt(h));
  }
};

/// One requested output: seminorm(n, k), gap_energy(terms) or closed forms.
struct Quantity {
  enum class Kind { seminorm, gap_energy, closed_forms } kind = Kind::seminorm;
  double n = 0.0;
  int k = 1;
  EnergyTerm term = EnergyTerm::all;
  std::string name;
};

struct SweepConfig {
  GeometrySpec geometry;
  std::vector<double> h_list;
  GridSpec grid;
  std::string data_case = "normal_const";
  json custom_data;
  std::vector<Quantity> quantities;
  bool fit = false;
  double tol = 1e-10;
  bool cutoff = true;
  SourceVariant variant = SourceVariant::plain;
  bool record_wall_time = true;
  int threads = 0;  // 0: all cores
  json source;      // the document the config was read from

  BoundaryData data() const { return make_data_case(data_case, custom_data); }
};

namespace detail {

inline Quantity parse_quantity(const std::string& s) {
  static const std::regex sem(R"(^\s*seminorm\(\s*([-+0-9.eE]+)\s*,\s*([0-9]+)\s*\)\s*$)");
  static const std::regex ene(R"(^\s*gap_energy(\(\s*(all|dz_par|horizontal)\s*\))?\s*$)");
  std::smatch m;
  Quantity q;
  if (std::regex_match(s, m, sem)) {
    q.kind = Quantity::Kind::seminorm;
    try {
      q.n = std::stod(m[1].str());
    } catch (const std::exception&) {
      throw Error(ErrorCode::config, "bad seminorm weight in '" + s + "'");
    }
    q.k = std::stoi(m[2].str());
    if (q.k < 1 || q.k > 3) throw Error(ErrorCode::config, "seminorm order must be 1, 2 or 3 in '" + s + "'");
    q.name = "seminorm(" + format_double(q.n) + "," + std::to_string(q.k) + ")";
    return q;
  }
  if (std::regex_match(s, m, ene)) {
    q.kind = Quantity::Kind::gap_energy;
    const std::string t = m[2].matched ? m[2].str() : "all";
    q.term = t == "dz_par" ? EnergyTerm::dz_par : (t == "horizontal" ? EnergyTerm::horizontal : EnergyTerm::all);
    q.name = t == "all" ? "gap_energy" : "gap_energy(" + t + ")";
    return q;
  }
  if (s == "closed_forms") {
    q.kind = Quantity::Kind::closed_forms;
    q.name = s;
    return q;
  }
  throw Error(ErrorCode::config, "unknown output '" + s + "'");
}

// FNV-1a over the canonical dump; stable across platforms and runs.
inline std::string hash_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

inline SweepConfig parse_sweep_config(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::config, "sweep config must be a JSON object");
  SweepConfig c;
  c.source = j;
  if (!j.contains("geometry")) throw Error(ErrorCode::config, "missing key 'geometry'");
  c.geometry = parse_geometry(j.at("geometry"));
  if (j.contains("h_list")) {
    c.h_list = detail::get_numbers(j, "h_list");
  } else if (c.geometry.h) {
    c.h_list = {*c.geometry.h};
  }
  if (c.h_list.empty()) throw Error(ErrorCode::config, "h_list must not be empty");
  for (std::size_t k = 0; k < c.h_list.size(); ++k) {
    const double h = c.h_list[k];
    if (!(h > 0.0 && h < 1.0)) throw Error(ErrorCode::config, "every h must lie in (0, 1)");
    if (k > 0 && !(h < c.h_list[k - 1])) throw Error(ErrorCode::config, "h_list must be strictly decreasing");
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    c.grid.n_r = g.value("N_r", c.grid.n_r);
    c.grid.n_theta = g.value("N_theta", c.grid.n_theta);
    const std::string sp = g.value("spacing", std::string("graded"));
    if (sp != "graded" && sp != "uniform") throw Error(ErrorCode::config, "grid spacing must be graded or uniform");
    c.grid.spacing = sp == "graded" ? RadialSpacing::graded : RadialSpacing::uniform;
    c.grid.stretch = g.value("stretch", c.grid.stretch);
    if (!(c.grid.stretch > 0.0)) throw Error(ErrorCode::config, "grid stretch must be positive");
  }
  if (c.grid.n_r < 8 || c.grid.n_theta < 8 || c.grid.n_theta % 4 != 0) {
    throw Error(ErrorCode::config, "grid needs N_r >= 8 and N_theta >= 8, a multiple of 4");
  }
  c.data_case = j.value("data_case", c.data_case);
  if (j.contains("custom_data")) c.custom_data = j.at("custom_data");
  (void)c.data();  // validates the case and any custom polynomials
  const json outputs = j.value("outputs", json::array({"seminorm(0,1)"}));
  if (!outputs.is_array()) throw Error(ErrorCode::config, "outputs must be a list");
  for (const auto& o : outputs) {
    if (!o.is_string()) throw Error(ErrorCode::config, "outputs must be strings");
    const std::string s = o.get<std::string>();
    if (s == "fit") {
      c.fit = true;
      continue;
    }
    Quantity q = detail::parse_quantity(s);
    if (q.kind == Quantity::Kind::seminorm && c.grid.n_r < 32 * q.k) {
      throw Error(ErrorCode::config, q.name + " needs N_r >= " + std::to_string(32 * q.k));
    }
    if (q.kind == Quantity::Kind::closed_forms && !c.geometry.is_sphere()) {
      throw Error(ErrorCode::config, "closed_forms needs a sphere geometry");
    }
    c.quantities.push_back(q);
  }
  if (c.quantities.empty()) throw Error(ErrorCode::config, "no quantities requested");
  c.tol = j.value("tol", c.tol);
  if (!(c.tol > 0.0 && c.tol <= 1e-4)) throw Error(ErrorCode::config, "tol must be in (0, 1e-4]");
  c.cutoff = j.value("cutoff", c.cutoff);
  const std::string variant = j.value("variant", std::string("plain"));
  if (variant != "plain" && variant != "interior") throw Error(ErrorCode::config, "variant must be plain or interior");
  c.variant = variant == "plain" ? SourceVariant::plain : SourceVariant::interior;
  c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
  c.threads = j.value("threads", 0);
  return c;
}

struct SweepRow {
  double h = 0.0;
  std::string quantity;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double wall_time_s = 0.0;
  bool ok = true;
  std::string message;
};

struct FitRecord {
  bool ok = false;
  ScalingFit fit;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool fit_requested = false;
  std::map<std::string, FitRecord> fits;
  std::string config_hash;
  std::string version = kVersion;
  json config;

  /// Successful (h, value) pairs of one quantity, in row order.
  std::pair<std::vector<double>, std::vector<double>> series(const std::string& quantity) const {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (const auto& r : rows) {
      if (r.ok && r.quantity == quantity) {
        out.first.push_back(r.h);
        out.second.push_back(r.value);
      }
    }
    return out;
  }
};

/// Fit every solved quantity with at least 4 successful samples.
inline void refit(SweepResult& res) {
  res.fits.clear();
  if (!res.fit_requested) return;
  std::vector<std::string> names;
  for (const auto& r : res.rows) {
    if (std::find(names.begin(), names.end(), r.quantity) == names.end()) names.push_back(r.quantity);
  }
  for (const auto& name : names) {
    auto [hs, vs] = res.series(name);
    FitRecord rec;
    try {
      rec.fit = fit_scaling(hs, vs);
      rec.ok = true;
    } catch (const Error& e) {
      rec.message = e.what();
    }
    res.fits[name] = rec;
  }
}

namespace detail {

inline std::vector<SweepRow> run_one(const SweepConfig& cfg, double h) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] {
    return cfg.record_wall_time ? std::chrono::duration<double>(clock::now() - t0).count() : 0.0;
  };
  std::vector<SweepRow> rows;
  try {
    const GapGeometry geom = cfg.geometry.make(h);
    const PolarGrid grid = cfg.grid.make(cfg.geometry.L, h);
    validate_contact(geom, grid);
    const BoundaryData data = cfg.data();
    bool need_solve = false;
    for (const auto& q : cfg.quantities) need_solve = need_solve || q.kind != Quantity::Kind::closed_forms;
    std::optional<PressureSolution> sol;
    std::optional<ApertureField> field;
    if (need_solve) sol = solve_reynolds(geom, grid, assemble_source(geom, data, grid, cfg.variant), cfg.tol);
    for (const auto& q : cfg.quantities) {
      SweepRow row;
      row.h = h;
      row.quantity = q.name;
      if (sol) {
        row.iterations = sol->iterations;
        row.residual = sol->residual;
      }
      switch (q.kind) {
        case Quantity::Kind::seminorm:
          row.value = weighted_seminorm(*sol, geom, q.n, q.k);
          break;
        case Quantity::Kind::gap_energy:
          if (!field) field.emplace(geom, *sol, data, cfg.cutoff);
          row.value = gap_energy(*field, q.term);
          break;
        case Quantity::Kind::closed_forms: {
          const SphereGap sg = cfg.geometry.sphere(h);
          row.iterations = 0;
          row.residual = 0.0;
          SweepRow a = row, b = row, c = row;
          a.quantity = "energy_const_mode";
          a.value = energy_const_mode(sg.R1, sg.R3, data.w0, h);
          b.quantity = "energy_costheta_mode";
          b.value = energy_costheta_mode(sg.R1, data.grad_w0.x, data.grad_w0.y, h);
          c.quantity = "expansion_total";
          c.value = stokes_energy_expansion(sg.R, sg.S, data.w0, data.v0, data.grad_w0, h).total();
          a.wall_time_s = b.wall_time_s = c.wall_time_s = elapsed();
          rows.push_back(a);
          rows.push_back(b);
          rows.push_back(c);
          continue;
        }
      }
      row.wall_time_s = elapsed();
      rows.push_back(row);
    }
  } catch (const SolverFailure& e) {
    rows.clear();
    SweepRow row;
    row.h = h;
    row.quantity = "*";
    row.value = std::numeric_limits<double>::quiet_NaN();
    row.iterations = static_cast<int>(e.iterations());
    row.residual = e.last_residual();
    row.ok = false;
    row.message = e.what();
    row.wall_time_s = elapsed();
    rows.push_back(row);
  } catch (const Error& e) {
    rows.clear();
    SweepRow row;
    row.h = h;
    row.quantity = "*";
    row.value = std::numeric_limits<double>::quiet_NaN();
    row.ok = false;
    row.message = e.what();
    row.wall_time_s = elapsed();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

/// Solve every h on a pool of worker threads; rows come back in h order
/// whatever the completion order. A failing h yields an error row.
inline SweepResult run_sweep(const SweepConfig& cfg, int threads = 0) {
  if (cfg.h_list.empty()) throw Error(ErrorCode::config, "h_list must not be empty");
  if (threads <= 0) threads = cfg.threads;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<int>(threads, static_cast<int>(cfg.h_list.size()));

  std::vector<std::vector<SweepRow>> per_h(cfg.h_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cfg.h_list.size(); k = next++) per_h[k] = detail::run_one(cfg, cfg.h_list[k]);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult res;
  res.fit_requested = cfg.fit;
  res.config = cfg.source;
  res.config_hash = detail::hash_hex(cfg.source.dump());
  bool any_ok = false;
  std::string first_error;
  for (auto& rows : per_h) {
    for (auto& r : rows) {
      any_ok = any_ok || r.ok;
      if (!r.ok && first_error.empty()) first_error = r.message;
      res.rows.push_back(std::move(r));
    }
  }
  if (!any_ok) throw Error(ErrorCode::sweep_failure, "every h failed; first error: " + first_error);
  refit(res);
  return res;
}

enum class ReportFormat { csv, json };

inline json fit_to_json(const FitRecord& rec) {
  if (!rec.ok) return json{{"status", "error"}, {"message", rec.message}};
  const ScalingFit& f = rec.fit;
  json cov = json::array();
  for (int i = 0; i < 3; ++i) cov.push_back({f.covariance(i, 0), f.covariance(i, 1), f.covariance(i, 2)});
  return json{{"status", "ok"},          {"a", f.a},
              {"b", f.b},                {"c", f.c},
              {"rms_residual", f.rms_residual}, {"normal_residual", f.normal_residual},
              {"covariance", cov},       {"h_samples", f.h_samples},
              {"values", f.values}};
}

inline json report_json(const SweepResult& res) {
  json j;
  j["provenance"] = {{"config_hash", res.config_hash}, {"version", res.version}};
  j["config"] = res.config;
  json rows = json::array();
  for (const auto& r : res.rows) {
    json row{{"h", r.h},
             {"quantity", r.quantity},
             {"iterations", r.iterations},
             {"wall_time_s", r.wall_time_s},
             {"status", r.ok ? "ok" : "error"}};
    row["value"] = r.ok ? json(r.value) : json(nullptr);
    row["residual"] = std::isfinite(r.residual) ? json(r.residual) : json(nullptr);
    if (!r.ok) row["message"] = r.message;
    rows.push_back(row);
  }
  j["rows"] = rows;
  if (res.fit_requested) {
    json fits = json::object();
    for (const auto& [name, rec] : res.fits) fits[name] = fit_to_json(rec);
    j["fit"] = fits;
  }
  return j;
}

/// CSV: h,quantity,value,iterations,residual,wall_time_s with shortest
/// round-trip numbers. Failed h values have no value and are left out.
inline std::string report_csv(const SweepResult& res) {
  std::string s = "h,quantity,value,iterations,residual,wall_time_s\n";
  for (const auto& r : res.rows) {
    if (!r.ok) continue;
    s += format_double(r.h) + ',' + r.quantity + ',' + format_double(r.value) + ',' +
         std::to_string(r.iterations) + ',' + format_double(r.residual) + ',' + format_double(r.wall_time_s) +
         '\n';
  }
  return s;
}

inline void write_report(const SweepResult& res, const std::string& path, ReportFormat format) {
  if (res.rows.empty()) throw Error(ErrorCode::invalid_parameter, "empty sweep result");
  write_text(path, format == ReportFormat::csv ? report_csv(res) : report_json(res).dump(2) + "\n");
}

/// Inverse of report_json.
inline SweepResult parse_report(const json& j) {
  if (!j.is_object() || !j.contains("rows")) throw Error(ErrorCode::config, "not a sweep report");
  SweepResult res;
  res.config = j.value("config", json());
  if (j.contains("provenance")) {
    res.config_hash = j["provenance"].value("config_hash", std::string());
    res.version = j["provenance"].value("version", std::string());
  }
  for (const auto& r : j.at("rows")) {
    SweepRow row;
    row.h = r.at("h").get<double>();
    row.quantity = r.at("quantity").get<std::string>();
    row.ok = r.value("status", std::string("ok")) == "ok";
    row.value = r.at("value").is_null() ? std::numeric_limits<double>::quiet_NaN() : r.at("value").get<double>();
    row.iterations = r.value("iterations", 0);
    row.residual =
        r.at("residual").is_null() ? std::numeric_limits<double>::quiet_NaN() : r.at("residual").get<double>();
    row.wall_time_s = r.value("wall_time_s", 0.0);
    row.message = r.value("message", std::string());
    res.rows.push_back(row);
  }
  res.fit_requested = j.contains("fit");
  if (res.fit_requested) refit(res);
  return res;
}

inline SweepResult read_report(const std::string& path) { return parse_report(read_json(path)); }

}  // namespace lubrigap
