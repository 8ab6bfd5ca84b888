// lubrigap: command-line front end for the lubrication library.
//
//   lubrigap validate --config geom.json
//   lubrigap solve    --config case.json [--out diag.json]
//   lubrigap sweep    --config sweep.json --out report.csv
//   lubrigap ode      --config ode.json
//   lubrigap expand   --config sphere.json [--format csv]
//   lubrigap fit      --config report.json
//
// Exit codes: 0 success, 2 configuration or degenerate-contact error,
// 3 solver failure, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "lubrigap/asymptotics.hpp"
#include "lubrigap/contact.hpp"
#include "lubrigap/field.hpp"
#include "lubrigap/io.hpp"
#include "lubrigap/reynolds.hpp"
#include "lubrigap/sweep.hpp"

using namespace lubrigap;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format;  // empty: csv for a .csv output file, json otherwise
  double tol = 1e-10;
  int threads = 0;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_text(opt.out, text);
  }
}

int thread_count(const Options& opt) {
  if (const char* env = std::getenv("LUBRIGAP_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::config, "LUBRIGAP_THREADS must be a positive integer");
  }
  return opt.threads;
}

json load_config(const Options& opt) {
  if (opt.config.empty()) throw Error(ErrorCode::config, "--config is required");
  if (!std::filesystem::is_regular_file(opt.config)) throw Error(ErrorCode::config, "cannot read '" + opt.config + "'");
  return read_json(opt.config);
}

int cmd_validate(const Options& opt) {
  const json j = load_config(opt);
  const GeometrySpec spec = parse_geometry(j.contains("geometry") ? j.at("geometry") : j);
  if (!spec.h) throw Error(ErrorCode::config, "geometry needs h");
  const int n_r = j.value("N_r", 256), n_theta = j.value("N_theta", 64);
  const GapGeometry geom = spec.make(*spec.h);
  const PolarGrid grid = PolarGrid::uniform(spec.L, n_r, n_theta);
  const ConstantsReport rep = assess_contact(geom, grid, j.value("k_max", 2));
  emit(opt, to_json(rep).dump(2) + "\n");
  if (!rep.ok()) {
    std::cerr << "degenerate_contact:";
    for (const auto& v : rep.violations) std::cerr << ' ' << v << ';';
    std::cerr << '\n';
    return 2;
  }
  return 0;
}

int cmd_solve(const Options& opt) {
  json j = load_config(opt);
  j["tol"] = opt.tol;
  const SweepConfig cfg = parse_sweep_config(j);
  const double h = cfg.h_list.front();
  const GapGeometry geom = cfg.geometry.make(h);
  const PolarGrid grid = cfg.grid.make(cfg.geometry.L, h);
  const ConstantsReport rep = validate_contact(geom, grid);
  const BoundaryData data = cfg.data();
  const PressureSolution sol = solve_reynolds(geom, grid, assemble_source(geom, data, grid, cfg.variant), cfg.tol);
  const ApertureField field(geom, sol, data, cfg.cutoff);
  const EnergyBreakdown e = field.energy_breakdown();
  json out;
  out["solver"] = diagnostics_json(sol);
  out["contact"] = to_json(rep);
  out["seminorm(0,1)"] = weighted_seminorm(sol, geom, 0.0, 1);
  out["gap_energy"] = {{"all", e.all},           {"dz_par", e.dz_par},
                       {"horizontal", e.horizontal}, {"dz_poiseuille", e.dz_poiseuille},
                       {"dz_couette", e.dz_couette}, {"dz_cross", e.dz_cross}};
  if (grid.n_r() >= 16 && grid.n_theta() >= 16) out["divergence_residual"] = divergence_residual(field, 32);
  const auto top = boundary_trace_error(field, Surface::top);
  const auto bottom = boundary_trace_error(field, Surface::bottom);
  out["trace_error"] = {{"top_tangential", top[0]},
                        {"top_normal", top[1]},
                        {"bottom_tangential", bottom[0]},
                        {"bottom_normal", bottom[1]},
                        {"velocity_scale", field.velocity_scale()}};
  if (j.contains("pressure_csv")) write_text(j["pressure_csv"].get<std::string>(), field_csv(sol.pressure));
  if (j.contains("velocity_csv")) {
    write_text(j["velocity_csv"].get<std::string>(), velocity_csv(field, 8, j.value("velocity_stride", 4)));
  }
  emit(opt, out.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Options& opt) {
  json j = load_config(opt);
  if (!j.contains("tol")) j["tol"] = opt.tol;
  const SweepConfig cfg = parse_sweep_config(j);
  const SweepResult res = run_sweep(cfg, thread_count(opt));
  const ReportFormat fmt = opt.format == "csv" ? ReportFormat::csv : ReportFormat::json;
  if (opt.out.empty()) {
    std::cout << (fmt == ReportFormat::csv ? report_csv(res) : report_json(res).dump(2) + "\n");
  } else {
    write_report(res, opt.out, fmt);
  }
  for (const auto& r : res.rows) {
    if (!r.ok) std::cerr << "h=" << format_double(r.h) << " failed: " << r.message << '\n';
  }
  return 0;
}

int cmd_ode(const Options& opt) {
  const json j = load_config(opt);
  json out;
  if (j.contains("geometry")) {
    const GeometrySpec spec = parse_geometry(j.at("geometry"));
    if (!spec.h) throw Error(ErrorCode::config, "geometry needs h");
    const CosThetaProfile p = solve_costheta_ode(spec.sphere(*spec.h), j.value("N", 2048));
    out = {{"kind", "costheta"}, {"h", p.h}, {"energy", p.energy}, {"N", static_cast<int>(p.r.size()) - 1}};
    if (*spec.h < 1.0) {
      const SphereGap sg = spec.sphere(*spec.h);
      out["closed_form_log_term"] = energy_costheta_mode(sg.R1, 1.0, 0.0, *spec.h);
    }
  } else {
    const double R1 = j.value("R1", 1.0), s_max = j.value("s_max", 200.0);
    const int n = j.value("N", 8000);
    const OdeSolution s = solve_profile_ode(R1, s_max, n);
    const double c_ref = 48.0 * R1 * R1 * R1 / 5.0;
    out = {{"kind", "profile"},
           {"R1", R1},
           {"s_max", s_max},
           {"N", n},
           {"far_field_coeff", s.far_field_coeff},
           {"far_field_residual", s.far_field_residual},
           {"s3q_end", s.s3q_end},
           {"s4dq_end", s.s4dq_end},
           {"decay_reference", {{"s3q", c_ref}, {"s4dq", -3.0 * c_ref}}},
           {"convergence_ratio", profile_ode_convergence_ratio(R1, s_max, n)}};
  }
  emit(opt, out.dump(2) + "\n");
  return 0;
}

int cmd_expand(const Options& opt) {
  const json j = load_config(opt);
  const GeometrySpec spec = parse_geometry(j.contains("geometry") ? j.at("geometry") : j);
  if (!spec.is_sphere()) throw Error(ErrorCode::config, "expand needs a sphere geometry");
  if (!spec.h) throw Error(ErrorCode::config, "geometry needs h");
  auto vec = [&](const char* key) {
    if (!j.contains(key)) return Vec2{};
    const auto v = detail::get_numbers(j, key);
    if (v.size() != 2) throw Error(ErrorCode::config, std::string(key) + " must have two components");
    return Vec2{v[0], v[1]};
  };
  const std::string sign = j.value("mixing_sign", std::string("theorem"));
  if (sign != "theorem" && sign != "proof") throw Error(ErrorCode::config, "mixing_sign must be theorem or proof");
  const EnergyExpansion e =
      stokes_energy_expansion(spec.R, spec.S, j.value("u_perp0", 1.0), vec("u_par0"), vec("grad_u_perp0"), *spec.h,
                              sign == "theorem" ? MixingSign::theorem : MixingSign::proof);
  const double h = *spec.h, lg = std::abs(std::log(h));
  const std::pair<const char*, double> parts[] = {{"const_mode_1_over_h", e.parts.const_mode_1_over_h / h},
                                                  {"const_mode_log", e.parts.const_mode_log * lg},
                                                  {"couette_log", e.parts.couette_log * lg},
                                                  {"gradient_log", e.parts.gradient_log * lg}};
  if (opt.format == "csv") {
    std::string s = "part,value\n";
    for (const auto& [name, v] : parts) s += std::string(name) + ',' + format_double(v) + '\n';
    s += "total," + format_double(e.total()) + '\n';
    emit(opt, s);
  } else {
    json p = json::object();
    for (const auto& [name, v] : parts) p[name] = v;
    const json out{{"R", e.R},   {"S", e.S},           {"h", h},         {"R1", e.R1},
                   {"R3", e.R3}, {"a_over_h", e.a_over_h}, {"b_log", e.b_log}, {"parts", p},
                   {"total", e.total()}, {"mixing_sign", sign}};
    emit(opt, out.dump(2) + "\n");
  }
  return 0;
}

int cmd_fit(const Options& opt) {
  if (opt.config.empty()) throw Error(ErrorCode::config, "--config must name a stored JSON sweep report");
  SweepResult res = parse_report(load_config(opt));
  res.fit_requested = true;
  refit(res);
  json fits = json::object();
  for (const auto& [name, rec] : res.fits) fits[name] = fit_to_json(rec);
  emit(opt, json{{"fit", fits}}.dump(2) + "\n");
  return 0;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::config:
    case ErrorCode::degenerate_contact:
    case ErrorCode::invalid_geometry:
    case ErrorCode::profile_domain:
    case ErrorCode::invalid_parameter:
    case ErrorCode::resolution:
    case ErrorCode::out_of_regime:
      return 2;
    case ErrorCode::solver_failure:
    case ErrorCode::sweep_failure:
      return 3;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lubrication-approximation solver for narrow sphere gaps"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON configuration file");
    sub->add_option("--out", opt.out, "output file (default: stdout)");
    sub->add_option("--format", opt.format, "report format (default: from the --out extension, else json)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", opt.tol, "relative residual tolerance of the pressure solve");
    sub->add_option("--threads", opt.threads, "worker threads for sweeps (default: all cores)");
  };
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {{"validate", "check the contact assumptions of a geometry", cmd_validate},
                      {"solve", "single pressure solve with field diagnostics", cmd_solve},
                      {"sweep", "h-sweep with report and scaling fits", cmd_sweep},
                      {"ode", "radial ODEs with decay report", cmd_ode},
                      {"expand", "closed-form energy expansion table", cmd_expand},
                      {"fit", "re-fit a stored sweep report", cmd_fit}};
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> handlers;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    handlers.emplace_back(sub, s.run);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (opt.format.empty()) {
    const bool csv = opt.out.size() >= 4 && opt.out.compare(opt.out.size() - 4, 4, ".csv") == 0;
    opt.format = csv ? "csv" : "json";
  }
  try {
    for (const auto& [sub, run] : handlers) {
      if (sub->parsed()) return run(opt);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
