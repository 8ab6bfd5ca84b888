#pragma once

// JSON loading of geometries and boundary data, and flat-file exports of
// fields and diagnostics.

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "lubrigap/contact.hpp"
#include "lubrigap/data.hpp"
#include "lubrigap/error.hpp"
#include "lubrigap/field.hpp"
#include "lubrigap/geometry.hpp"
#include "lubrigap/reynolds.hpp"

namespace lubrigap {

using json = nlohmann::json;

/// Shortest decimal string that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Geometry description without a fixed gap; `make` instantiates it at h.
struct GeometrySpec {
  std::string kind = "sphere";
  double R = 0.0, S = 0.0;
  std::vector<double> coeffs_t, coeffs_b;
  double L = 0.0;
  std::optional<double> h;

  bool is_sphere() const { return kind == "sphere"; }

  GapGeometry make(double at_h) const {
    if (is_sphere()) return make_sphere_gap(R, S, at_h, L).geometry();
    return make_radial_poly_gap(coeffs_t, coeffs_b, at_h, L);
  }
  SphereGap sphere(double at_h) const {
    if (!is_sphere()) throw Error(ErrorCode::config, "closed forms need a sphere geometry");
    return make_sphere_gap(R, S, at_h, L);
  }

  json to_json() const {
    json j;
    j["kind"] = kind;
    if (is_sphere()) {
      j["R"] = R;
      j["S"] = S;
    } else {
      j["coeffs_t"] = coeffs_t;
      j["coeffs_b"] = coeffs_b;
    }
    j["L"] = L;
    if (h) j["h"] = *h;
    return j;
  }
};

namespace detail {

inline double get_number(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::config, std::string("missing key '") + key + "'");
  if (!j.at(key).is_number()) throw Error(ErrorCode::config, std::string("key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::vector<double> get_numbers(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw Error(ErrorCode::config, std::string("key '") + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw Error(ErrorCode::config, std::string("key '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

/// {"kind": "sphere", "R", "S", "h", "L"} or
/// {"kind": "radial_poly", "coeffs_t", "coeffs_b", "h", "L"}; h is optional.
inline GeometrySpec parse_geometry(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::config, "geometry must be a JSON object");
  GeometrySpec g;
  g.kind = j.value("kind", std::string("sphere"));
  g.L = detail::get_number(j, "L");
  if (j.contains("h")) g.h = detail::get_number(j, "h");
  if (g.kind == "sphere") {
    g.R = detail::get_number(j, "R");
    g.S = detail::get_number(j, "S");
  } else if (g.kind == "radial_poly") {
    g.coeffs_t = detail::get_numbers(j, "coeffs_t");
    g.coeffs_b = detail::get_numbers(j, "coeffs_b");
  } else {
    throw Error(ErrorCode::config, "unknown geometry kind '" + g.kind + "' (expected sphere or radial_poly)");
  }
  return g;
}

/// Polynomial in (x, y) given as [[i, j, c], ...]; degree at most 6.
inline Poly2 parse_poly(const json& j) {
  if (j.is_number()) return Poly2::constant(j.get<double>());
  if (!j.is_array()) throw Error(ErrorCode::config, "polynomial must be a number or a list of [i, j, c]");
  std::vector<Poly2::Term> terms;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
        !t[2].is_number()) {
      throw Error(ErrorCode::config, "polynomial term must be [i, j, c] with integer exponents");
    }
    terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
  }
  Poly2 p(std::move(terms));
  if (p.degree() > 6) throw Error(ErrorCode::config, "custom data polynomials are limited to degree 6");
  return p;
}

inline BoundaryData make_data_case(const std::string& name, const json& custom = json()) {
  if (name == "normal_const") return BoundaryData::normal_const();
  if (name == "costheta") return BoundaryData::costheta();
  if (name == "tangential_const") return BoundaryData::tangential_const();
  if (name == "favorable") return BoundaryData::favorable();
  if (name == "custom") {
    if (!custom.is_object()) throw Error(ErrorCode::config, "data_case 'custom' needs a custom_data object");
    return BoundaryData::from_polynomials(parse_poly(custom.value("w", json(0.0))),
                                          parse_poly(custom.value("vx", json(0.0))),
                                          parse_poly(custom.value("vy", json(0.0))));
  }
  throw Error(ErrorCode::config, "unknown data_case '" + name + "'");
}

inline json to_json(const ConstantsReport& r) {
  json j;
  j["C_cvx"] = r.C_cvx;
  j["C_ell"] = r.C_ell;
  j["C_upper"] = r.C_upper;
  j["C_reg"] = r.C_reg;
  j["a1_residual"] = r.a1_residual;
  j["a2_min_eigenvalue"] = r.a2_min_eigenvalue;
  j["K_gradient"] = r.K_gradient;
  j["K_sum"] = r.K_sum;
  j["violations"] = r.violations;
  j["ok"] = r.ok();
  return j;
}

inline json diagnostics_json(const PressureSolution& sol) {
  return json{{"iterations", sol.iterations},
              {"residual", sol.residual},
              {"n_r", sol.pressure.grid.n_r()},
              {"n_theta", sol.pressure.grid.n_theta()},
              {"h", sol.h},
              {"tol", sol.tol}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, "'" + path + "' is not valid JSON: " + e.what());
  }
}

/// r,theta,x,y,value per cell centre.
inline std::string field_csv(const ScalarField& f) {
  std::string s = "r,theta,x,y,value\n";
  const PolarGrid& g = f.grid;
  for (int i = 0; i < g.n_r(); ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      s += format_double(g.r(i)) + ',' + format_double(g.theta(j)) + ',' + format_double(g.x(i, j)) + ',' +
           format_double(g.y(i, j)) + ',' + format_double(f(i, j)) + '\n';
    }
  }
  return s;
}

/// x,y,z,vx,vy,vz on every `stride`-th cell centre and n_z + 1 heights
/// spanning the aperture.
inline std::string velocity_csv(const ApertureField& field, int n_z, int stride = 1) {
  std::string s = "x,y,z,vx,vy,vz\n";
  const PolarGrid& g = field.grid();
  for (int i = 0; i < field.valid_rings(); i += stride) {
    for (int j = 0; j < g.n_theta(); j += stride) {
      const auto c = field.column(i, j);
      for (int l = 0; l <= n_z; ++l) {
        const double z = c.b + c.gap() * l / n_z;
        const Vec3 v = ApertureField::velocity(c, z);
        s += format_double(g.x(i, j)) + ',' + format_double(g.y(i, j)) + ',' + format_double(z) + ',' +
             format_double(v.x) + ',' + format_double(v.y) + ',' + format_double(v.z) + '\n';
      }
    }
  }
  return s;
}

}  // namespace lubrigap
