#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lubrigap {

enum class ErrorCode {
  invalid_geometry,
  profile_domain,
  out_of_domain,
  degenerate_contact,
  invalid_parameter,
  data_evaluation,
  solver_failure,
  resolution,
  integration,
  out_of_regime,
  discretization,
  truncation_domain,
  fit,
  config,
  sweep_failure,
  io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_geometry: return "invalid-geometry";
    case ErrorCode::profile_domain: return "profile-domain";
    case ErrorCode::out_of_domain: return "out-of-domain";
    case ErrorCode::degenerate_contact: return "degenerate-contact";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::data_evaluation: return "data-evaluation";
    case ErrorCode::solver_failure: return "solver-failure";
    case ErrorCode::resolution: return "resolution";
    case ErrorCode::integration: return "integration";
    case ErrorCode::out_of_regime: return "out-of-regime";
    case ErrorCode::discretization: return "discretization";
    case ErrorCode::truncation_domain: return "truncation-domain";
    case ErrorCode::fit: return "fit";
    case ErrorCode::config: return "config";
    case ErrorCode::sweep_failure: return "sweep-failure";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

/// Base exception for every failure the library reports. The code says which
/// contract was broken; the message carries the details.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Conjugate gradients did not reach the requested tolerance.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double last_residual, long iterations)
      : Error(ErrorCode::solver_failure, what),
        last_residual_(last_residual),
        iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  long iterations_;
};

}  // namespace lubrigap
