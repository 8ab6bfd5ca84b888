#pragma once

// Least-squares decomposition v(h) ~ a/h + b ln(1/h) + c.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lubrigap/error.hpp"

namespace lubrigap {

struct ScalingFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double rms_residual = 0.0;
  std::vector<double> h_samples;
  std::vector<double> values;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  /// max |A^T (v - A x)| relative to |A^T| |v|: optimality of the solution.
  double normal_residual = 0.0;

  double operator()(double h) const { return a / h + b * std::log(1.0 / h) + c; }
};

inline ScalingFit fit_scaling(const std::vector<double>& h, const std::vector<double>& values) {
  if (h.size() != values.size()) throw Error(ErrorCode::fit, "h and value lists differ in length");
  if (h.size() < 4) throw Error(ErrorCode::fit, "need at least 4 samples, got " + std::to_string(h.size()));
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!(h[k] > 0.0 && h[k] < 1.0)) throw Error(ErrorCode::fit, "h samples must lie in (0, 1)");
    if (k > 0 && !(h[k] < h[k - 1])) throw Error(ErrorCode::fit, "h samples must be strictly decreasing");
    if (!std::isfinite(values[k])) throw Error(ErrorCode::fit, "non-finite sample value");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(h.size());
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd v(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    A(k, 0) = 1.0 / h[k];
    A(k, 1) = std::log(1.0 / h[k]);
    A(k, 2) = 1.0;
    v(k) = values[k];
  }
  // equilibrate columns so that the 1/h column does not swamp the others
  Eigen::Vector3d scale;
  for (int j = 0; j < 3; ++j) {
    scale(j) = A.col(j).norm();
    if (scale(j) == 0.0) throw Error(ErrorCode::fit, "rank-deficient design");
  }
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
  qr.setThreshold(1e-12);
  if (qr.rank() < 3) throw Error(ErrorCode::fit, "rank-deficient design (fewer than 3 distinct h)");
  const Eigen::Vector3d xs = qr.solve(v);
  const Eigen::Vector3d x = xs.cwiseQuotient(scale);

  ScalingFit fit;
  fit.a = x(0);
  fit.b = x(1);
  fit.c = x(2);
  fit.h_samples = h;
  fit.values = values;
  const Eigen::VectorXd res = v - A * x;
  const double ssr = res.squaredNorm();
  fit.rms_residual = std::sqrt(ssr / static_cast<double>(m));
  const Eigen::Vector3d ng = As.transpose() * res;
  const double denom = As.norm() * v.norm();
  fit.normal_residual = denom > 0.0 ? ng.cwiseAbs().maxCoeff() / denom : 0.0;
  const Eigen::Matrix3d ata_inv = (As.transpose() * As).inverse();
  const double sigma2 = m > 3 ? ssr / static_cast<double>(m - 3) : 0.0;
  fit.covariance = sigma2 * scale.cwiseInverse().asDiagonal() * ata_inv * scale.cwiseInverse().asDiagonal();
  return fit;
}

}  // namespace lubrigap
