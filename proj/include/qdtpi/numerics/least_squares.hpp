/*
 * Copyright 2026 The qdtpi developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace qdtpi::numerics {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 1.0;
};

struct FitResult {
  Eigen::VectorXd params;
  double residual_norm = 0.0;   // chi^2: sum of squared sigma-weighted residuals
  Eigen::MatrixXd covariance;   // (J^T J)^-1 at the solution (pseudo-inverse if singular)
  bool converged = false;
  int iterations = 0;
  bool at_bounds = false;       // converged with at least one active bound
  bool singular_jacobian = false;
  std::string message;
};

struct FitOptions {
  int max_iterations = 200;
  double ftol = 1e-12;          // relative chi^2 change
  double xtol = 1e-10;          // relative step size
  double fd_rel_step = 1e-6;    // finite-difference Jacobian step
};

/// Bounded nonlinear least squares: minimizes
///   chi^2(p) = sum_i ((y_i - model(p, x_i)) / sigma_i)^2
/// with a damped Gauss-Newton (Levenberg) iteration, finite-difference
/// Jacobians and box constraints enforced by clamping trial steps.
/// Deterministic for identical inputs.
inline FitResult least_squares_fit(
    const std::function<double(const Eigen::VectorXd&, double)>& model,
    std::span<const DataPoint> data, Eigen::VectorXd init,
    const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
    const FitOptions& opts = {}) {
  const int n = static_cast<int>(data.size());
  const int np = static_cast<int>(init.size());
  if (np == 0) throw std::invalid_argument("least_squares_fit: empty parameter vector");
  if (n < np) throw std::invalid_argument("least_squares_fit: fewer data points than parameters");
  if (lower.size() != np || upper.size() != np)
    throw std::invalid_argument("least_squares_fit: bound size mismatch");
  for (int j = 0; j < np; ++j) {
    if (!(lower[j] <= init[j] && init[j] <= upper[j]))
      throw std::invalid_argument("least_squares_fit: init outside bounds");
  }
  for (const auto& d : data)
    if (!(d.sigma > 0.0))
      throw std::invalid_argument("least_squares_fit: sigma must be positive");

  auto clamp = [&](Eigen::VectorXd p) {
    for (int j = 0; j < np; ++j) p[j] = std::clamp(p[j], lower[j], upper[j]);
    return p;
  };
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i)
      r[i] = (data[i].y - model(p, data[i].x)) / data[i].sigma;
    return r;
  };

  Eigen::VectorXd p = clamp(std::move(init));
  Eigen::VectorXd r = residuals(p);
  double chi2 = r.squaredNorm();

  FitResult out;
  double lambda = 1e-3;
  int iter = 0;
  bool converged = false;

  Eigen::MatrixXd J(n, np);
  auto jacobian = [&](const Eigen::VectorXd& pc, const Eigen::VectorXd& rc) {
    for (int j = 0; j < np; ++j) {
      double h = opts.fd_rel_step * std::max(std::abs(pc[j]), 1e-8);
      Eigen::VectorXd ps = pc;
      if (pc[j] + h > upper[j]) h = -h;  // step inward at an upper bound
      ps[j] = pc[j] + h;
      J.col(j) = (residuals(ps) - rc) / h;
    }
  };

  for (; iter < opts.max_iterations && !converged; ++iter) {
    jacobian(p, r);
    Eigen::MatrixXd jtj = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;

    if (!jtj.allFinite() || !g.allFinite()) {
      out.singular_jacobian = true;
      out.message = "non-finite Jacobian";
      break;
    }
    const double jtj_scale = jtj.diagonal().cwiseAbs().maxCoeff();
    if (jtj_scale <= 0.0) {
      out.singular_jacobian = true;
      out.message = "singular Jacobian: all derivatives vanish";
      break;
    }

    bool accepted = false;
    for (int tries = 0; tries < 25 && !accepted; ++tries) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseAbs().cwiseMax(1e-12 * jtj_scale);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      Eigen::VectorXd step = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Eigen::VectorXd pt = clamp(p + step);
      Eigen::VectorXd rt = residuals(pt);
      double chit = rt.squaredNorm();
      if (std::isfinite(chit) && chit <= chi2) {
        const double dchi = chi2 - chit;
        const double dx = (pt - p).norm();
        p = std::move(pt);
        r = std::move(rt);
        chi2 = chit;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (dchi <= opts.ftol * std::max(chi2, 1e-30) ||
            dx <= opts.xtol * (p.norm() + opts.xtol)) {
          converged = true;
        }
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) {
      // no downhill step found at any damping: local minimum to working precision
      converged = true;
    }
  }

  out.params = p;
  out.residual_norm = chi2;
  out.converged = converged;
  out.iterations = iter;

  for (int j = 0; j < np; ++j) {
    const double span = upper[j] - lower[j];
    const double edge = 1e-10 * std::max(1.0, std::abs(p[j])) + 1e-14 * span;
    if (p[j] - lower[j] <= edge || upper[j] - p[j] <= edge) out.at_bounds = true;
  }

  // covariance from the (undamped) normal matrix at the solution
  jacobian(p, r);
  Eigen::MatrixXd jtj = J.transpose() * J;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  Eigen::VectorXd inv = svd.singularValues();
  bool rank_deficient = false;
  for (int j = 0; j < inv.size(); ++j) {
    if (inv[j] > 1e-12 * smax && inv[j] > 0.0) {
      inv[j] = 1.0 / inv[j];
    } else {
      inv[j] = 0.0;
      rank_deficient = true;
    }
  }
  out.covariance = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  if (rank_deficient && !out.singular_jacobian) {
    out.singular_jacobian = true;
    if (out.message.empty())
      out.message = "singular Jacobian at solution: covariance is a pseudo-inverse";
  }
  return out;
}

}  // namespace qdtpi::numerics
