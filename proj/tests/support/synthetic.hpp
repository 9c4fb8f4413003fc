/*
 * Copyright 2026 The qdtpi developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

// Synthetic-data protocols shared by the acceptance suite and its
// calibration tooling. Everything here is deterministic given the seed.

#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "qdtpi/experiment.hpp"
#include "qdtpi/tempfit.hpp"

namespace synthetic {

inline std::vector<double> recovery_grid() {
  return {4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 22.0, 24.0, 26.0};
}

/// Visibility curve from the closed form with multiplicative Gaussian noise
/// of relative size `noise`; sigma_i = noise * V_i (0.01 when noiseless).
inline qdtpi::tempfit::VisibilityDataset make_visibility_dataset(
    const qdtpi::phonon::PhononParams& truth, const qdtpi::emitter::EmitterParams& e,
    const qdtpi::CavityFilter& f, const std::vector<double>& temps, double noise,
    unsigned seed) {
  auto curve = qdtpi::tempfit::visibility_curve(truth, e, f, temps);
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<qdtpi::tempfit::VisibilityPoint> pts;
  pts.reserve(curve.size());
  for (const auto& [tk, v] : curve) {
    const double vn = noise > 0 ? std::clamp(v * (1.0 + noise * dist(rng)), 0.0, 1.0) : v;
    pts.push_back({tk, vn, noise > 0 ? noise * v : 0.01});
  }
  return qdtpi::tempfit::VisibilityDataset(std::move(pts), e, f);
}

struct RecoveryResult {
  qdtpi::phonon::PhononParams fitted{0.0, 1.0, 0.0};
  double err_alpha = 0.0;
  double err_nu_c = 0.0;
  double err_mu = 0.0;
  double worst() const { return std::max({err_alpha, err_nu_c, err_mu}); }
};

/// The parameter-recovery protocol: init displaced from the truth by
/// (x1.3, x0.85, x1.5), generous bounds, multi-start fit.
inline RecoveryResult run_recovery(const qdtpi::phonon::PhononParams& truth,
                                   const qdtpi::emitter::EmitterParams& e,
                                   const qdtpi::CavityFilter& f, double noise,
                                   unsigned seed, bool multi_start = true) {
  auto data = make_visibility_dataset(truth, e, f, recovery_grid(), noise, seed);
  const qdtpi::phonon::PhononParams init(1.3 * truth.alpha, 0.85 * truth.nu_c,
                                         1.5 * truth.mu);
  const qdtpi::phonon::PhononParams lower(1e-4, 1.0, 1e-6);
  const qdtpi::phonon::PhononParams upper(0.1, 30.0, 1e-2);
  qdtpi::tempfit::PhononFitOptions opts;
  opts.multi_start = multi_start;
  auto fit = qdtpi::tempfit::fit_visibility(data, init, lower, upper, opts);

  RecoveryResult out;
  out.fitted = fit.params;
  out.err_alpha = std::abs(fit.params.alpha - truth.alpha) / truth.alpha;
  out.err_nu_c = std::abs(fit.params.nu_c - truth.nu_c) / truth.nu_c;
  out.err_mu = std::abs(fit.params.mu - truth.mu) / truth.mu;
  return out;
}

/// Binned coincidence histogram of back-to-back exponential peaks,
/// Poisson-sampled when requested.
inline qdtpi::experiment::CoincidenceHistogram make_histogram(
    const std::vector<double>& centers, const std::vector<double>& areas, double t1_ns,
    double t_acq_s, bool poisson, unsigned seed, double bin_w = 0.1, double span = 20.0) {
  std::vector<qdtpi::experiment::HistogramBin> bins;
  std::mt19937 rng(seed);
  for (double t = -span; t <= span + 1e-9; t += bin_w) {
    double mean = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k)
      mean += areas[k] / (2.0 * t1_ns) * std::exp(-std::abs(t - centers[k]) / t1_ns) * bin_w;
    std::int64_t counts;
    if (poisson) {
      std::poisson_distribution<std::int64_t> dist(mean);
      counts = dist(rng);
    } else {
      counts = static_cast<std::int64_t>(std::llround(mean));
    }
    bins.push_back({t, counts});
  }
  return qdtpi::experiment::CoincidenceHistogram(std::move(bins), t_acq_s, 12.2, 3.0);
}

}  // namespace synthetic
