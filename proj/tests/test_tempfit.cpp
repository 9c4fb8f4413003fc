/*
 * Copyright 2026 The qdtpi developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qdtpi/tempfit.hpp"
#include "support/oracles.hpp"

using namespace qdtpi;
using namespace qdtpi::tempfit;
using qdtpi::emitter::EmitterParams;
using qdtpi::phonon::PhononParams;
using qdtpi::phonon::Temperature;

namespace {

const PhononParams kQd1{0.0082, 7.9, 4.4e-4};
const EmitterParams kQd1Emitter = EmitterParams::from_t1_ps(1100.0);
const CavityFilter kFilter{6.84, 0.0};
const PhononParams kLower{1e-4, 1.0, 1e-6};
const PhononParams kUpper{0.1, 30.0, 1e-2};

std::vector<double> default_grid() { return {4.0, 6.0, 8.0, 10.0, 13.0, 16.0, 19.0, 22.0}; }

VisibilityDataset synth_dataset(const PhononParams& truth, const EmitterParams& e,
                                const CavityFilter& f, const std::vector<double>& temps,
                                double noise, unsigned seed) {
  auto curve = visibility_curve(truth, e, f, temps);
  auto xi = oracles::gaussian_noise(curve.size(), seed);
  std::vector<VisibilityPoint> pts;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double v = curve[i].second;
    const double vn = noise > 0 ? std::clamp(v * (1.0 + noise * xi[i]), 0.0, 1.0) : v;
    pts.push_back({curve[i].first, vn, noise > 0 ? noise * v : 0.01});
  }
  return VisibilityDataset(std::move(pts), e, f);
}

}  // namespace

TEST_CASE("noiseless round trip recovers QD1 parameters", "[tempfit]") {
  auto data = synth_dataset(kQd1, kQd1Emitter, kFilter, default_grid(), 0.0, 0);
  PhononFitOptions opts;
  opts.multi_start = false;  // single start is enough on clean data
  auto r = fit_visibility(data, PhononParams(1.2 * kQd1.alpha, 0.9 * kQd1.nu_c, 1.5 * kQd1.mu),
                          kLower, kUpper, opts);
  CHECK(std::abs(r.params.alpha - kQd1.alpha) / kQd1.alpha < 0.01);
  CHECK(std::abs(r.params.nu_c - kQd1.nu_c) / kQd1.nu_c < 0.01);
  CHECK(std::abs(r.params.mu - kQd1.mu) / kQd1.mu < 0.01);
  CHECK(r.fit.residual_norm < 1e-8);
}

TEST_CASE("fit objective never exceeds the initial objective", "[tempfit]") {
  auto data = synth_dataset(kQd1, kQd1Emitter, kFilter, default_grid(), 0.03, 11);
  PhononFitOptions opts;
  opts.multi_start = false;
  const PhononParams init(1.5 * kQd1.alpha, 0.8 * kQd1.nu_c, 2.0 * kQd1.mu);
  auto r = fit_visibility(data, init, kLower, kUpper, opts);
  CHECK(r.fit.residual_norm <= r.initial_chi2);
}

TEST_CASE("refitting from the optimum is a fixed point", "[tempfit]") {
  auto data = synth_dataset(kQd1, kQd1Emitter, kFilter, default_grid(), 0.03, 5);
  PhononFitOptions opts;
  opts.multi_start = false;
  auto first = fit_visibility(
      data, PhononParams(1.2 * kQd1.alpha, 0.9 * kQd1.nu_c, 1.3 * kQd1.mu), kLower,
      kUpper, opts);
  auto second = fit_visibility(data, first.params, kLower, kUpper, opts);
  CHECK(std::abs(second.params.alpha - first.params.alpha) / first.params.alpha < 1e-3);
  CHECK(std::abs(second.params.nu_c - first.params.nu_c) / first.params.nu_c < 1e-3);
  CHECK(std::abs(second.params.mu - first.params.mu) / first.params.mu < 1e-3);
}

TEST_CASE("visibility curve modes", "[tempfit]") {
  const auto temps = default_grid();

  // sideband_only with mu > 0 equals full with mu = 0
  auto sideband_only = visibility_curve(kQd1, kQd1Emitter, kFilter, temps,
                                        CurveMode::sideband_only);
  const PhononParams no_mu(kQd1.alpha, kQd1.nu_c, 0.0);
  auto full_no_mu = visibility_curve(no_mu, kQd1Emitter, kFilter, temps, CurveMode::full);
  for (std::size_t i = 0; i < temps.size(); ++i)
    CHECK(sideband_only[i].second == Catch::Approx(full_no_mu[i].second).epsilon(1e-12));

  // sideband-only bounds the full curve from above, tracks it at low T and
  // departs at high T
  auto full = visibility_curve(kQd1, kQd1Emitter, kFilter, temps, CurveMode::full);
  for (std::size_t i = 0; i < temps.size(); ++i)
    CHECK(sideband_only[i].second >= full[i].second - 1e-12);
  CHECK(std::abs(sideband_only.front().second - full.front().second) < 0.03);  // 4 K
  auto full20 = visibility_curve(kQd1, kQd1Emitter, kFilter, {20.0});
  auto side20 = visibility_curve(kQd1, kQd1Emitter, kFilter, {20.0}, CurveMode::sideband_only);
  CHECK(side20[0].second - full20[0].second > 0.2);
}

TEST_CASE("dephasing regimes at QD1", "[tempfit]") {
  const double gamma = kQd1Emitter.gamma;
  CHECK(phonon::dephasing_rate(kQd1, Temperature(4.0)) < 0.1 * gamma);
  CHECK(phonon::dephasing_rate(kQd1, Temperature(22.0)) > 0.5 * gamma);
  // frozen regression of the 20 K rate (0.482 Gamma, just below Gamma/2)
  CHECK(phonon::dephasing_rate(kQd1, Temperature(20.0)) ==
        Catch::Approx(4.38597e-4).epsilon(1e-4));
}

TEST_CASE("filtered-fraction cache", "[tempfit]") {
  FilteredFractionCache cache;
  const Temperature t4(4.0);
  const double v1 = cache.get(kQd1, t4, kFilter);
  const double v2 = cache.get(kQd1, t4, kFilter);
  CHECK(v1 == v2);
  CHECK(cache.size() == 1);
  // alpha and mu do not enter the default-mode fraction
  const PhononParams other_alpha(0.5 * kQd1.alpha, kQd1.nu_c, 2.0 * kQd1.mu);
  CHECK(cache.get(other_alpha, t4, kFilter) == v1);
  CHECK(cache.size() == 1);
  cache.get(kQd1, Temperature(10.0), kFilter);
  CHECK(cache.size() == 2);
  CHECK(v1 == Catch::Approx(phonon::filtered_fraction(kQd1, t4, kFilter)).epsilon(1e-12));
}

TEST_CASE("dataset validation", "[tempfit]") {
  std::vector<VisibilityPoint> three{{4.0, 0.8, 0.03}, {8.0, 0.7, 0.03}, {12.0, 0.6, 0.03}};
  CHECK_THROWS_AS(VisibilityDataset(three, kQd1Emitter, kFilter), std::invalid_argument);

  std::vector<VisibilityPoint> unsorted{
      {8.0, 0.7, 0.03}, {4.0, 0.8, 0.03}, {12.0, 0.6, 0.03}, {16.0, 0.5, 0.03}};
  CHECK_THROWS_AS(VisibilityDataset(unsorted, kQd1Emitter, kFilter), std::invalid_argument);

  std::vector<VisibilityPoint> same_t{
      {4.0, 0.8, 0.03}, {4.0, 0.81, 0.03}, {4.0, 0.79, 0.03}, {4.0, 0.8, 0.03}};
  VisibilityDataset degenerate(same_t, kQd1Emitter, kFilter);
  CHECK_THROWS_AS(fit_visibility(degenerate, kQd1, kLower, kUpper), std::invalid_argument);

  std::vector<VisibilityPoint> bad_sigma{
      {4.0, 0.8, 0.0}, {8.0, 0.7, 0.03}, {12.0, 0.6, 0.03}, {16.0, 0.5, 0.03}};
  CHECK_THROWS_AS(VisibilityDataset(bad_sigma, kQd1Emitter, kFilter), std::invalid_argument);
}
