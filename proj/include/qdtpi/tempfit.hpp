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

#include <array>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "qdtpi/emitter.hpp"
#include "qdtpi/numerics/least_squares.hpp"
#include "qdtpi/phonon.hpp"

namespace qdtpi::tempfit {

struct VisibilityPoint {
  double temperature_k;
  double visibility;
  double sigma;
};

/// Measured TPI visibility versus temperature, with the fixed emitter and
/// filter parameters the fit is conditioned on.
struct VisibilityDataset {
  std::vector<VisibilityPoint> points;
  emitter::EmitterParams emitter_params;
  CavityFilter filter;

  VisibilityDataset(std::vector<VisibilityPoint> pts, emitter::EmitterParams e,
                    CavityFilter f)
      : points(std::move(pts)), emitter_params(e), filter(f) {
    if (points.size() < 4)
      throw std::invalid_argument("VisibilityDataset: need >= 4 points for a 3-parameter fit");
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      if (!(p.temperature_k > 0.0))
        throw std::invalid_argument("VisibilityDataset: temperatures must be > 0");
      if (!(p.sigma > 0.0))
        throw std::invalid_argument("VisibilityDataset: sigma must be > 0");
      if (p.visibility < 0.0 || p.visibility > 1.0)
        throw std::invalid_argument("VisibilityDataset: visibility must be in [0, 1]");
      // replicate temperatures are fine; descending order is not
      if (i > 0 && p.temperature_k < points[i - 1].temperature_k)
        throw std::invalid_argument("VisibilityDataset: temperatures must be sorted ascending");
    }
  }
};

/// Filtered-fraction cache keyed by (nu_c, T, kappa, delta) -- the fraction
/// does not depend on alpha or mu in the default (ratio) mode. Concurrent
/// reads/inserts are serialized; identical keys overwrite (last write wins).
class FilteredFractionCache {
 public:
  double get(const phonon::PhononParams& p, const phonon::Temperature& t,
             const CavityFilter& f) {
    const Key key{p.nu_c, t.kelvin(), f.kappa, f.delta};
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = values_.find(key);
      if (it != values_.end()) return it->second;
    }
    const double v = phonon::filtered_fraction(p, t, f);
    std::lock_guard<std::mutex> lock(mutex_);
    values_[key] = v;
    return v;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return values_.size();
  }

 private:
  using Key = std::tuple<double, double, double, double>;
  mutable std::mutex mutex_;
  std::map<Key, double> values_;
};

enum class CurveMode { full, sideband_only };

/// Model curve I(T): `full` evaluates the closed form as is; `sideband_only`
/// forces gamma_pd = 0, leaving only the sideband-filtering loss.
inline std::vector<std::pair<double, double>> visibility_curve(
    const phonon::PhononParams& p, const emitter::EmitterParams& e,
    const CavityFilter& f, const std::vector<double>& temperatures_k,
    CurveMode mode = CurveMode::full, FilteredFractionCache* cache = nullptr) {
  std::vector<std::pair<double, double>> out;
  out.reserve(temperatures_k.size());
  const double h0 = filter_transmission(0.0, f);
  for (double tk : temperatures_k) {
    if (!(tk > 0.0)) throw std::domain_error("visibility_curve: temperatures must be > 0");
    const phonon::Temperature t(tk);
    const double gpd = mode == CurveMode::sideband_only ? 0.0 : phonon::dephasing_rate(p, t);
    const double b2 = std::exp(-phonon::phi0(p, t));
    const double ff = p.alpha == 0.0 ? 0.0
                      : cache ? cache->get(p, t, f)
                              : phonon::filtered_fraction(p, t, f);
    out.emplace_back(tk, emitter::indistinguishability_from(e.gamma, gpd, b2, ff, h0));
  }
  return out;
}

struct PhononFitOptions {
  bool multi_start = true;  // init x {0.5, 1, 2} per parameter
  numerics::FitOptions inner;
};

struct PhononFitResult {
  phonon::PhononParams params{0.0, 1.0, 0.0};
  numerics::FitResult fit;
  double initial_chi2 = 0.0;
};

/// Least-squares fit of (alpha, nu_c, mu) to a visibility-versus-temperature
/// dataset at fixed Gamma, kappa, delta. Multi-start over per-parameter
/// scalings of the initial guess guards against the shallow alpha-nu_c
/// valley; the best chi^2 wins. Deterministic for identical inputs.
inline PhononFitResult fit_visibility(const VisibilityDataset& data,
                                      const phonon::PhononParams& init,
                                      const phonon::PhononParams& lower,
                                      const phonon::PhononParams& upper,
                                      const PhononFitOptions& opts = {}) {
  bool all_same = true;
  for (const auto& p : data.points)
    all_same = all_same && p.temperature_k == data.points.front().temperature_k;
  if (all_same)
    throw std::invalid_argument("fit_visibility: degenerate dataset (single temperature)");

  FilteredFractionCache cache;
  const double h0 = filter_transmission(0.0, data.filter);
  const double gamma = data.emitter_params.gamma;

  auto model = [&](const Eigen::VectorXd& pv, double tk) {
    const phonon::PhononParams p(pv[0], pv[1], pv[2]);
    const phonon::Temperature t(tk);
    const double gpd = phonon::dephasing_rate(p, t);
    const double b2 = std::exp(-phonon::phi0(p, t));
    const double ff = p.alpha == 0.0 ? 0.0 : cache.get(p, t, data.filter);
    return emitter::indistinguishability_from(gamma, gpd, b2, ff, h0);
  };

  std::vector<numerics::DataPoint> pts;
  pts.reserve(data.points.size());
  for (const auto& p : data.points)
    pts.push_back({p.temperature_k, p.visibility, p.sigma});

  Eigen::VectorXd lo(3), hi(3), p0(3);
  lo << lower.alpha, lower.nu_c, lower.mu;
  hi << upper.alpha, upper.nu_c, upper.mu;
  p0 << init.alpha, init.nu_c, init.mu;
  for (int j = 0; j < 3; ++j)
    if (!(lo[j] <= p0[j] && p0[j] <= hi[j]))
      throw std::invalid_argument("fit_visibility: init outside bounds");

  auto chi2_at = [&](const Eigen::VectorXd& pv) {
    double c = 0.0;
    for (const auto& d : pts) {
      const double r = (d.y - model(pv, d.x)) / d.sigma;
      c += r * r;
    }
    return c;
  };

  PhononFitResult out;
  out.initial_chi2 = chi2_at(p0);

  const std::array<double, 3> scales{0.5, 1.0, 2.0};
  std::vector<Eigen::VectorXd> starts;
  if (opts.multi_start) {
    for (double sa : scales)
      for (double sn : scales)
        for (double sm : scales) {
          Eigen::VectorXd s(3);
          s << p0[0] * sa, p0[1] * sn, p0[2] * sm;
          for (int j = 0; j < 3; ++j) s[j] = std::clamp(s[j], lo[j], hi[j]);
          starts.push_back(s);
        }
  } else {
    starts.push_back(p0);
  }

  bool have_best = false;
  numerics::FitResult best;
  for (const auto& s : starts) {
    auto r = numerics::least_squares_fit(model, pts, s, lo, hi, opts.inner);
    if (!have_best || r.residual_norm < best.residual_norm) {
      best = std::move(r);
      have_best = true;
    }
  }

  out.params = phonon::PhononParams(best.params[0], best.params[1], best.params[2]);
  out.fit = std::move(best);
  return out;
}

}  // namespace qdtpi::tempfit
