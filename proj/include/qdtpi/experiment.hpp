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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdtpi/numerics/least_squares.hpp"

namespace qdtpi::experiment {

// ---------------------------------------------------------------------------
// Fourier-transform spectroscopy: pseudo-Voigt fringe contrast
// ---------------------------------------------------------------------------

struct FringePoint {
  double delay_ps;
  double contrast;
  double sigma;
};

/// Michelson fringe-contrast trace. Delays must be strictly increasing and
/// contrasts must lie within [0, 1 + 3 sigma].
struct FringeContrast {
  std::vector<FringePoint> samples;

  explicit FringeContrast(std::vector<FringePoint> s) : samples(std::move(s)) {
    if (samples.size() < 8)
      throw std::invalid_argument("FringeContrast: need at least 8 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& p = samples[i];
      if (!(p.sigma > 0.0)) throw std::invalid_argument("FringeContrast: sigma must be > 0");
      if (p.contrast < 0.0 || p.contrast > 1.0 + 3.0 * p.sigma)
        throw std::invalid_argument("FringeContrast: contrast outside [0, 1 + 3 sigma]");
      if (i > 0 && !(p.delay_ps > samples[i - 1].delay_ps))
        throw std::invalid_argument("FringeContrast: delays must be strictly increasing");
    }
  }
};

/// f(t) = (1 - eta) exp(-|t|/T2) + eta exp(-(t/T2)^2)
inline double pseudo_voigt(double t, double t2, double eta) {
  const double r = std::abs(t) / t2;
  return (1.0 - eta) * std::exp(-r) + eta * std::exp(-r * r);
}

struct FringeFit {
  double t2_ps = 0.0;
  double eta = 0.0;
  double t2_err = 0.0;
  double eta_err = 0.0;
  bool span_warning = false;  // trace shorter than ~2 T2: expect 10-15% T2 error
  numerics::FitResult fit;
};

/// Fits the pseudo-Voigt contrast profile; eta is constrained to [0, 1].
inline FringeFit fit_fringe_contrast(const FringeContrast& data) {
  std::vector<numerics::DataPoint> pts;
  pts.reserve(data.samples.size());
  double span = 0.0;
  for (const auto& s : data.samples) {
    pts.push_back({s.delay_ps, s.contrast, s.sigma});
    span = std::max(span, std::abs(s.delay_ps));
  }

  // initial T2: first crossing of 1/e, else half the span
  double t2_init = 0.5 * span;
  for (const auto& s : data.samples) {
    if (s.contrast < std::exp(-1.0) && s.delay_ps > 0.0) {
      t2_init = s.delay_ps;
      break;
    }
  }
  t2_init = std::max(t2_init, 1e-3);

  auto model = [](const Eigen::VectorXd& p, double x) {
    return pseudo_voigt(x, p[0], p[1]);
  };
  Eigen::VectorXd init(2), lo(2), hi(2);
  init << t2_init, 0.5;
  lo << 1e-3, 0.0;
  hi << 1e7, 1.0;
  auto fit = numerics::least_squares_fit(model, pts, init, lo, hi);

  FringeFit out;
  out.t2_ps = fit.params[0];
  out.eta = std::clamp(fit.params[1], 0.0, 1.0);
  if (fit.covariance.rows() == 2) {
    out.t2_err = std::sqrt(std::max(0.0, fit.covariance(0, 0)));
    out.eta_err = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
  }
  out.span_warning = span < 2.0 * out.t2_ps;
  out.fit = std::move(fit);
  return out;
}

/// Visibility expected from coherence and lifetime under random dephasing:
/// V~ = T2 / (2 T1).
inline double expected_visibility_ratio(double t1_ps, double t2_ps) {
  if (!(t1_ps > 0.0) || !(t2_ps > 0.0))
    throw std::domain_error("expected_visibility_ratio: T1, T2 must be > 0");
  return t2_ps / (2.0 * t1_ps);
}

// ---------------------------------------------------------------------------
// Coincidence histograms
// ---------------------------------------------------------------------------

struct HistogramBin {
  double delay_ns;
  std::int64_t counts;
};

/// Binned coincidence histogram plus the acquisition metadata needed for
/// normalization and background correction.
struct CoincidenceHistogram {
  std::vector<HistogramBin> bins;
  double acquisition_time_s;
  double rep_period_ns;      // 12.2 for an 82 MHz laser
  double pair_separation_ns; // 3 for the Mach-Zehnder delay

  CoincidenceHistogram(std::vector<HistogramBin> b, double t_acq, double rep,
                       double pair)
      : bins(std::move(b)), acquisition_time_s(t_acq), rep_period_ns(rep),
        pair_separation_ns(pair) {
    if (!(rep_period_ns > pair_separation_ns) || !(pair_separation_ns > 0.0))
      throw std::invalid_argument(
          "CoincidenceHistogram: need rep_period > pair_separation > 0");
    if (!(acquisition_time_s > 0.0))
      throw std::invalid_argument("CoincidenceHistogram: acquisition time must be > 0");
    for (const auto& bin : bins)
      if (bin.counts < 0)
        throw std::invalid_argument("CoincidenceHistogram: counts must be >= 0");
  }
};

/// Central-peak areas (delays -3, 0, +3 ns) and the mean area of the two
/// side three-peak bunches.
struct PeakAreas {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double side_bunch_mean = 0.0;
};

struct PeakFitResult {
  std::vector<double> centers_ns;
  std::vector<double> areas;
  double t1_ns = 0.0;
  bool converged = false;
  bool windowed_fallback = false;  // joint fit failed, windowed sums reported
  numerics::FitResult fit;
};

namespace detail {

inline double median_bin_width(const CoincidenceHistogram& h) {
  std::vector<double> d;
  d.reserve(h.bins.size());
  for (std::size_t i = 1; i < h.bins.size(); ++i)
    d.push_back(h.bins[i].delay_ns - h.bins[i - 1].delay_ns);
  if (d.empty()) throw std::invalid_argument("histogram needs >= 2 bins");
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

inline std::vector<double> windowed_sums(const CoincidenceHistogram& h,
                                         const std::vector<double>& centers,
                                         double half_window_ns) {
  std::vector<double> areas(centers.size(), 0.0);
  for (const auto& bin : h.bins) {
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (std::abs(bin.delay_ns - centers[k]) <= half_window_ns) {
        areas[k] += static_cast<double>(bin.counts);
        break;
      }
    }
  }
  return areas;
}

}  // namespace detail

/// Joint multi-peak fit of a coincidence histogram: every peak is a
/// back-to-back exponential exp(-|t - c|/T1) sharing one decay time, and the
/// fitted amplitudes integrate analytically to areas, which resolves the
/// overlap between peaks 3 ns apart. When t1_ns is given the decay is fixed;
/// otherwise a shared T1 is fitted. Falls back to windowed sums (half window
/// = pair_separation/2) if the joint fit does not converge.
inline PeakFitResult fit_peak_areas(const CoincidenceHistogram& hist,
                                    const std::vector<double>& centers_ns,
                                    std::optional<double> t1_ns = std::nullopt) {
  if (centers_ns.empty()) throw std::invalid_argument("fit_peak_areas: no centers");
  const double bin_w = detail::median_bin_width(hist);
  const double half_window = 0.5 * hist.pair_separation_ns;

  PeakFitResult out;
  out.centers_ns = centers_ns;

  double total = 0.0;
  for (const auto& b : hist.bins) total += static_cast<double>(b.counts);
  if (total == 0.0) {
    out.areas.assign(centers_ns.size(), 0.0);
    out.t1_ns = t1_ns.value_or(0.0);
    out.converged = false;
    return out;
  }

  const std::size_t npeak = centers_ns.size();
  const bool fit_t1 = !t1_ns.has_value();
  const std::size_t npar = npeak + (fit_t1 ? 1 : 0);

  std::vector<numerics::DataPoint> pts;
  pts.reserve(hist.bins.size());
  for (const auto& b : hist.bins) {
    const double c = static_cast<double>(b.counts);
    pts.push_back({b.delay_ns, c, std::sqrt(std::max(c, 1.0))});
  }

  auto model = [&, bin_w](const Eigen::VectorXd& p, double t) {
    const double tau = fit_t1 ? p[npeak] : *t1_ns;
    double v = 0.0;
    for (std::size_t k = 0; k < npeak; ++k)
      v += p[k] / (2.0 * tau) * std::exp(-std::abs(t - centers_ns[k]) / tau);
    return v * bin_w;
  };

  const auto windowed = detail::windowed_sums(hist, centers_ns, half_window);
  Eigen::VectorXd init(npar), lo(npar), hi(npar);
  for (std::size_t k = 0; k < npeak; ++k) {
    init[k] = std::max(windowed[k], 1.0);
    lo[k] = 0.0;
    hi[k] = 1e12;
  }
  if (fit_t1) {
    init[npeak] = 0.25 * hist.pair_separation_ns;
    lo[npeak] = 1e-3;
    hi[npeak] = hist.rep_period_ns;
  }

  numerics::FitOptions opts;
  opts.max_iterations = 300;
  auto fit = numerics::least_squares_fit(model, pts, init, lo, hi, opts);

  if (!fit.converged || !fit.params.allFinite()) {
    out.areas = windowed;
    out.t1_ns = t1_ns.value_or(0.0);
    out.converged = false;
    out.windowed_fallback = true;
    out.fit = std::move(fit);
    return out;
  }
  out.areas.assign(fit.params.data(), fit.params.data() + npeak);
  out.t1_ns = fit_t1 ? fit.params[npeak] : *t1_ns;
  out.converged = true;
  out.fit = std::move(fit);
  return out;
}

/// Standard peak layout for the 3 ns Mach-Zehnder setup: central triplet at
/// (-3, 0, 3) and one three-peak bunch around each of +-rep_period.
inline std::vector<double> standard_peak_centers(const CoincidenceHistogram& h) {
  const double r = h.rep_period_ns;
  const double s = h.pair_separation_ns;
  return {-r - s, -r, -r + s, -s, 0.0, s, r - s, r, r + s};
}

/// Runs the joint peak fit on the standard layout and reduces it to the
/// central areas plus the mean integrated intensity of the two side bunches.
inline PeakAreas extract_peak_areas(const CoincidenceHistogram& hist,
                                    std::optional<double> t1_ns = std::nullopt,
                                    PeakFitResult* details = nullptr) {
  const auto centers = standard_peak_centers(hist);
  auto fit = fit_peak_areas(hist, centers, t1_ns);
  PeakAreas out;
  out.a1 = fit.areas[3];
  out.a2 = fit.areas[4];
  out.a3 = fit.areas[5];
  const double left = fit.areas[0] + fit.areas[1] + fit.areas[2];
  const double right = fit.areas[6] + fit.areas[7] + fit.areas[8];
  out.side_bunch_mean = 0.5 * (left + right);
  if (details) *details = std::move(fit);
  return out;
}

/// g2_HBT = (A1 + A2 + A3) / side_bunch_mean.
inline double g2_hbt(const PeakAreas& a) {
  if (!(a.side_bunch_mean > 0.0))
    throw std::domain_error("g2_hbt: side bunch area must be > 0");
  return (a.a1 + a.a2 + a.a3) / a.side_bunch_mean;
}

struct CorrectedAreas {
  PeakAreas areas;
  bool clipped = false;               // a negative corrected area was floored at 0
  bool inconsistency_warning = false; // negative beyond 3 sigma of counting noise
};

/// Removes the scattered-laser contribution from HOM peak areas:
///   B_i = A_i^HOM - 2 (t_HOM / t_HBT) A_i^HBT,
/// floored at zero. The factor 2 reflects the two excitation pulses per
/// period in the HOM configuration.
inline CorrectedAreas hom_background_correction(const PeakAreas& hom,
                                                const PeakAreas& hbt,
                                                double t_hom_s, double t_hbt_s) {
  if (!(t_hom_s > 0.0) || !(t_hbt_s > 0.0))
    throw std::invalid_argument("hom_background_correction: acquisition times must be > 0");
  const double r = 2.0 * t_hom_s / t_hbt_s;
  CorrectedAreas out;
  auto correct = [&](double a_hom, double a_hbt) {
    const double b = a_hom - r * a_hbt;
    if (b < 0.0) {
      out.clipped = true;
      const double var = a_hom + r * r * a_hbt;  // Poisson, areas ~ counts
      if (b < -3.0 * std::sqrt(std::max(var, 1.0))) out.inconsistency_warning = true;
    }
    return std::max(b, 0.0);
  };
  out.areas.a1 = correct(hom.a1, hbt.a1);
  out.areas.a2 = correct(hom.a2, hbt.a2);
  out.areas.a3 = correct(hom.a3, hbt.a3);
  out.areas.side_bunch_mean = correct(hom.side_bunch_mean, hbt.side_bunch_mean);
  return out;
}

/// Same correction without the zero floor; the linear form used by
/// property tests and error propagation.
inline PeakAreas hom_background_correction_raw(const PeakAreas& hom,
                                               const PeakAreas& hbt,
                                               double t_hom_s, double t_hbt_s) {
  const double r = 2.0 * t_hom_s / t_hbt_s;
  return {hom.a1 - r * hbt.a1, hom.a2 - r * hbt.a2, hom.a3 - r * hbt.a3,
          hom.side_bunch_mean - r * hbt.side_bunch_mean};
}

/// g2_HOM(0) = B2 / (B1 + B3).
inline double g2_hom(const PeakAreas& b) {
  if (!(b.a1 + b.a3 > 0.0))
    throw std::domain_error("g2_hom: B1 + B3 must be > 0");
  return b.a2 / (b.a1 + b.a3);
}

/// Beamsplitter and interferometer imperfections entering the visibility
/// correction.
struct SetupImperfections {
  double reflectance;   // R
  double transmittance; // T
  double contrast_sq;   // C^2 of the Mach-Zehnder

  SetupImperfections(double r, double t, double c2)
      : reflectance(r), transmittance(t), contrast_sq(c2) {
    if (std::abs(reflectance + transmittance - 1.0) > 0.01)
      throw std::invalid_argument("SetupImperfections: R + T must equal 1 within 0.01");
    if (!(contrast_sq > 0.0) || contrast_sq > 1.0)
      throw std::invalid_argument("SetupImperfections: need 0 < C^2 <= 1");
  }
};

/// (R^2 + T^2) / (2 R T C^2) >= 1, equality iff R = T = 1/2 and C^2 = 1.
inline double tpi_correction_factor(const SetupImperfections& s) {
  const double r = s.reflectance, t = s.transmittance;
  return (r * r + t * t) / (2.0 * r * t * s.contrast_sq);
}

struct TpiVisibility {
  double value = 0.0;  // clamped to <= 1
  double raw = 0.0;
  bool clamped = false;
};

/// V_TPI = (R^2 + T^2)/(2 R T C^2) * (1 - g2_HOM). Values above 1 are
/// reported clamped with a flag.
inline TpiVisibility tpi_visibility(double g2hom, const SetupImperfections& s) {
  if (!(g2hom >= 0.0)) throw std::domain_error("tpi_visibility: g2_HOM must be >= 0");
  TpiVisibility out;
  out.raw = tpi_correction_factor(s) * (1.0 - g2hom);
  out.clamped = out.raw > 1.0;
  out.value = std::min(out.raw, 1.0);
  return out;
}

}  // namespace qdtpi::experiment
