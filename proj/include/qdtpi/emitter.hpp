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

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qdtpi/errors.hpp"
#include "qdtpi/filter.hpp"
#include "qdtpi/phonon.hpp"

namespace qdtpi::emitter {

using qdtpi::CavityFilter;
using qdtpi::cavity_response;

/// Radiative properties of the two-level emitter. All spectra are computed
/// in the rotating frame at the polaron-shifted resonance (line center = 0).
struct EmitterParams {
  double gamma;  // radiative rate Gamma = 1/T1, ps^-1

  explicit EmitterParams(double gamma_) : gamma(gamma_) {
    if (!(gamma > 0.0)) throw std::invalid_argument("EmitterParams: gamma must be > 0");
  }
  static EmitterParams from_t1_ps(double t1_ps) { return EmitterParams(1.0 / t1_ps); }
};

/// Scalars shared by every spectral quantity at fixed (emitter, phonon, T):
/// computing them once keeps grid evaluations cheap.
struct EmitterContext {
  double gamma;
  double gamma_pd;
  double b2;  // Franck-Condon weight B^2
  CavityFilter filter;

  EmitterContext(const EmitterParams& e, const CavityFilter& f,
                 const phonon::PhononParams& p, const phonon::Temperature& t)
      : gamma(e.gamma),
        gamma_pd(phonon::dephasing_rate(p, t)),
        b2(std::exp(-phonon::phi0(p, t))),
        filter(f) {}

  EmitterContext(double gamma_, double gamma_pd_, double b2_, CavityFilter f)
      : gamma(gamma_), gamma_pd(gamma_pd_), b2(b2_), filter(f) {}
};

/// Polaron-frame first-order correlation function
///   g1(t, tau) = (Gamma/2 pi) B^2 G(tau) exp(-Gamma t - (Gamma + 2 gamma_pd) tau / 2).
/// The Gamma/2 pi prefactor is a fixed convention; it cancels in every
/// normalized observable.
inline std::complex<double> g1(double t, double tau, const EmitterParams& e,
                               const phonon::PhononParams& p,
                               const phonon::Temperature& temp) {
  if (!(t >= 0.0) || !(tau >= 0.0)) throw std::domain_error("g1: t, tau must be >= 0");
  const double gpd = phonon::dephasing_rate(p, temp);
  const double b2 = std::exp(-phonon::phi0(p, temp));
  const std::complex<double> g = phonon::phonon_correlation(tau, p, temp);
  const double envelope = std::exp(-e.gamma * t - 0.5 * (e.gamma + 2.0 * gpd) * tau);
  return e.gamma / (2.0 * M_PI) * b2 * g * envelope;
}

/// Two-colour spectrum of the zero-phonon line,
///   S_ZPL(w, v) = B^2 h*(w) h(v) Gamma (i(w - v) + Gamma + 2g)
///                 / [((Gamma+2g)/2 - iv)(Gamma - i(v - w))((Gamma+2g)/2 + iw)].
inline std::complex<double> zpl_two_colour(double omega, double nu,
                                           const EmitterContext& c) {
  const double a = 0.5 * (c.gamma + 2.0 * c.gamma_pd);
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> num =
      c.gamma * (i * (omega - nu) + c.gamma + 2.0 * c.gamma_pd);
  const std::complex<double> den = (a - i * nu) * (c.gamma - i * (nu - omega)) * (a + i * omega);
  return c.b2 * std::conj(cavity_response(omega, c.filter)) *
         cavity_response(nu, c.filter) * num / den;
}

inline std::complex<double> zpl_two_colour(double omega, double nu,
                                           const EmitterParams& e,
                                           const CavityFilter& f,
                                           const phonon::PhononParams& p,
                                           const phonon::Temperature& t) {
  return zpl_two_colour(omega, nu, EmitterContext(e, f, p, t));
}

/// Sideband part of the two-colour spectrum,
///   S_SB(w, v) = s(w, v) + s*(v, w),  s(w, v) = Gamma B^2 h*(w) h(v)
///                S_PH(w) / (Gamma - i(v - w)),
/// hermitian by construction. s_ph_w / s_ph_v are S_PH at the two arguments.
inline std::complex<double> sideband_two_colour_from(
    double omega, double nu, std::complex<double> s_ph_w,
    std::complex<double> s_ph_v, const EmitterContext& c) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> hw = cavity_response(omega, c.filter);
  const std::complex<double> hv = cavity_response(nu, c.filter);
  const std::complex<double> s_wv =
      c.gamma * c.b2 * std::conj(hw) * hv / (c.gamma - i * (nu - omega)) * s_ph_w;
  const std::complex<double> s_vw =
      c.gamma * c.b2 * std::conj(hv) * hw / (c.gamma - i * (omega - nu)) * s_ph_v;
  return s_wv + std::conj(s_vw);
}

inline std::complex<double> sideband_two_colour(
    double omega, double nu, const EmitterParams& e, const CavityFilter& f,
    const phonon::PhononParams& p, const phonon::Temperature& t,
    phonon::SidebandMode mode = phonon::SidebandMode::exact) {
  const EmitterContext c(e, f, p, t);
  const auto s_w = phonon::sideband_spectrum(omega, p, t, mode);
  const auto s_v = (nu == omega) ? s_w : phonon::sideband_spectrum(nu, p, t, mode);
  return sideband_two_colour_from(omega, nu, s_w, s_v, c);
}

/// Diagonal emission spectrum S_ZPL(w, w) + S_SB(w, w), real and
/// non-negative up to quadrature noise.
inline double emission_spectrum(double omega, const EmitterParams& e,
                                const CavityFilter& f,
                                const phonon::PhononParams& p,
                                const phonon::Temperature& t,
                                phonon::SidebandMode mode = phonon::SidebandMode::exact) {
  const EmitterContext c(e, f, p, t);
  const double zpl = zpl_two_colour(omega, omega, c).real();
  if (p.alpha == 0.0) return zpl;
  const auto s_ph = phonon::sideband_spectrum(omega, p, t, mode);
  return zpl + sideband_two_colour_from(omega, omega, s_ph, s_ph, c).real();
}

struct Powers {
  double p_zpl;    // 2 pi B^2
  double p_sb;     // 2 pi (1 - B^2)
  double p_total;  // |h(0)|^2 P_ZPL + F P_SB
};

/// Emitted-power partition between the zero-phonon line and the sideband.
inline Powers powers(const EmitterParams& e, const CavityFilter& f,
                     const phonon::PhononParams& p, const phonon::Temperature& t,
                     phonon::FilteredFractionMode fmode =
                         phonon::FilteredFractionMode::weak_ratio) {
  (void)e;
  const double b2 = std::exp(-phonon::phi0(p, t));
  const double p_zpl = 2.0 * M_PI * b2;
  const double p_sb = 2.0 * M_PI * (1.0 - b2);
  const double h0 = filter_transmission(0.0, f);
  const double ff = p.alpha == 0.0 ? 0.0 : phonon::filtered_fraction(p, t, f, fmode);
  return {p_zpl, p_sb, h0 * p_zpl + ff * p_sb};
}

/// Closed-form two-photon-interference indistinguishability from
/// precomputed ingredients:
///   I = Gamma/(Gamma + 2 gamma_pd)
///       * (|h(0)|^2 B^2 / (|h(0)|^2 B^2 + F (1 - B^2)))^2.
inline double indistinguishability_from(double gamma, double gamma_pd, double b2,
                                        double filtered_frac, double h0_sq) {
  const double zpl = gamma / (gamma + 2.0 * gamma_pd);
  const double num = h0_sq * b2;
  const double ratio = num / (num + filtered_frac * (1.0 - b2));
  return zpl * ratio * ratio;
}

inline double indistinguishability(const EmitterParams& e, const CavityFilter& f,
                                   const phonon::PhononParams& p,
                                   const phonon::Temperature& t,
                                   phonon::FilteredFractionMode fmode =
                                       phonon::FilteredFractionMode::weak_ratio) {
  const double gpd = phonon::dephasing_rate(p, t);
  const double b2 = std::exp(-phonon::phi0(p, t));
  const double ff = p.alpha == 0.0 ? 0.0 : phonon::filtered_fraction(p, t, f, fmode);
  return indistinguishability_from(e.gamma, gpd, b2, ff, filter_transmission(0.0, f));
}

/// Grid controls for the frequency-space oracle. The ZPL patch is a
/// midpoint tan-mapped grid covering the whole axis with density set by the
/// line width; the sideband patch is a uniform Simpson grid.
struct NumericGrid {
  int zpl_points = 800;         // per axis (>= 400 for production use)
  double zpl_scale_mult = 3.0;  // tan-map scale in units of the ZPL half width
  int sideband_points = 1601;
  bool richardson_check = true;
  double richardson_tol = 0.01;
};

namespace detail {

inline double zpl_double_integral(const EmitterContext& c, int n, double scale_mult) {
  const double a = 0.5 * (c.gamma + 2.0 * c.gamma_pd);
  const double s = scale_mult * a;
  const double h = M_PI / n;
  std::vector<double> w(n), jac(n);
  for (int i = 0; i < n; ++i) {
    const double u = -0.5 * M_PI + (i + 0.5) * h;
    w[i] = s * std::tan(u);
    const double cu = std::cos(u);
    jac[i] = s / (cu * cu);
  }
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      row += std::norm(zpl_two_colour(w[i], w[j], c)) * jac[j];
    }
    sum += row * jac[i];
  }
  return sum * h * h;
}

inline double zpl_diagonal_integral(const EmitterContext& c, int n, double scale_mult) {
  const double a = 0.5 * (c.gamma + 2.0 * c.gamma_pd);
  const double s = scale_mult * a;
  const double h = M_PI / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = -0.5 * M_PI + (i + 0.5) * h;
    const double w = s * std::tan(u);
    const double cu = std::cos(u);
    sum += zpl_two_colour(w, w, c).real() * s / (cu * cu);
  }
  return sum * h;
}

inline double sideband_diagonal_integral(const EmitterContext& c,
                                         const phonon::PhononParams& p,
                                         const phonon::Temperature& t, int n) {
  if (p.alpha == 0.0) return 0.0;
  if (n % 2 == 0) ++n;
  const double cut = phonon::detail::gaussian_cutoff(p.nu_c, 1.0);
  std::vector<double> ws(n);
  for (int i = 0; i < n; ++i) ws[i] = -cut + 2.0 * cut * i / (n - 1);
  const auto sph = phonon::sideband_spectrum_table(ws, p, t);
  const double h = ws[1] - ws[0];
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wgt = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    // S_SB(w,w) = 2 B^2 |h(w)|^2 Re S_PH(w)
    sum += wgt * 2.0 * c.b2 * filter_transmission(ws[i], c.filter) * sph[i].real();
  }
  return sum * h / 3.0;
}

inline double indistinguishability_numeric_once(const EmitterContext& c,
                                                const phonon::PhononParams& p,
                                                const phonon::Temperature& t,
                                                const NumericGrid& g) {
  const double numerator = zpl_double_integral(c, g.zpl_points, g.zpl_scale_mult);
  const double d_zpl = zpl_diagonal_integral(c, g.zpl_points, g.zpl_scale_mult);
  const double d_sb = sideband_diagonal_integral(c, p, t, g.sideband_points);
  const double total = d_zpl + d_sb;
  return numerator / (total * total);
}

}  // namespace detail

/// Brute-force frequency-space indistinguishability,
///   I = P^-2 int dw int dv |S_ZPL(w, v)|^2,
///   P = int [S_ZPL(w, w) + S_SB(w, w)] dw,
/// with the true filter response everywhere and the exact sideband spectrum
/// in P. The sideband is incoherent and excluded from the numerator, so this
/// is the independent check of the closed form. Throws GridResolutionError
/// if halving the grid shifts the result by more than richardson_tol.
inline double indistinguishability_numeric(const EmitterParams& e,
                                           const CavityFilter& f,
                                           const phonon::PhononParams& p,
                                           const phonon::Temperature& t,
                                           const NumericGrid& grid = {}) {
  const EmitterContext c(e, f, p, t);
  const double fine = detail::indistinguishability_numeric_once(c, p, t, grid);
  if (grid.richardson_check) {
    NumericGrid coarse = grid;
    coarse.zpl_points = grid.zpl_points / 2;
    coarse.sideband_points = grid.sideband_points / 2 + 1;
    coarse.richardson_check = false;
    const double cval = detail::indistinguishability_numeric_once(c, p, t, coarse);
    if (std::abs(cval - fine) > grid.richardson_tol * std::abs(fine)) {
      throw GridResolutionError(
          "indistinguishability_numeric: refinement moved the estimate by more "
          "than the allowed fraction",
          cval, fine);
    }
  }
  return fine;
}

}  // namespace qdtpi::emitter
