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

#include <complex>
#include <stdexcept>

namespace qdtpi {

/// Lorentzian spectral filter of the collection cavity.
struct CavityFilter {
  double kappa;  // full width, ps^-1
  double delta;  // filter center relative to the emitter line, ps^-1

  CavityFilter(double kappa_, double delta_) : kappa(kappa_), delta(delta_) {
    if (!(kappa > 0.0)) throw std::invalid_argument("CavityFilter: kappa must be > 0");
  }

  /// Effectively transparent filter (|h|^2 = 1 over any frequency of interest).
  static CavityFilter open() { return CavityFilter(1e12, 0.0); }
};

/// Filter amplitude response h(w) = (kappa/2) / (i(w - delta) + kappa/2);
/// |h(delta)| = 1 and |h(0)|^2 = (kappa/2)^2 / (delta^2 + (kappa/2)^2).
inline std::complex<double> cavity_response(double omega, const CavityFilter& f) {
  const double hw = 0.5 * f.kappa;
  return hw / std::complex<double>(hw, omega - f.delta);
}

inline double filter_transmission(double omega, const CavityFilter& f) {
  const double hw = 0.5 * f.kappa;
  const double d = omega - f.delta;
  return hw * hw / (d * d + hw * hw);
}

}  // namespace qdtpi
