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
#include <complex>
#include <cstddef>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qdtpi/errors.hpp"

namespace qdtpi::numerics {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct ComplexQuadratureResult {
  std::complex<double> value{0.0, 0.0};
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

/// Adaptive Gauss-Kronrod with the tolerance contract used throughout this
/// library: the result is accepted when the error estimate satisfies
///   err <= max(abs_tol, rel_tol * max(|value|, 1e-3 * L1)).
/// Boost terminates on an L1-relative criterion, so a cheap non-adaptive
/// probe first sizes the interval and converts the absolute/relative
/// request into the equivalent internal tolerance. Without this, integrals
/// with strong cancellation (|value| << L1) either stop too early or split
/// to the depth cap and inflate the summed estimate.
template <class T, class F>
void run_gk(F&& f, double a, double b, double rel_tol, double abs_tol,
            unsigned max_depth, T& value, double& err, double& l1,
            std::size_t& evals, bool& bad, double& bad_x) {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::invalid_argument("integrate: tolerances must be positive");

  evals = 0;
  bad = false;
  bad_x = 0.0;
  auto probe = [&](double x) {
    ++evals;
    const T v = f(x);
    if (!finite(v) && !bad) {
      bad = true;
      bad_x = x;
    }
    return v;
  };

  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;

  double l1_probe = 0.0;
  double err_probe = 0.0;
  const T value_probe = gk::integrate(probe, a, b, 0, 1.0, &err_probe, &l1_probe);

  // |integral| <= L1: when even that bound is inside the absolute tolerance
  // the interval is done. This also keeps noise-level integrands (which can
  // never converge in a relative sense) from splitting to the depth cap.
  if (l1_probe <= 0.5 * abs_tol) {
    value = value_probe;
    err = l1_probe;
    l1 = l1_probe;
    return;
  }

  const double scale = std::max({std::abs(value_probe), 1e-3 * l1_probe,
                                 std::numeric_limits<double>::min()});
  const double target = std::max(abs_tol, rel_tol * scale);
  const double internal_tol =
      std::clamp(0.25 * target / std::max(l1_probe, 1e-300), 1e-15, 0.1);

  value = gk::integrate(probe, a, b, max_depth, internal_tol, &err, &l1);
}

template <class T, class F>
void integrate_impl(F&& f, double a, double b, double rel_tol, double abs_tol,
                    unsigned max_depth, T& value, double& err,
                    std::size_t& evals) {
  double l1 = 0.0;
  bool bad = false;
  double bad_x = 0.0;
  run_gk<T>(f, a, b, rel_tol, abs_tol, max_depth, value, err, l1, evals, bad, bad_x);

  if (bad || !finite(value)) {
    throw IntegrandError("integrate: integrand returned a non-finite value at x = " +
                             std::to_string(bad_x),
                         bad_x, evals);
  }
  if (err > std::max(abs_tol, rel_tol * std::max(std::abs(value), 1e-3 * l1))) {
    throw QuadratureError(
        "integrate: tolerance not reached within subdivision budget",
        std::abs(value), err, evals);
  }
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of a real-valued integrand over
/// [a, b]; a and/or b may be infinite (the integrand must then decay at
/// least exponentially). Throws IntegrandError on NaN/Inf from the
/// integrand and QuadratureError (carrying the best estimate) if the
/// requested tolerance is not reached within the subdivision budget.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                           double abs_tol = 1e-12, unsigned max_depth = 12) {
  QuadratureResult r;
  detail::integrate_impl<double>(f, a, b, rel_tol, abs_tol, max_depth, r.value,
                                 r.abs_error_estimate, r.evaluations);
  return r;
}

/// Complex-valued integrand, integrated in one pass (real and imaginary
/// parts share the same adaptive subdivision).
template <class F>
ComplexQuadratureResult integrate_complex(F&& f, double a, double b,
                                          double rel_tol = 1e-10,
                                          double abs_tol = 1e-12,
                                          unsigned max_depth = 12) {
  ComplexQuadratureResult r;
  detail::integrate_impl<std::complex<double>>(f, a, b, rel_tol, abs_tol,
                                               max_depth, r.value,
                                               r.abs_error_estimate, r.evaluations);
  return r;
}

namespace detail {

/// Length L such that |f| stays below `floor_frac` times its head scale on
/// [L, 2L]; sampled geometrically, capped at `cap`.
template <class F>
double decay_length(F&& f, double floor_frac, double cap = 1024.0) {
  double scale = 0.0;
  for (double t : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0})
    scale = std::max(scale, std::abs(f(t)));
  if (scale == 0.0) return 1.0;
  double L = 1.0;
  while (L < cap) {
    double tail = 0.0;
    for (double s : {1.0, 1.25, 1.5, 1.75, 2.0})
      tail = std::max(tail, std::abs(f(L * s)));
    if (tail <= floor_frac * scale) break;
    L *= 2.0;
  }
  return 2.0 * L;
}

}  // namespace detail

/// Fourier-type integral of a decaying complex-valued function:
///   F(omega) = int_0^inf f(tau) exp(-i omega tau) dtau.
/// The integration window is chosen from the observed decay of |f| and
/// split so each panel covers a few oscillation periods.
template <class F>
std::complex<double> fourier_integral(F&& f, double omega, double tol = 1e-9) {
  if (!(tol > 0.0)) throw std::invalid_argument("fourier_integral: tol must be positive");
  if (!std::isfinite(omega))
    throw std::invalid_argument("fourier_integral: omega must be finite");

  const double T = detail::decay_length(f, std::min(1e-3 * tol, 1e-12));
  const int panels = std::max(
      1, static_cast<int>(std::ceil(T * (std::abs(omega) + 1.0) / (4.0 * M_PI))));
  const double abs_tol = tol / panels;

  std::complex<double> total{0.0, 0.0};
  for (int k = 0; k < panels; ++k) {
    const double t0 = T * k / panels;
    const double t1 = T * (k + 1) / panels;
    auto g = [&](double tau) {
      return f(tau) * std::exp(std::complex<double>(0.0, -omega * tau));
    };
    total += integrate_complex(g, t0, t1, tol, abs_tol, 10).value;
  }
  return total;
}

}  // namespace qdtpi::numerics
