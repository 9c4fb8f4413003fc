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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qdtpi {

/// Quadrature did not reach the requested tolerance, or the integrand
/// produced a non-finite value. Carries the best estimate obtained.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best_estimate,
                  double error_estimate, std::size_t evaluations)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        error_estimate_(error_estimate),
        evaluations_(evaluations) {}

  double best_estimate() const { return best_estimate_; }
  double error_estimate() const { return error_estimate_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  double best_estimate_;
  double error_estimate_;
  std::size_t evaluations_;
};

/// Integrand returned NaN/Inf; records the offending abscissa.
class IntegrandError : public QuadratureError {
 public:
  IntegrandError(const std::string& what, double abscissa,
                 std::size_t evaluations)
      : QuadratureError(what, 0.0, 0.0, evaluations), abscissa_(abscissa) {}

  double abscissa() const { return abscissa_; }

 private:
  double abscissa_;
};

/// Grid-based estimate moved by more than the allowed fraction under
/// refinement.
class GridResolutionError : public std::runtime_error {
 public:
  GridResolutionError(const std::string& what, double coarse, double fine)
      : std::runtime_error(what), coarse_(coarse), fine_(fine) {}

  double coarse_value() const { return coarse_; }
  double fine_value() const { return fine_; }

 private:
  double coarse_;
  double fine_;
};

}  // namespace qdtpi
