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

namespace qdtpi::constants {

// Unit system: hbar = 1, times in ps, frequencies and rates in ps^-1,
// temperatures in K. Energies quoted in meV are converted on input.
inline constexpr double k_b_over_hbar = 0.1309;  // ps^-1 per K
inline constexpr double mev_to_ps_inv = 1.519;   // ps^-1 per meV

// Gaussian envelopes exp(-p nu^2/nu_c^2) are truncated where they fall
// below this fraction of their peak.
inline constexpr double envelope_floor = 1e-16;

}  // namespace qdtpi::constants
