// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace rollstab {

// Parameter point (q, D, gamma) of the modified Ginzburg-Landau system.
// gamma = 0 with B = 0 recovers the real Ginzburg-Landau equation.
struct RollParams {
  double q = 0.0;
  double D = 1.0;
  double gamma = 0.0;

  double a() const { return 1.0 - q * q; }

  // D + gamma - 2 D q^2 / (1 - q^2); positive together with q^2 < 1/3
  // characterizes spectral stability.
  double coupling_margin() const;
  double eckhaus_margin() const { return 1.0 / 3.0 - q * q; }
  bool spectrally_stable() const;

  // Throws invalid_argument when D <= 0, any entry is non-finite, or
  // q^2 >= 1 (the roll amplitude sqrt(1 - q^2) would not exist).
  void validate() const;

  std::string describe() const;
};

}  // namespace rollstab
