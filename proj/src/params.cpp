// SPDX-License-Identifier: Apache-2.0
#include "rollstab/params.hpp"

#include <cmath>
#include <sstream>

#include "rollstab/error.hpp"

namespace rollstab {

double RollParams::coupling_margin() const { return D + gamma - 2.0 * D * q * q / a(); }

bool RollParams::spectrally_stable() const {
  return q * q < 1.0 / 3.0 && coupling_margin() > 0.0;
}

void RollParams::validate() const {
  require(std::isfinite(q) && std::isfinite(D) && std::isfinite(gamma),
          "roll parameters must be finite");
  require(D > 0.0, "diffusivity D must be positive");
  require(q * q < 1.0, "roll wavenumber must satisfy q^2 < 1");
}

std::string RollParams::describe() const {
  std::ostringstream os;
  os << "q=" << q << " D=" << D << " gamma=" << gamma;
  return os.str();
}

}  // namespace rollstab
