// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rollstab/dynamics.hpp"

namespace rollstab {

enum class InitialKind { zero, random_bounded, quasiperiodic, gaussian_localized, lp_localized_B, sideband };
InitialKind parse_initial_kind(const std::string& s);
const char* initial_kind_name(InitialKind k);

// Random-phase Fourier series on lacunary wavenumbers 0.02 * 2^(j/4) up to 8
// (snapped to grid modes), amplitudes (1 + k)^-3, scaled so that the
// W^{order,inf} norm equals eps. Wavenumbers reach down to a few grid modes,
// so the field is bounded but far from localized.
std::vector<double> random_bounded_field(const Grid& g, double eps, std::uint64_t seed, int order = 2);
// Three cosines at wavenumbers 0.1, 0.1 sqrt(2), 0.1 sqrt(3) (snapped), same scaling.
std::vector<double> quasiperiodic_field(const Grid& g, double eps, std::uint64_t seed, int order = 2);
// Gaussian bump of the given width centred in the domain, scaled so that
// |f|_{L^p} + |f|_{W^{1,inf}} equals eps.
std::vector<double> gaussian_field(const Grid& g, double eps, double p, double width = 2.0);
// amplitude * cos(k x) with k snapped to the nearest grid mode.
std::vector<double> sideband_field(const Grid& g, double amplitude, double k);

// W^{order,inf} norm with spectral derivatives: sum of sup norms of f^(0..order).
double w_inf_norm(const Grid& g, const std::vector<double>& f, int order);

struct InitialSpec {
  InitialKind r = InitialKind::zero;
  InitialKind phi = InitialKind::zero;
  InitialKind B = InitialKind::zero;
  double eps = 0.01;
  double p = 1.0;            // L^p exponent of localized fields
  std::uint64_t seed = 1;
  double sideband_k = 0.4;
  double width = 2.0;        // Gaussian width
  void validate() const;
};

// Norms of the generated data, reported alongside the state.
struct InitialData {
  FieldState state;
  InitialSpec spec;
  double r_w2 = 0, phi_w2 = 0, B_w1 = 0, B_lp = 0, psi_sup = 0;
};

// Per-field generation. Each field of a non-zero kind is normalized to eps in
// the norm of its hypothesis (W^{2,inf} for r and phi, W^{1,inf} for B, plus
// L^p for localized B). psi is the spectral derivative of phi.
InitialData make_initial(const Grid& g, const InitialSpec& spec);

// Presets by a single kind: random_bounded, quasiperiodic and
// gaussian_localized fill r, phi and B; lp_localized_B pairs bounded r, phi
// with a localized B; sideband perturbs phi only.
InitialData make_initial(InitialKind kind, const Grid& g, double eps, std::uint64_t seed, double p = 1.0);

}  // namespace rollstab
