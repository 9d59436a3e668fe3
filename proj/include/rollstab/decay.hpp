// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rollstab/dynamics.hpp"
#include "rollstab/fit.hpp"

namespace rollstab {

// One logged norm along a trajectory.
struct DecaySeries {
  NormId id = NormId::r;
  std::vector<double> t, value;
  // Times strictly increasing, values finite, equal lengths.
  void validate() const;
};

// Series for |r|, |r_x|, |r_xx|, |phi_x|, |phi_xx|, |phi|, |B|, |B_x| in that
// order. Throws divergence for a diverged trajectory.
std::vector<DecaySeries> track_norms(const Trajectory& tr);
DecaySeries series_of(const Trajectory& tr, NormId id);

struct FitWindow {
  double t_min = 4.0, t_max = 0.0;
};
// [4, min(T, 0.1 (L / 4 pi)^2 / D_max)] with D_max = max(1, D).
FitWindow default_fit_window(const Trajectory& tr);

// Power-law fit of value against 1 + t on the window. Requires positive
// values and at least 20 samples inside the window.
RateFit fit_rate(const DecaySeries& s, const FitWindow& w);

enum class TemplateKind { explong, partloc, q0 };
struct TemplateVariant {
  TemplateKind kind = TemplateKind::explong;
  double p = 1.0;      // partloc only
  double alpha = 0.1;  // q0 only, in (0, 1/4)
  void validate() const;
  std::string describe() const;
};
TemplateVariant parse_template(const std::string& s);

struct TemplateValue {
  TemplateVariant variant;
  double t = 0;
  double eta1 = 0, eta2 = 0, eta = 0;
};

// Running suprema of the weighted norms up to time t over the logged samples.
// |V| is the sum of the sup norms of r, psi and B, and |V_x| likewise.
TemplateValue eval_template(const TemplateVariant& v, const Trajectory& tr, double t);
// The same evaluation at every logged time.
std::vector<TemplateValue> template_series(const TemplateVariant& v, const Trajectory& tr);

// |r + q/(1-q^2) phi_x| along a real Ginzburg-Landau trajectory (gamma = 0
// and B identically zero).
DecaySeries damped_mode_series(const Trajectory& tr, double q);

// Bounding integrals of the toy iteration, compared with their claimed
// envelopes:
//   A:  int_0^t (t-s)^(-j/2) (1+s)^(-3/2) ds            vs (1+t)^(-j/2),        j in {0, 1}
//   B:  int_0^t (t-s)^(-1/2) (1+s)^(-3/(2p)) ds         vs (1+t)^(-1/(2p))
//   B': int_0^{xi(t) t/2} (t-s)^(-1) (1+s)^(-3/(2p)) ds
//       + int_{xi(t) t/2}^t (t-s)^(-1/2) (1+s)^(-1/2-3/(2p)) ds
//                                                        vs (1+t)^(-1/2-1/(2p))
// with xi the indicator of t > 1.
enum class OracleKind { A, B, Bprime };
OracleKind parse_oracle_kind(const std::string& s);
const char* oracle_kind_name(OracleKind k);

struct OracleReport {
  OracleKind kind = OracleKind::A;
  double index = 0;              // j for A, p otherwise
  std::vector<double> t, integral, ratio;
  double sup_ratio = 0;
  // Relative change of the running supremum over the last decade of samples.
  double last_decade_variation = 0;
};
double oracle_integral(OracleKind kind, double index, double t);
double oracle_bound(OracleKind kind, double index, double t);
OracleReport integral_inequality_oracle(OracleKind kind, double index, const std::vector<double>& t_samples);

// Toy iteration: u_t = u_xx + alpha1 (u_x)^3 or u_t = u_xx + alpha2 (u^3)_x.
enum class ToyCase { alpha1, alpha2 };
ToyCase parse_toy_case(const std::string& s);
const char* toy_case_name(ToyCase c);

struct ToyExperimentOptions {
  double eps = 0.01;
  double p = 1.0;            // alpha2 case: L^p exponent of the Gaussian datum
  double coefficient = 1.0;  // alpha1 or alpha2
  std::uint64_t seed = 1;
  Grid grid{};
  SimulationOptions sim{};
  // Primary exponent: u_x in the alpha1 case, u in the alpha2 case.
  double tolerance_primary = 0.15, tolerance_secondary = 0.2;
};

struct ToyReport {
  ToyCase toy_case = ToyCase::alpha1;
  ToyExperimentOptions options;
  ToyTrajectory trajectory;
  FitWindow window;
  RateFit u_fit, ux_fit;
  double u_theory = 0, ux_theory = 0;
  bool u_checked = false, ux_checked = false;
  double u_sup = 0;          // max |u| over the run
  bool pass = false;
  std::string note;
};
// alpha1 case: random bounded u0 normalized in W^{1,inf}; checks the u_x
// exponent -1/2 and boundedness of u. alpha2 case: Gaussian u0 normalized in
// L^p + W^{1,inf}; checks u against -1/(2p) and u_x against -1/2 - 1/(2p).
ToyReport toy_scheme_experiment(ToyCase c, const ToyExperimentOptions& opt);

}  // namespace rollstab
