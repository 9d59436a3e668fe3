// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rollstab/fit.hpp"
#include "rollstab/symbol.hpp"

namespace rollstab {

// C-infinity step: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s);
// Cutoff equal to 1 on |k| <= k0/2 and 0 on |k| >= k0.
double cutoff_chi(double k, double k0);

struct ModeFilterTable {
  double k0 = 0;
  std::vector<double> k;
  std::vector<double> chi;
  std::vector<Mat3c> Pc, Ps;
  std::vector<Mat3c> P;          // spectral projection onto lambda_s where chi > 0
  double min_gap = 0;            // smallest lambda_s separation where chi > 0
};
ModeFilterTable build_mode_filters(const RollParams& p, double k0, const std::vector<double>& k_grid);

// Uniform periodic z-grid on [-length/2, length/2) with its FFT-ordered dual
// wavenumbers k_j = j * 2 pi / length.
struct ZGrid {
  double length = 800.0;
  std::size_t n = 8192;
  double dz() const { return length / static_cast<double>(n); }
  double dk() const;
  double z(std::size_t i) const { return (static_cast<double>(i) - 0.5 * static_cast<double>(n)) * dz(); }
  std::vector<double> zs() const;
  std::vector<double> ks() const;   // FFT order
};

// Matrix kernel samples G(z_i) for i = 0..n-1, row-major 3x3 per sample.
using KernelSamples = std::vector<Mat3c>;

// G(z) = (1/2 pi) * integral of M(k) exp(i k z) dk, by FFT quadrature on the
// dual grid of g.
KernelSamples kernel_from_multiplier(const ZGrid& g, const std::function<Mat3c(double)>& M);
// The reverse direction, used for convolution tests: samples of the multiplier
// at the FFT-ordered wavenumbers, recovered from the kernel samples.
std::vector<Mat3c> multiplier_from_kernel(const ZGrid& g, const KernelSamples& G);

// L-infinity -> L-infinity bound: max over rows of the z-integral of the
// absolute row sum (trapezoid rule on the periodic grid).
double operator_norm_Linf(const ZGrid& g, const KernelSamples& G);
// L^p -> L^infinity bound through the conjugate exponent; p = 1 gives the
// sup-norm of the absolute row sum. p = infinity reduces to operator_norm_Linf.
double operator_norm_Lp(const ZGrid& g, const KernelSamples& G, double p);
// Scalar kernels (heat references).
double operator_norm_Linf(double dz, const std::vector<double>& kernel);
// Fraction of the absolute kernel mass in the outer eighth at each end.
double tail_fraction(const KernelSamples& G);
double max_imag(const KernelSamples& G);

struct KernelTable {
  ZGrid grid;
  std::vector<double> times;
  int derivatives = 0;                   // total x-derivative order n + m
  std::vector<KernelSamples> Gc, Ge;
  std::vector<double> opnorm_c, opnorm_e;
  std::vector<double> tail_c, tail_e;
  double max_imag = 0;
  std::vector<Mat3c> mass_c;             // z-integral of Gc per time
};

struct KernelOptions {
  int derivatives = 0;
  double tail_tol = 1e-4;                // refuse when tail fraction exceeds this
};
KernelTable greens_kernel(const RollParams& p, const ModeFilterTable& filters,
                          const std::vector<double>& times, const ZGrid& g,
                          const KernelOptions& opt = {});

// Multipliers of the decomposition at a single (k, t): e^{tL}Pc and
// e^{tL}(Ps + (1 - chi) I).
Mat3c multiplier_critical(const RollParams& p, double k, double t, const ModeFilterTable& f,
                          std::size_t idx);
Mat3c multiplier_exponential(const RollParams& p, double k, double t, const ModeFilterTable& f,
                             std::size_t idx);
Mat3 symbol_exp(const RollParams& p, double k, double t);

struct EstimateCertificate {
  std::string id;
  double exponent = 0;       // fitted power or, for exponential estimates, -rate
  double theoretical = 0;
  double tolerance = 0;
  double constant = 0;
  double t_min = 0, t_max = 0;
  double residual = 0;
  double rate = 0;           // exponential estimates only
  double short_time_constant = 0;
  bool exponential = false;
  bool pass = false;
  std::string note;
  std::vector<double> times, values;
};

struct CertifyOptions {
  ZGrid grid{};
  double k0 = 0;             // <= 0: select automatically
  // Automatic k0 as a fraction of the gap-crossing wavenumber. Half the
  // crossing leaves the cutoff transition at |k| ~ 0.3, which still shapes
  // second-derivative kernels at t = 4.
  double k0_scale = 0.8;
  double t_min = 4.0, t_max = 400.0;
  std::size_t n_times = 40;
  double tolerance = 0.1;
  // Kernel mass allowed in the outer quarter of the z-window. The smooth
  // cutoff gives the critical kernel stretched-exponential tails, so this is
  // looser than the default for raw kernel tables.
  double tail_tol = 1e-4;
};

// Sup-norm decay of d^n S_c(t) d^m. p = infinity for bounded data.
EstimateCertificate certify_diffusive(const RollParams& p, int n, int m, double lp,
                                      const CertifyOptions& opt = {});
// Extra decay of the critical semigroup on the first component.
EstimateCertificate certify_first_component(const RollParams& p, const CertifyOptions& opt = {});
// which = 1: S_c(t) d^m (g,0,0) in terms of d g; which = 2: S_c(t)(-h,0,gamma h'').
EstimateCertificate certify_refined(const RollParams& p, int which, int m,
                                    const CertifyOptions& opt = {});

struct ExponentialOptions {
  ZGrid grid{800.0, 8192};
  ZGrid short_grid{800.0, 262144};
  double k0 = 0;
  double k0_scale = 0.8;
  double t_min = 1.0, t_max = 10.0;
  std::size_t n_times = 19;
  std::vector<double> short_times{1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
  double short_time_bound = 10.0;
  double tail_tol = 1e-4;
};
EstimateCertificate certify_exponential(const RollParams& p, int n, int m,
                                        const ExponentialOptions& opt = {});

// Block form of the lemma: central (2x2) or stable (1x1) block, built from the
// explicit similarity S(k) that separates the critical invariant subspace.
enum class Block { central, stable };
EstimateCertificate certify_lowfreq_lemma(const RollParams& p, int n, Block block, double lp,
                                          const CertifyOptions& opt = {});
EstimateCertificate certify_highfreq_lemma(const RollParams& p, int n,
                                           const ExponentialOptions& opt = {});

// Block diagonalization data at a single k inside (-k0, k0).
struct BlockForm {
  Mat3c S;        // columns span the critical subspace (first two) and the damped one
  Mat3c Lambda;   // S^{-1} L S
  double off_block = 0;
};
BlockForm block_form(const RollParams& p, double k);

// First and second k-derivatives of exp(t Lambda(k)) via the integral
// representation of the Frechet derivative, evaluated by Gauss-Legendre rules.
struct FrechetResult {
  Mat3c first, second;
  double quadrature_change = 0;  // difference between the two rule orders
};
FrechetResult frechet_dk_exp(const Mat3c& L, const Mat3c& dL, const Mat3c& ddL, double t,
                             double tol = 1e-10);
Mat3c expm3(const Mat3c& m);

// Reconstruction test: sup |(S_c + S_e) f - e^{tL} f| over random band-limited
// f on the periodic z-window, with S_c, S_e applied by kernel convolution.
// k0 <= 0 selects the cutoff automatically.
double reconstruction_error(const RollParams& p, double k0, double t, const ZGrid& g,
                            unsigned seed, double band = 2.0);
// Semigroup law on the full kernel: |G(t1 + t2) - G(t1) * G(t2)|_sup.
double semigroup_law_error(const RollParams& p, double t1, double t2, const ZGrid& g);

}  // namespace rollstab
