// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "rollstab/params.hpp"

namespace rollstab {

using cplx = std::complex<double>;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;
using Vec3c = Eigen::Vector3cd;
using Eig3 = std::array<cplx, 3>;

// Fourier symbol of the linearization about the roll, acting on (r, psi, B).
Mat3 symbol_real(const RollParams& p, double k);
Mat3c assemble_symbol(const RollParams& p, double k);
// First and second k-derivatives of the symbol.
Mat3 symbol_dk(const RollParams& p, double k);
Mat3 symbol_dkk(const RollParams& p);

// Coefficients of det(nu I - L(k)) = nu^3 + a2 nu^2 + a1 nu + a0.
struct CharPoly {
  double a2 = 0, a1 = 0, a0 = 0;
};
CharPoly char_poly_coeffs(const RollParams& p, double k);
// Same coefficients read off an arbitrary 3x3 matrix (trace/minors/determinant).
CharPoly char_poly_of(const Mat3& m);

// a2 a1 - a0 = 2 k^2 (b4 k^4 + b2 k^2 + b0).
struct QuarticCoeffs {
  double b4 = 0, b2 = 0, b0 = 0;
};
QuarticCoeffs quartic_coeffs(const RollParams& p);
double hurwitz_product(const RollParams& p, double k);

// Leading-order symbol at infinity, lim l^2 L(1/l).
Mat3 symbol_at_infinity(const RollParams& p);

struct StabilityReport {
  RollParams params;
  std::vector<double> k;
  std::vector<CharPoly> a_coeffs;
  QuarticCoeffs b;
  double margin = 0;          // min over k != 0 of -sup Re sigma(L(k)) / k^2
  double min_a2 = 0, min_a0_scaled = 0, min_hurwitz_scaled = 0;
  std::string verdict;        // "stable", "unstable" or "boundary"
  std::string reason;
  Mat3 Linf = Mat3::Zero();
  Eig3 Linf_eigs{};
  double Linf_bound = 0;      // sup Re sigma(L_inf)
};
StabilityReport routh_hurwitz_check(const RollParams& p, const std::vector<double>& k_grid,
                                    double boundary_tol = 1e-12);

struct Eig3Result {
  Eig3 values{};
  double residual = 0;        // max |det(lambda I - M)| / (1 + |M|)^3
  bool ill_conditioned = false;
};
Eig3Result eig3(const Mat3c& m, double tol = 1e-10);

// Closed-form curvatures of the critical eigenvalue pair at k = 0.
struct Lambda1 {
  double plus = 0, minus = 0;   // real parts
  cplx plus_c, minus_c;
  bool complex_pair = false;
  double discriminant = 0;
};
Lambda1 lambda1_pm(const RollParams& p);

// Closed-form spectral projection onto the damped eigenvalue and its second
// k-derivative, both at k = 0.
std::pair<Mat3, Mat3> projection_P0_P2(const RollParams& p);

// Rank-one projection onto the eigenvalue ls of m, assuming the remaining two
// eigenvalues l1, l2 are separated from ls (they may coincide with each other).
Mat3c spectral_projection(const Mat3c& m, cplx ls, cplx l1, cplx l2);

// Max residual of the Green's-function identity linking P(0), P''(0) and the
// B-coupling vector (1, 0, gamma k^2).
double verify_specid(const RollParams& p, const std::vector<double>& k_samples);

struct ReducedCheck {
  double c1 = 0, c2 = 0;
  bool reduced_stable = false;
  bool spec_stable = false;
  bool consistent = false;
};
ReducedCheck reduced_phase_diffusion_check(const RollParams& p);

// Eigenvalue branches continued by nearest match from the exact structure at
// k = 0, on nonnegative increasing |k| values that start at 0. Output order per
// point: lambda_c+, lambda_c-, lambda_s. Throws numerical when a branch jumps by
// more than continuity_bound between neighbours.
std::vector<Eig3> continued_branches(const RollParams& p, const std::vector<double>& kabs,
                                     double continuity_bound);
// Distance from lambda_s to the nearer critical branch.
double spectral_gap(const Eig3& e);

struct K0Selection {
  double k0 = 0;
  double gap0 = 0;
  double crossing = 0;      // smallest |k| with gap < fraction * gap0, or 0 if none found
  bool capped = false;
};
// k0 = scale * crossing, capped at k0_max.
K0Selection select_k0(const RollParams& p, double fraction = 0.25, double k0_max = 2.0,
                      double dk = 1e-3, double scale = 0.5);

struct SpectralOptions {
  double k0 = 0;                  // <= 0: select automatically
  double continuity_bound = 0.5;  // max jump of a branch between neighbours
  double gap_fraction = 0.25;
  double k0_max = 2.0;
};

struct SpectralData {
  std::vector<double> k;
  // Per grid point: lambda_c+, lambda_c-, lambda_s, continued from k = 0.
  std::vector<Eig3> curves;
  std::vector<Mat3c> proj;
  Lambda1 split;
  double k0 = 0;
  double mu = 0;               // -sup lambda_s on (-k0, k0)
  double sup_re_nonzero = 0;   // sup Re over all branches and all k != 0
};
SpectralData spectral_curves(const RollParams& p, const std::vector<double>& k_grid,
                             const SpectralOptions& opt = {});

// Symmetric uniform grid -kmax..kmax with spacing dk that contains k = 0.
std::vector<double> symmetric_grid(double kmax, double dk);

}  // namespace rollstab
