// SPDX-License-Identifier: Apache-2.0
#include "rollstab/symbol.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rollstab/error.hpp"

namespace rollstab {

Mat3 symbol_real(const RollParams& p, double k) {
  const double a = p.a(), k2 = k * k;
  Mat3 m;
  m << -k2 - 2.0 * a, -2.0 * p.q, 1.0,
       -2.0 * p.q * k2, -k2, 0.0,
       -2.0 * p.gamma * a * k2, 0.0, -p.D * k2;
  return m;
}

Mat3c assemble_symbol(const RollParams& p, double k) { return symbol_real(p, k).cast<cplx>(); }

Mat3 symbol_dk(const RollParams& p, double k) {
  const double a = p.a();
  Mat3 m;
  m << -2.0 * k, 0.0, 0.0,
       -4.0 * p.q * k, -2.0 * k, 0.0,
       -4.0 * p.gamma * a * k, 0.0, -2.0 * p.D * k;
  return m;
}

Mat3 symbol_dkk(const RollParams& p) { return symbol_dk(p, 1.0); }

CharPoly char_poly_coeffs(const RollParams& p, double k) {
  const double q2 = p.q * p.q, a = p.a(), k2 = k * k, D = p.D, g = p.gamma;
  CharPoly c;
  c.a2 = 2.0 * a + (2.0 + D) * k2;
  c.a1 = (2.0 + k2 - 6.0 * q2 + 2.0 * D * (1.0 + k2 - q2) + 2.0 * g * a) * k2;
  c.a0 = (D * k2 + 2.0 * (D + g) * a - 4.0 * D * q2) * k2 * k2;
  return c;
}

CharPoly char_poly_of(const Mat3& m) {
  CharPoly c;
  c.a2 = -m.trace();
  c.a1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
         m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  c.a0 = -m.determinant();
  return c;
}

QuarticCoeffs quartic_coeffs(const RollParams& p) {
  const double q2 = p.q * p.q, a = p.a(), D = p.D, g = p.gamma;
  QuarticCoeffs b;
  b.b4 = (1.0 + D) * (1.0 + D);
  b.b2 = 3.0 * (1.0 - 3.0 * q2) + 2.0 * q2 + D * (D + g) * a + (D + g) * a + 3.0 * D * a;
  b.b0 = 2.0 * a * (1.0 - 3.0 * q2 + (D + g) * a);
  return b;
}

double hurwitz_product(const RollParams& p, double k) {
  const CharPoly c = char_poly_coeffs(p, k);
  return c.a2 * c.a1 - c.a0;
}

Mat3 symbol_at_infinity(const RollParams& p) {
  Mat3 m;
  m << -1.0, 0.0, 0.0,
       -2.0 * p.q, -1.0, 0.0,
       -2.0 * p.gamma * p.a(), 0.0, -p.D;
  return m;
}

namespace {

double max_real(const Eig3& e) {
  return std::max({e[0].real(), e[1].real(), e[2].real()});
}

}  // namespace

StabilityReport routh_hurwitz_check(const RollParams& p, const std::vector<double>& k_grid,
                                    double boundary_tol) {
  p.validate();
  StabilityReport rep;
  rep.params = p;
  rep.b = quartic_coeffs(p);
  rep.margin = std::numeric_limits<double>::infinity();
  rep.min_a2 = rep.min_a0_scaled = rep.min_hurwitz_scaled = std::numeric_limits<double>::infinity();
  const double a = p.a();
  for (double k : k_grid) {
    rep.k.push_back(k);
    const CharPoly c = char_poly_coeffs(p, k);
    rep.a_coeffs.push_back(c);
    rep.min_a2 = std::min(rep.min_a2, c.a2);
    if (k == 0.0) continue;
    const double k2 = k * k;
    rep.min_a0_scaled = std::min(rep.min_a0_scaled, c.a0 / (k2 * k2));
    rep.min_hurwitz_scaled = std::min(
        rep.min_hurwitz_scaled, rep.b.b4 * k2 * k2 + rep.b.b2 * k2 + rep.b.b0);
    const Eig3Result e = eig3(assemble_symbol(p, k));
    rep.margin = std::min(rep.margin, -max_real(e.values) / k2);
  }
  if (!std::isfinite(rep.margin)) rep.margin = 0.0;

  rep.Linf = symbol_at_infinity(p);
  rep.Linf_eigs = eig3(rep.Linf.cast<cplx>()).values;
  rep.Linf_bound = max_real(rep.Linf_eigs);

  const double eck = p.eckhaus_margin();
  const double cpl = p.coupling_margin();
  std::ostringstream why;
  if (std::abs(eck) <= boundary_tol || std::abs(cpl) <= boundary_tol) {
    rep.verdict = "boundary";
    why << "stability condition within " << boundary_tol << " of zero (q^2-1/3=" << -eck
        << ", D+gamma-2Dq^2/(1-q^2)=" << cpl << ")";
  } else if (eck < 0.0) {
    rep.verdict = "unstable";
    why << "q^2 >= 1/3 (q^2=" << p.q * p.q << ")";
  } else if (cpl < 0.0) {
    rep.verdict = "unstable";
    why << "D+gamma-2Dq^2/(1-q^2) = " << p.D + p.gamma << " - " << 2.0 * p.D * p.q * p.q / a
        << " < 0";
  } else {
    rep.verdict = "stable";
    why << "a2, a0 and a2*a1-a0 positive for k != 0";
  }
  rep.reason = why.str();
  return rep;
}

Eig3Result eig3(const Mat3c& m, double tol) {
  if (!m.allFinite()) fail(ErrorCode::invalid_argument, "eig3: non-finite matrix entries");
  Eigen::ComplexEigenSolver<Mat3c> solver(m, false);
  if (solver.info() != Eigen::Success) fail(ErrorCode::numerical, "eig3: eigensolver failed");
  Eig3Result r;
  for (int i = 0; i < 3; ++i) r.values[i] = solver.eigenvalues()(i);
  std::sort(r.values.begin(), r.values.end(), [](cplx x, cplx y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  const double scale = 1.0 + m.norm();
  for (const cplx& l : r.values) {
    const Mat3c shifted = l * Mat3c::Identity() - m;
    r.residual = std::max(r.residual, std::abs(shifted.determinant()) / (scale * scale * scale));
  }
  r.ill_conditioned = r.residual > tol;
  return r;
}

Lambda1 lambda1_pm(const RollParams& p) {
  const double a = p.a(), q2 = p.q * p.q;
  const double c = -0.5 * (1.0 + p.D + p.gamma) + q2 / a;
  const double disc = c * c - p.D - p.gamma + 2.0 * p.D * q2 / a;
  Lambda1 l;
  l.discriminant = disc;
  const cplx root = std::sqrt(cplx(disc, 0.0));
  l.plus_c = c + root;
  l.minus_c = c - root;
  l.complex_pair = disc < 0.0;
  l.plus = l.plus_c.real();
  l.minus = l.minus_c.real();
  return l;
}

std::pair<Mat3, Mat3> projection_P0_P2(const RollParams& p) {
  const double q = p.q, a = p.a(), g = p.gamma, D = p.D;
  const double a2 = a * a, a3 = a2 * a, q2 = q * q;
  Mat3 P0;
  P0 << 1.0, q / a, -1.0 / (2.0 * a),
        0.0, 0.0, 0.0,
        0.0, 0.0, 0.0;
  Mat3 P2;
  P2 << g / a - 2.0 * q2 / a2, 2.0 * g * q / a2 - 4.0 * q2 * q / a3,
        (1.0 + 3.0 * q2) / (2.0 * a3) - (D + 2.0 * g) / (2.0 * a2),
        2.0 * q / a, 2.0 * q2 / a2, -q / a2,
        2.0 * g, 2.0 * g * q / a, -g / a;
  return {P0, P2};
}

Mat3c spectral_projection(const Mat3c& m, cplx ls, cplx l1, cplx l2) {
  const Mat3c I = Mat3c::Identity();
  return (m - l1 * I) * (m - l2 * I) / ((ls - l1) * (ls - l2));
}

double verify_specid(const RollParams& p, const std::vector<double>& k_samples) {
  const auto [P0, P2] = projection_P0_P2(p);
  const double a = p.a();
  const Mat3 I = Mat3::Identity();
  double worst = 0.0;
  for (double k : k_samples) {
    const double k2 = k * k;
    const Eigen::Vector3d lhs = (I - P0) * Eigen::Vector3d(1.0, 0.0, p.gamma * k2) -
                                0.5 * k2 * P2 * Eigen::Vector3d::UnitX();
    const Eigen::Vector3d rhs(k2 * p.q * p.q / (a * a), -k2 * p.q / a, 0.0);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

ReducedCheck reduced_phase_diffusion_check(const RollParams& p) {
  const double s = 2.0 * p.q * p.q / p.a();
  ReducedCheck r;
  r.c1 = (1.0 - s) * (p.D + p.gamma) + p.gamma * s;
  r.c2 = 1.0 - s;
  r.reduced_stable = r.c1 > 0.0 && r.c2 > 0.0;
  r.spec_stable = p.spectrally_stable();
  r.consistent = r.reduced_stable == r.spec_stable;
  return r;
}

std::vector<Eig3> continued_branches(const RollParams& p, const std::vector<double>& kabs,
                                     double continuity_bound) {
  require(!kabs.empty() && kabs.front() == 0.0, "continued_branches: grid must start at k = 0");
  std::vector<Eig3> out;
  out.reserve(kabs.size());
  const Lambda1 l1 = lambda1_pm(p);
  // Trace identity: the three k^2-coefficients sum to -(2 + D).
  const cplx s1 = -(2.0 + p.D) - l1.plus_c - l1.minus_c;
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (std::size_t i = 0; i < kabs.size(); ++i) {
    const double k = kabs[i];
    Eig3 pred;
    if (i == 0 || i == 1) {
      const double k2 = k * k;
      pred = {l1.plus_c * k2, l1.minus_c * k2, -2.0 * p.a() + s1 * k2};
    } else {
      const double w = (k - kabs[i - 1]) / (kabs[i - 1] - kabs[i - 2]);
      for (int j = 0; j < 3; ++j) pred[j] = out[i - 1][j] + w * (out[i - 1][j] - out[i - 2][j]);
    }
    const Eig3 ev = eig3(assemble_symbol(p, k)).values;
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 6; ++s) {
      double cost = 0.0;
      for (int j = 0; j < 3; ++j) cost += std::abs(ev[perms[s][j]] - pred[j]);
      if (cost < best_cost) {
        best_cost = cost;
        best = s;
      }
    }
    Eig3 cur;
    for (int j = 0; j < 3; ++j) cur[j] = ev[perms[best][j]];
    if (i > 0) {
      for (int j = 0; j < 3; ++j) {
        if (std::abs(cur[j] - out[i - 1][j]) > continuity_bound) {
          std::ostringstream os;
          os << "branch continuation failed at k=" << k << " (branch " << j << " jumps by "
             << std::abs(cur[j] - out[i - 1][j]) << ")";
          fail(ErrorCode::numerical, os.str());
        }
      }
    }
    out.push_back(cur);
  }
  return out;
}

double spectral_gap(const Eig3& e) {
  return std::min(std::abs(e[2] - e[0]), std::abs(e[2] - e[1]));
}

K0Selection select_k0(const RollParams& p, double fraction, double k0_max, double dk, double scale) {
  p.validate();
  require(fraction > 0.0 && fraction < 1.0, "gap fraction must lie in (0,1)");
  require(k0_max > 0.0 && dk > 0.0, "k0_max and dk must be positive");
  require(scale > 0.0 && scale <= 1.0, "k0 scale must lie in (0,1]");
  K0Selection sel;
  sel.gap0 = 2.0 * p.a();
  const int n = static_cast<int>(std::ceil(2.0 * k0_max / dk));
  std::vector<double> ks(n + 1);
  for (int i = 0; i <= n; ++i) ks[i] = i * dk;
  const std::vector<Eig3> br = continued_branches(p, ks, std::numeric_limits<double>::infinity());
  for (int i = 1; i <= n; ++i) {
    if (spectral_gap(br[i]) < fraction * sel.gap0) {
      sel.crossing = ks[i];
      break;
    }
  }
  if (sel.crossing > 0.0 && scale * sel.crossing <= k0_max) {
    sel.k0 = scale * sel.crossing;
  } else {
    sel.k0 = k0_max;
    sel.capped = true;
  }
  return sel;
}

SpectralData spectral_curves(const RollParams& p, const std::vector<double>& k_grid,
                             const SpectralOptions& opt) {
  p.validate();
  require(!k_grid.empty(), "spectral_curves: empty k grid");
  require(std::is_sorted(k_grid.begin(), k_grid.end()), "spectral_curves: k grid must be sorted");
  require(std::find(k_grid.begin(), k_grid.end(), 0.0) != k_grid.end(),
          "spectral_curves: k grid must contain k = 0");

  // The symbol is even in k, so branches are continued on |k| and mirrored.
  std::vector<double> kabs;
  kabs.reserve(k_grid.size());
  for (double k : k_grid) kabs.push_back(std::abs(k));
  std::sort(kabs.begin(), kabs.end());
  kabs.erase(std::unique(kabs.begin(), kabs.end()), kabs.end());
  const std::vector<Eig3> br = continued_branches(p, kabs, opt.continuity_bound);

  SpectralData sd;
  sd.split = lambda1_pm(p);
  sd.k0 = opt.k0 > 0.0 ? opt.k0 : select_k0(p, opt.gap_fraction, opt.k0_max).k0;
  sd.mu = std::numeric_limits<double>::infinity();
  sd.sup_re_nonzero = -std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double k : k_grid) {
    const std::size_t idx =
        std::lower_bound(kabs.begin(), kabs.end(), std::abs(k)) - kabs.begin();
    const Eig3& e = br[idx];
    sd.k.push_back(k);
    sd.curves.push_back(e);
    if (k != 0.0) sd.sup_re_nonzero = std::max(sd.sup_re_nonzero, max_real(e));
    if (std::abs(k) < sd.k0) sd.mu = std::min(sd.mu, -e[2].real());
    if (spectral_gap(e) > 1e-8) {
      sd.proj.push_back(spectral_projection(assemble_symbol(p, k), e[2], e[0], e[1]));
    } else {
      sd.proj.push_back(Mat3c::Constant(cplx(nan, nan)));
    }
  }
  if (!std::isfinite(sd.mu)) sd.mu = 0.0;
  return sd;
}

std::vector<double> symmetric_grid(double kmax, double dk) {
  require(kmax >= 0.0 && dk > 0.0, "symmetric_grid: need kmax >= 0 and dk > 0");
  const long n = std::lround(kmax / dk);
  std::vector<double> g;
  g.reserve(2 * n + 1);
  for (long i = -n; i <= n; ++i) g.push_back(static_cast<double>(i) * dk);
  return g;
}

}  // namespace rollstab
