// SPDX-License-Identifier: Apache-2.0
#include "rollstab/semigroup.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "rollstab/error.hpp"
#include "rollstab/fft.hpp"

namespace rollstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string lp_label(double lp) {
  if (std::isinf(lp)) return "inf";
  std::ostringstream os;
  os << lp;
  return os.str();
}

cplx ik_power(double k, int n) {
  cplx v(1.0, 0.0);
  for (int i = 0; i < n; ++i) v *= cplx(0.0, k);
  return v;
}

}  // namespace

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double cutoff_chi(double k, double k0) { return smooth_step((k0 - std::abs(k)) / (0.5 * k0)); }

ModeFilterTable build_mode_filters(const RollParams& p, double k0, const std::vector<double>& k_grid) {
  p.validate();
  require(k0 > 0.0, "build_mode_filters: k0 must be positive");
  ModeFilterTable f;
  f.k0 = k0;
  f.k = k_grid;
  f.min_gap = kInf;

  // Continue branches on a refined |k| grid covering the support of chi so that
  // the damped eigenvalue is identified without branch swaps.
  std::vector<double> kabs{0.0};
  const int nfine = 4000;
  for (int i = 1; i <= nfine; ++i) kabs.push_back(k0 * i / nfine);
  for (double k : k_grid)
    if (std::abs(k) < k0) kabs.push_back(std::abs(k));
  std::sort(kabs.begin(), kabs.end());
  kabs.erase(std::unique(kabs.begin(), kabs.end()), kabs.end());
  const std::vector<Eig3> br = continued_branches(p, kabs, kInf);

  const Mat3c I = Mat3c::Identity();
  for (double k : k_grid) {
    const double chi = cutoff_chi(k, k0);
    f.chi.push_back(chi);
    if (chi == 0.0) {
      f.Pc.push_back(Mat3c::Zero());
      f.Ps.push_back(Mat3c::Zero());
      f.P.push_back(Mat3c::Zero());
      continue;
    }
    const std::size_t idx = std::lower_bound(kabs.begin(), kabs.end(), std::abs(k)) - kabs.begin();
    const Eig3& e = br[idx];
    const double gap = spectral_gap(e);
    f.min_gap = std::min(f.min_gap, gap);
    if (gap < 1e-6) {
      std::ostringstream os;
      os << "build_mode_filters: damped eigenvalue not separated at k=" << k << " (gap " << gap
         << "); choose a smaller k0";
      fail(ErrorCode::numerical, os.str());
    }
    const Mat3c P = spectral_projection(assemble_symbol(p, k), e[2], e[0], e[1]);
    f.P.push_back(P);
    f.Pc.push_back(chi * (I - P));
    f.Ps.push_back(chi * P);
  }
  return f;
}

double ZGrid::dk() const { return 2.0 * std::numbers::pi / length; }

std::vector<double> ZGrid::zs() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = z(i);
  return out;
}

std::vector<double> ZGrid::ks() const {
  std::vector<double> out(n);
  const long nn = static_cast<long>(n);
  for (long j = 0; j < nn; ++j) out[j] = static_cast<double>(j < nn / 2 ? j : j - nn) * dk();
  return out;
}

namespace {

KernelSamples kernel_from_samples(const ZGrid& g, const std::vector<Mat3c>& M) {
  require(M.size() == g.n, "kernel: multiplier sample count differs from grid size");
  require(g.n % 2 == 0, "kernel: grid size must be even");
  ComplexFFT fft(g.n);
  std::vector<cplx> buf(g.n), out(g.n);
  KernelSamples G(g.n, Mat3c::Zero());
  const double scale = 1.0 / g.dz();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      bool any = false;
      for (std::size_t s = 0; s < g.n; ++s) {
        buf[s] = (s % 2 ? -1.0 : 1.0) * M[s](i, j);
        any = any || buf[s] != cplx(0.0, 0.0);
      }
      if (!any) continue;
      fft.backward(buf.data(), out.data());
      for (std::size_t s = 0; s < g.n; ++s) G[s](i, j) = out[s] * scale;
    }
  }
  return G;
}

Mat3 expm_real(const Mat3& m) { return m.exp(); }

}  // namespace

Mat3 symbol_exp(const RollParams& p, double k, double t) { return expm_real(t * symbol_real(p, k)); }

Mat3c expm3(const Mat3c& m) { return m.exp(); }

KernelSamples kernel_from_multiplier(const ZGrid& g, const std::function<Mat3c(double)>& M) {
  const std::vector<double> ks = g.ks();
  std::vector<Mat3c> samples(g.n);
  for (std::size_t j = 0; j < g.n; ++j) samples[j] = M(ks[j]);
  return kernel_from_samples(g, samples);
}

std::vector<Mat3c> multiplier_from_kernel(const ZGrid& g, const KernelSamples& G) {
  require(G.size() == g.n, "multiplier_from_kernel: sample count differs from grid size");
  ComplexFFT fft(g.n);
  std::vector<cplx> buf(g.n), out(g.n);
  std::vector<Mat3c> M(g.n, Mat3c::Zero());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (std::size_t s = 0; s < g.n; ++s) buf[s] = G[s](i, j);
      fft.forward(buf.data(), out.data());
      for (std::size_t s = 0; s < g.n; ++s) M[s](i, j) = (s % 2 ? -1.0 : 1.0) * g.dz() * out[s];
    }
  }
  return M;
}

double operator_norm_Linf(const ZGrid& g, const KernelSamples& G) { return operator_norm_Lp(g, G, kInf); }

double operator_norm_Lp(const ZGrid& g, const KernelSamples& G, double lp) {
  require(lp >= 1.0, "operator_norm_Lp: p must be >= 1");
  double best = 0.0;
  for (int i = 0; i < 3; ++i) {
    double acc = 0.0;
    if (std::isinf(lp)) {
      for (const Mat3c& m : G) acc += m.row(i).cwiseAbs().sum();
      acc *= g.dz();
    } else if (lp == 1.0) {
      for (const Mat3c& m : G) acc = std::max(acc, m.row(i).cwiseAbs().sum());
    } else {
      const double pc = lp / (lp - 1.0);
      for (const Mat3c& m : G) acc += std::pow(m.row(i).cwiseAbs().sum(), pc);
      acc = std::pow(acc * g.dz(), 1.0 / pc);
    }
    best = std::max(best, acc);
  }
  return best;
}

double operator_norm_Linf(double dz, const std::vector<double>& kernel) {
  double acc = 0.0;
  for (double v : kernel) acc += std::abs(v);
  return acc * dz;
}

double tail_fraction(const KernelSamples& G) {
  const std::size_t n = G.size();
  double total = 0.0, tail = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double v = G[s].cwiseAbs().sum();
    total += v;
    if (s < n / 8 || s >= n - n / 8) tail += v;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double max_imag(const KernelSamples& G) {
  double m = 0.0;
  for (const Mat3c& g : G) m = std::max(m, g.imag().cwiseAbs().maxCoeff());
  return m;
}

Mat3c multiplier_critical(const RollParams& p, double k, double t, const ModeFilterTable& f,
                          std::size_t idx) {
  if (f.chi[idx] == 0.0) return Mat3c::Zero();
  return symbol_exp(p, k, t).cast<cplx>() * f.Pc[idx];
}

Mat3c multiplier_exponential(const RollParams& p, double k, double t, const ModeFilterTable& f,
                             std::size_t idx) {
  const Mat3c rest = f.Ps[idx] + (1.0 - f.chi[idx]) * Mat3c::Identity();
  return symbol_exp(p, k, t).cast<cplx>() * rest;
}

namespace {

double diffusion_max(const RollParams& p) {
  const Lambda1 l = lambda1_pm(p);
  return std::max({std::abs(l.plus_c), std::abs(l.minus_c), p.D, 1.0});
}

void check_tails(double tail, double tol, double t, const ZGrid& g, const RollParams& p) {
  if (tail <= tol) return;
  const double width = 2.0 * std::sqrt(diffusion_max(p) * std::max(t, 1.0));
  std::ostringstream os;
  os << "kernel tail fraction " << tail << " exceeds " << tol << " at t=" << t
     << "; window length " << g.length << " too short, need roughly "
     << 2.0 * width * std::sqrt(std::log(1.0 / tol)) + 40.0;
  fail(ErrorCode::numerical, os.str());
}

}  // namespace

KernelTable greens_kernel(const RollParams& p, const ModeFilterTable& filters,
                          const std::vector<double>& times, const ZGrid& g,
                          const KernelOptions& opt) {
  p.validate();
  require(filters.k.size() == g.n, "greens_kernel: filters must be built on the grid's wavenumbers");
  KernelTable kt;
  kt.grid = g;
  kt.times = times;
  kt.derivatives = opt.derivatives;
  const std::vector<double> ks = g.ks();
  for (double t : times) {
    require(t >= 0.0, "greens_kernel: times must be non-negative");
    std::vector<Mat3c> Mc(g.n), Me(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
      const cplx d = ik_power(ks[j], opt.derivatives);
      const Mat3c E = symbol_exp(p, ks[j], t).cast<cplx>();
      Mc[j] = filters.chi[j] == 0.0 ? Mat3c::Zero() : Mat3c(d * E * filters.Pc[j]);
      Me[j] = d * E * (filters.Ps[j] + (1.0 - filters.chi[j]) * Mat3c::Identity());
    }
    KernelSamples Gc = kernel_from_samples(g, Mc);
    KernelSamples Ge = kernel_from_samples(g, Me);
    kt.tail_c.push_back(tail_fraction(Gc));
    kt.tail_e.push_back(tail_fraction(Ge));
    check_tails(kt.tail_c.back(), opt.tail_tol, t, g, p);
    kt.max_imag = std::max({kt.max_imag, max_imag(Gc), max_imag(Ge)});
    Mat3c mass = Mat3c::Zero();
    for (const Mat3c& m : Gc) mass += m;
    kt.mass_c.push_back(mass * g.dz());
    kt.opnorm_c.push_back(operator_norm_Linf(g, Gc));
    kt.opnorm_e.push_back(operator_norm_Linf(g, Ge));
    kt.Gc.push_back(std::move(Gc));
    kt.Ge.push_back(std::move(Ge));
  }
  return kt;
}

namespace {

template <class Opt>
double resolve_k0(const RollParams& p, const Opt& opt) {
  if (!p.spectrally_stable())
    fail(ErrorCode::invalid_argument, "semigroup estimates need spectrally stable parameters: " + p.describe());
  return opt.k0 > 0.0 ? opt.k0 : select_k0(p, 0.25, 2.0, 1e-3, opt.k0_scale).k0;
}

// Operator norms of the kernel of M(k, t) over a list of times. Only
// wavenumbers with support(k) true are evaluated; the rest are zero.
struct NormSeries {
  std::vector<double> values;
  double worst_tail = 0;
};

NormSeries norm_series(const ZGrid& g, const std::vector<double>& times,
                       const std::function<bool(double)>& support,
                       const std::function<Mat3c(double, double)>& M, double lp, double tail_tol,
                       const RollParams& p) {
  const std::vector<double> ks = g.ks();
  NormSeries ns;
  for (double t : times) {
    std::vector<Mat3c> samples(g.n, Mat3c::Zero());
    for (std::size_t j = 0; j < g.n; ++j)
      if (support(ks[j])) samples[j] = M(ks[j], t);
    const KernelSamples G = kernel_from_samples(g, samples);
    const double tail = tail_fraction(G);
    ns.worst_tail = std::max(ns.worst_tail, tail);
    check_tails(tail, tail_tol, t, g, p);
    ns.values.push_back(operator_norm_Lp(g, G, lp));
  }
  return ns;
}

// Effective fit window: the configured one, capped where the diffusive
// kernel width 2 sqrt(D_max t) reaches a quarter of the z-window.
double window_cap(const RollParams& p, const ZGrid& g) {
  const double w = 0.25 * g.length;
  return w * w / (4.0 * diffusion_max(p));
}

EstimateCertificate power_certificate(std::string id, const std::vector<double>& times,
                                      const std::vector<double>& values, double theoretical,
                                      double tol, double t_min, double t_max) {
  EstimateCertificate c;
  c.id = std::move(id);
  c.times = times;
  c.values = values;
  c.theoretical = theoretical;
  c.tolerance = tol;
  const RateFit f = fit_power_law(times, values, t_min, t_max, 5);
  c.exponent = f.exponent;
  c.constant = f.constant;
  c.t_min = f.t_min;
  c.t_max = f.t_max;
  c.residual = f.residual;
  c.pass = std::abs(f.exponent - theoretical) <= tol;
  return c;
}

Mat3c critical_projection(const RollParams& p, double k, double k0, const Eig3& e) {
  const Mat3c P = spectral_projection(assemble_symbol(p, k), e[2], e[0], e[1]);
  return cutoff_chi(k, k0) * (Mat3c::Identity() - P);
}

// Branch lookup for arbitrary |k| < k0 through a fine continuation table.
class BranchTable {
 public:
  BranchTable(const RollParams& p, double kmax) : kmax_(kmax) {
    for (int i = 0; i <= kSteps; ++i) ks_.push_back(kmax * i / kSteps);
    br_ = continued_branches(p, ks_, kInf);
  }
  Eig3 at(const RollParams& p, double k) const {
    const double a = std::abs(k);
    const std::size_t i = std::min<std::size_t>(
        kSteps, static_cast<std::size_t>(std::lround(a / kmax_ * kSteps)));
    // Re-solve at k and match to the tabulated neighbour.
    const Eig3 ev = eig3(assemble_symbol(p, k)).values;
    Eig3 out;
    std::array<bool, 3> used{false, false, false};
    for (int b = 0; b < 3; ++b) {
      int best = -1;
      double d = kInf;
      for (int j = 0; j < 3; ++j) {
        if (used[j]) continue;
        const double dd = std::abs(ev[j] - br_[i][b]);
        if (dd < d) {
          d = dd;
          best = j;
        }
      }
      used[best] = true;
      out[b] = ev[best];
    }
    return out;
  }

 private:
  static constexpr int kSteps = 8000;
  double kmax_;
  std::vector<double> ks_;
  std::vector<Eig3> br_;
};

}  // namespace

EstimateCertificate certify_diffusive(const RollParams& p, int n, int m, double lp,
                                      const CertifyOptions& opt) {
  p.validate();
  require(n >= 0 && n <= 2 && m >= 0 && m <= 2, "certify_diffusive: n, m must lie in 0..2");
  require(lp >= 1.0, "certify_diffusive: p must be >= 1");
  const double k0 = resolve_k0(p, opt);
  const BranchTable bt(p, k0);
  const std::vector<double> times = geomspace(opt.t_min, opt.t_max, opt.n_times);
  const NormSeries ns = norm_series(
      opt.grid, times, [&](double k) { return std::abs(k) < k0; },
      [&](double k, double t) {
        const Mat3c Pc = critical_projection(p, k, k0, bt.at(p, k));
        return Mat3c(ik_power(k, n + m) * symbol_exp(p, k, t).cast<cplx>() * Pc);
      },
      lp, opt.tail_tol, p);
  const double theo = -0.5 * (n + m) - (std::isinf(lp) ? 0.0 : 0.5 / lp);
  std::ostringstream id;
  id << "diffusive n=" << n << " m=" << m << " p=" << lp_label(lp);
  EstimateCertificate c = power_certificate(id.str(), times, ns.values, theo, opt.tolerance,
                                            opt.t_min, std::min(opt.t_max, window_cap(p, opt.grid)));
  std::ostringstream note;
  note << "k0=" << k0 << " max tail fraction=" << ns.worst_tail;
  c.note = note.str();
  return c;
}

EstimateCertificate certify_first_component(const RollParams& p, const CertifyOptions& opt) {
  p.validate();
  const double k0 = resolve_k0(p, opt);
  const BranchTable bt(p, k0);
  const std::vector<double> times = geomspace(opt.t_min, opt.t_max, opt.n_times);
  const NormSeries ns = norm_series(
      opt.grid, times, [&](double k) { return std::abs(k) < k0; },
      [&](double k, double t) {
        const Mat3c Pc = critical_projection(p, k, k0, bt.at(p, k));
        Mat3c out = Mat3c::Zero();
        out.col(0) = symbol_exp(p, k, t).cast<cplx>() * Pc.col(0);
        return out;
      },
      kInf, opt.tail_tol, p);
  EstimateCertificate c =
      power_certificate("diffusive first component", times, ns.values, -1.0, 0.15, opt.t_min,
                        std::min(opt.t_max, window_cap(p, opt.grid)));
  c.note = "input (f1,0,0): critical projection of e1 vanishes to second order at k=0";
  return c;
}

EstimateCertificate certify_refined(const RollParams& p, int which, int m,
                                    const CertifyOptions& opt) {
  p.validate();
  require(which == 1 || which == 2, "certify_refined: which must be 1 or 2");
  require(m >= 0 && m <= 2, "certify_refined: m must lie in 0..2");
  const double k0 = resolve_k0(p, opt);
  const BranchTable bt(p, k0);
  const std::vector<double> times = geomspace(opt.t_min, opt.t_max, opt.n_times);
  const double g = p.gamma;
  const NormSeries ns = norm_series(
      opt.grid, times, [&](double k) { return std::abs(k) < k0; },
      [&](double k, double t) {
        const Mat3c Pc = critical_projection(p, k, k0, bt.at(p, k));
        const Mat3c E = symbol_exp(p, k, t).cast<cplx>();
        Mat3c out = Mat3c::Zero();
        if (which == 1) {
          // Data enters through d g, so the multiplier carries (ik)^(m-1).
          if (k == 0.0) return out;
          const cplx d = m >= 1 ? ik_power(k, m - 1) : 1.0 / cplx(0.0, k);
          out.col(0) = d * E * Pc.col(0);
        } else {
          const Vec3c v(-1.0, 0.0, -g * k * k);
          out.col(0) = E * Pc * v;
        }
        return out;
      },
      kInf, opt.tail_tol, p);
  double theo, tol;
  std::ostringstream id;
  if (which == 1) {
    theo = -0.5 * (m + 1);
    tol = opt.tolerance;
    id << "refined1 m=" << m;
  } else {
    const bool q_zero = p.q == 0.0;
    theo = q_zero ? -2.0 : -1.0;
    tol = q_zero ? 0.2 : 0.15;
    id << "refined2";
  }
  EstimateCertificate c = power_certificate(id.str(), times, ns.values, theo, tol, opt.t_min,
                                            std::min(opt.t_max, window_cap(p, opt.grid)));
  std::ostringstream note;
  note << "k0=" << k0;
  c.note = note.str();
  return c;
}

namespace {

EstimateCertificate exponential_certificate(
    std::string id, const RollParams& p, int order, const ExponentialOptions& opt,
    const std::function<bool(double)>& support, const std::function<Mat3c(double, double)>& M) {
  const std::vector<double> times = linspace(opt.t_min, opt.t_max, opt.n_times);
  const NormSeries ns = norm_series(opt.grid, times, support, M, kInf, opt.tail_tol, p);
  EstimateCertificate c;
  c.id = std::move(id);
  c.exponential = true;
  c.times = times;
  c.values = ns.values;
  // Remove the algebraic short-time factor before the log-linear fit.
  std::vector<double> scaled(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    scaled[i] = ns.values[i] / (1.0 + std::pow(times[i], -0.5 * order));
  const ExpFit f = fit_exponential(times, scaled, opt.t_min, opt.t_max, 3);
  c.rate = f.rate;
  c.exponent = -f.rate;
  c.constant = f.constant;
  c.t_min = f.t_min;
  c.t_max = f.t_max;
  c.residual = f.residual;

  double stc = 0.0;
  if (!opt.short_times.empty()) {
    const NormSeries st = norm_series(opt.short_grid, opt.short_times, support, M, kInf, opt.tail_tol, p);
    for (std::size_t i = 0; i < opt.short_times.size(); ++i)
      stc = std::max(stc, st.values[i] * std::pow(opt.short_times[i], 0.5 * order));
    for (std::size_t i = 0; i < opt.short_times.size(); ++i) {
      c.times.insert(c.times.begin() + i, opt.short_times[i]);
      c.values.insert(c.values.begin() + i, st.values[i]);
    }
  }
  c.short_time_constant = stc;
  c.pass = c.rate > 0.0 && std::isfinite(stc) && stc <= opt.short_time_bound;
  return c;
}

}  // namespace

EstimateCertificate certify_exponential(const RollParams& p, int n, int m,
                                        const ExponentialOptions& opt) {
  p.validate();
  require(n >= 0 && m >= 0 && n + m <= 1, "certify_exponential: need n + m <= 1");
  const double k0 = resolve_k0(p, opt);
  const BranchTable bt(p, k0);
  std::ostringstream id;
  id << "exponential n=" << n << " m=" << m;
  EstimateCertificate c = exponential_certificate(
      id.str(), p, n + m, opt, [](double) { return true; },
      [&](double k, double t) {
        const double chi = cutoff_chi(k, k0);
        Mat3c rest = (1.0 - chi) * Mat3c::Identity();
        if (chi > 0.0) {
          const Eig3 e = bt.at(p, k);
          rest += chi * spectral_projection(assemble_symbol(p, k), e[2], e[0], e[1]);
        }
        return Mat3c(ik_power(k, n + m) * symbol_exp(p, k, t).cast<cplx>() * rest);
      });
  std::ostringstream note;
  note << "k0=" << k0 << " fitted mu0=" << c.rate;
  c.note = note.str();
  return c;
}

BlockForm block_form(const RollParams& p, double k) {
  const Eig3 e = eig3(assemble_symbol(p, k)).values;
  // The damped eigenvalue is the one farthest from the origin near k = 0.
  int s = 0;
  for (int j = 1; j < 3; ++j)
    if (std::abs(e[j]) > std::abs(e[s])) s = j;
  cplx others[2];
  for (int j = 0, o = 0; j < 3; ++j)
    if (j != s) others[o++] = e[j];
  const Mat3c L = assemble_symbol(p, k);
  const Mat3c P = spectral_projection(L, e[s], others[0], others[1]);
  const Mat3c Q = Mat3c::Identity() - P;
  BlockForm b;
  b.S.col(0) = Q.col(1);
  b.S.col(1) = Q.col(2);
  b.S.col(2) = P.col(0);
  b.Lambda = b.S.inverse() * L * b.S;
  b.off_block = std::max({std::abs(b.Lambda(0, 2)), std::abs(b.Lambda(1, 2)),
                          std::abs(b.Lambda(2, 0)), std::abs(b.Lambda(2, 1))});
  return b;
}

EstimateCertificate certify_lowfreq_lemma(const RollParams& p, int n, Block block, double lp,
                                          const CertifyOptions& opt) {
  p.validate();
  require(n >= 0 && n <= 2, "certify_lowfreq_lemma: n must lie in 0..2");
  require(lp >= 1.0, "certify_lowfreq_lemma: p must be >= 1");
  const double k0 = resolve_k0(p, opt);

  // Hypotheses of the block lemma on the concrete symbol.
  const BlockForm b0 = block_form(p, 0.0);
  const double h = 1e-3;
  const BlockForm bp = block_form(p, h), bm = block_form(p, -h);
  const Eigen::Matrix2cd Lc0 = b0.Lambda.topLeftCorner<2, 2>();
  const Eigen::Matrix2cd Lc1 = (bp.Lambda - bm.Lambda).topLeftCorner<2, 2>() / (2.0 * h);
  const Eigen::Matrix2cd Lc2 =
      (bp.Lambda + bm.Lambda - 2.0 * b0.Lambda).topLeftCorner<2, 2>() / (h * h);
  const Eigen::Vector2cd ev2 = Lc2.eigenvalues();
  double sup_s = -kInf;
  for (int i = 0; i <= 200; ++i) {
    const double k = k0 * i / 200.0 * 0.999;
    sup_s = std::max(sup_s, block_form(p, k).Lambda(2, 2).real());
  }
  const bool hyp = Lc0.norm() < 1e-10 && Lc1.norm() < 1e-6 &&
                   std::max(ev2(0).real(), ev2(1).real()) < 0.0 && sup_s < 0.0;

  std::ostringstream id, note;
  id << "lowfreq " << (block == Block::central ? "central" : "stable") << " n=" << n
     << " p=" << lp_label(lp);
  note << "k0=" << k0 << " |Lc(0)|=" << Lc0.norm() << " |Lc'(0)|=" << Lc1.norm()
       << " max Re sigma(Lc''(0))=" << std::max(ev2(0).real(), ev2(1).real())
       << " sup Re lambda_s=" << sup_s << " hypotheses " << (hyp ? "hold" : "violated");

  const auto multiplier = [&](double k, double t) {
    const BlockForm b = block_form(p, k);
    Mat3c inner = Mat3c::Zero();
    if (block == Block::central) {
      inner.topLeftCorner<2, 2>() = (t * b.Lambda.topLeftCorner<2, 2>()).exp();
    } else {
      inner(2, 2) = std::exp(t * b.Lambda(2, 2));
    }
    return Mat3c(std::pow(k, n) * cutoff_chi(k, k0) * b.S * inner * b.S.inverse());
  };
  const auto support = [&](double k) { return std::abs(k) < k0; };

  EstimateCertificate c;
  if (block == Block::central) {
    const std::vector<double> times = geomspace(opt.t_min, opt.t_max, opt.n_times);
    const NormSeries ns = norm_series(opt.grid, times, support, multiplier, lp, opt.tail_tol, p);
    const double theo = -0.5 * n - (std::isinf(lp) ? 0.0 : 0.5 / lp);
    c = power_certificate(id.str(), times, ns.values, theo, 0.15, opt.t_min,
                          std::min(opt.t_max, window_cap(p, opt.grid)));
  } else {
    const std::vector<double> times = linspace(0.5, 5.0, 10);
    const NormSeries ns = norm_series(opt.grid, times, support, multiplier, lp, opt.tail_tol, p);
    c.id = id.str();
    c.exponential = true;
    c.times = times;
    c.values = ns.values;
    const ExpFit f = fit_exponential(times, ns.values, 0.5, 5.0, 3);
    c.rate = f.rate;
    c.exponent = -f.rate;
    c.constant = f.constant;
    c.t_min = f.t_min;
    c.t_max = f.t_max;
    c.residual = f.residual;
    c.pass = f.rate > 0.0;
  }
  c.pass = c.pass && hyp;
  c.note = note.str();
  return c;
}

EstimateCertificate certify_highfreq_lemma(const RollParams& p, int n, const ExponentialOptions& opt) {
  p.validate();
  require(n == 0 || n == 1, "certify_highfreq_lemma: n must be 0 or 1");
  const double k0 = resolve_k0(p, opt);
  std::ostringstream id;
  id << "highfreq n=" << n;
  EstimateCertificate c = exponential_certificate(
      id.str(), p, n, opt, [&](double k) { return std::abs(k) > 0.5 * k0; },
      [&](double k, double t) {
        return Mat3c(std::pow(k, n) * (1.0 - cutoff_chi(k, k0)) * symbol_exp(p, k, t).cast<cplx>());
      });
  // Hypotheses: stable symbol at infinity and negative spectrum off the plateau.
  const Eig3 einf = eig3(symbol_at_infinity(p).cast<cplx>()).values;
  double sup_re = -kInf;
  for (int i = 0; i <= 2000; ++i) {
    const double k = 0.5 * k0 + i * 0.01;
    const Eig3 e = eig3(assemble_symbol(p, k)).values;
    sup_re = std::max(sup_re, e[0].real());
  }
  const bool hyp = einf[0].real() < 0.0 && sup_re < 0.0;
  std::ostringstream note;
  note << "k0=" << k0 << " sup Re sigma(L_inf)=" << einf[0].real()
       << " sup Re sigma(L(k)), |k|>=k0/2: " << sup_re << " fitted rate=" << c.rate;
  c.note = note.str();
  c.pass = c.pass && hyp;
  return c;
}

namespace {

struct GaussRule {
  std::vector<double> x, w;  // on [0, 1]
};

template <unsigned N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  GaussRule r;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0) {
      r.x.push_back(0.5);
      r.w.push_back(0.5 * ws[i]);
    } else {
      r.x.push_back(0.5 * (1.0 - xs[i]));
      r.w.push_back(0.5 * ws[i]);
      r.x.push_back(0.5 * (1.0 + xs[i]));
      r.w.push_back(0.5 * ws[i]);
    }
  }
  return r;
}

std::pair<Mat3c, Mat3c> frechet_with_rule(const Mat3c& L, const Mat3c& dL, const Mat3c& ddL,
                                          double t, const GaussRule& r) {
  Mat3c first = Mat3c::Zero(), second = Mat3c::Zero();
  const std::size_t n = r.x.size();
  std::vector<Mat3c> E(n), Ec(n);  // e^{l t L}, e^{(1-l) t L}
  for (std::size_t i = 0; i < n; ++i) {
    E[i] = expm3(r.x[i] * t * L);
    Ec[i] = expm3((1.0 - r.x[i]) * t * L);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double l = r.x[i];
    first += r.w[i] * E[i] * dL * Ec[i];
    second += r.w[i] * t * E[i] * ddL * Ec[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double ll = r.x[j];
      const double w = r.w[i] * r.w[j] * t * t;
      second += w * l * expm3(l * ll * t * L) * dL * expm3(l * (1.0 - ll) * t * L) * dL * Ec[i];
      second += w * (1.0 - l) * E[i] * dL * expm3((1.0 - l) * ll * t * L) * dL *
                expm3((1.0 - ll) * (1.0 - l) * t * L);
    }
  }
  return {t * first, second};
}

}  // namespace

FrechetResult frechet_dk_exp(const Mat3c& L, const Mat3c& dL, const Mat3c& ddL, double t, double tol) {
  require(L.allFinite() && dL.allFinite() && ddL.allFinite() && std::isfinite(t),
          "frechet_dk_exp: non-finite input");
  static const GaussRule lo = make_rule<20>();
  static const GaussRule hi = make_rule<30>();
  const auto a = frechet_with_rule(L, dL, ddL, t, lo);
  const auto b = frechet_with_rule(L, dL, ddL, t, hi);
  FrechetResult r;
  r.first = b.first;
  r.second = b.second;
  const double scale = 1.0 + b.first.norm() + b.second.norm();
  r.quadrature_change = ((a.first - b.first).norm() + (a.second - b.second).norm()) / scale;
  if (r.quadrature_change > tol) {
    std::ostringstream os;
    os << "frechet_dk_exp: quadrature not converged (relative change " << r.quadrature_change << ")";
    fail(ErrorCode::numerical, os.str());
  }
  return r;
}

namespace {

// Direct periodic convolution (dz * sum over y) of matrix kernel G with
// vector field f, evaluated at output index m.
Vec3c convolve_at(const ZGrid& g, const KernelSamples& G, const std::vector<Vec3c>& f, std::size_t m) {
  const std::size_t n = g.n;
  Vec3c acc = Vec3c::Zero();
  for (std::size_t y = 0; y < n; ++y) {
    const std::size_t d = (m + n - y) % n;           // offset index
    const std::size_t gi = (d + n / 2) % n;          // centred kernel index
    acc += G[gi] * f[y];
  }
  return acc * g.dz();
}

}  // namespace

double reconstruction_error(const RollParams& p, double k0, double t, const ZGrid& g, unsigned seed,
                            double band) {
  p.validate();
  if (k0 <= 0.0) k0 = select_k0(p).k0;
  const ModeFilterTable f = build_mode_filters(p, k0, g.ks());
  const KernelTable kt = greens_kernel(p, f, {t}, g);
  const std::vector<double> ks = g.ks();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Vec3c> fh(g.n, Vec3c::Zero());
  const long nn = static_cast<long>(g.n);
  for (long j = 1; j < nn / 2; ++j) {
    if (ks[j] > band) break;
    for (int c = 0; c < 3; ++c) {
      const cplx v(nd(rng), nd(rng));
      fh[j](c) = v;
      fh[nn - j](c) = std::conj(v);
    }
  }
  for (int c = 0; c < 3; ++c) fh[0](c) = nd(rng);

  // Physical-space samples of f and of the multiplier result e^{tL} f.
  ComplexFFT fft(g.n);
  std::vector<cplx> buf(g.n), out(g.n);
  std::vector<Vec3c> fx(g.n), ux(g.n);
  double fmax = 0.0;
  for (int c = 0; c < 3; ++c) {
    // Sample at z_i = (i - n/2) dz, i.e. phase (-1)^j on mode j.
    for (std::size_t j = 0; j < g.n; ++j) buf[j] = (j % 2 ? -1.0 : 1.0) * fh[j](c);
    fft.backward(buf.data(), out.data());
    for (std::size_t i = 0; i < g.n; ++i) fx[i](c) = out[i];
    for (std::size_t j = 0; j < g.n; ++j) {
      const Mat3 E = symbol_exp(p, ks[j], t);
      buf[j] = (j % 2 ? -1.0 : 1.0) * (E.row(c).cast<cplx>() * fh[j])(0);
    }
    fft.backward(buf.data(), out.data());
    for (std::size_t i = 0; i < g.n; ++i) ux[i](c) = out[i];
  }
  for (const Vec3c& v : fx) fmax = std::max(fmax, v.cwiseAbs().maxCoeff());

  double err = 0.0;
  const std::size_t stride = std::max<std::size_t>(1, g.n / 64);
  for (std::size_t m = 0; m < g.n; m += stride) {
    const Vec3c v = convolve_at(g, kt.Gc[0], fx, m) + convolve_at(g, kt.Ge[0], fx, m);
    err = std::max(err, (v - ux[m]).cwiseAbs().maxCoeff());
  }
  return err / std::max(fmax, 1e-300);
}

double semigroup_law_error(const RollParams& p, double t1, double t2, const ZGrid& g) {
  p.validate();
  const auto full = [&](double t) {
    return kernel_from_multiplier(g, [&](double k) { return Mat3c(symbol_exp(p, k, t).cast<cplx>()); });
  };
  const KernelSamples G1 = full(t1), G2 = full(t2), G12 = full(t1 + t2);
  const std::size_t n = g.n;
  double err = 0.0;
  const std::size_t stride = std::max<std::size_t>(1, n / 64);
  for (std::size_t m = n / 2 - n / 8; m < n / 2 + n / 8; m += stride / 4 + 1) {
    // (G1 * G2)(z_m) = dz * sum_y G1(z_m - z_y) G2(z_y), both kernels centred.
    Mat3c acc = Mat3c::Zero();
    for (std::size_t y = 0; y < n; ++y) {
      const std::size_t d = (m + n - y + n / 2) % n;
      acc += G1[d] * G2[y];
    }
    acc *= g.dz();
    err = std::max(err, (acc - G12[m]).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace rollstab
