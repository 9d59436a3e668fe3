// SPDX-License-Identifier: Apache-2.0
#include "rollstab/initial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rollstab/error.hpp"

namespace rollstab {

InitialKind parse_initial_kind(const std::string& s) {
  if (s == "zero") return InitialKind::zero;
  if (s == "random_bounded") return InitialKind::random_bounded;
  if (s == "quasiperiodic") return InitialKind::quasiperiodic;
  if (s == "gaussian_localized") return InitialKind::gaussian_localized;
  if (s == "lp_localized_B") return InitialKind::lp_localized_B;
  if (s == "sideband") return InitialKind::sideband;
  fail(ErrorCode::invalid_argument, "unknown initial kind '" + s + "'");
}

const char* initial_kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::zero: return "zero";
    case InitialKind::random_bounded: return "random_bounded";
    case InitialKind::quasiperiodic: return "quasiperiodic";
    case InitialKind::gaussian_localized: return "gaussian_localized";
    case InitialKind::lp_localized_B: return "lp_localized_B";
    case InitialKind::sideband: return "sideband";
  }
  return "unknown";
}

double w_inf_norm(const Grid& g, const std::vector<double>& f, int order) {
  SpectralOps ops(g);
  double s = sup_norm(f);
  for (int o = 1; o <= order; ++o) s += sup_norm(ops.derivative(f, o));
  return s;
}

namespace {

std::vector<double> cosine_sum(const Grid& g, const std::vector<std::size_t>& modes,
                               const std::vector<double>& amps, const std::vector<double>& phases) {
  std::vector<double> f(g.N, 0.0);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const double k = g.k(modes[m]);
    for (std::size_t i = 0; i < g.N; ++i) f[i] += amps[m] * std::cos(k * g.x(i) + phases[m]);
  }
  return f;
}

std::vector<double> normalize(const Grid& g, std::vector<double> f, double eps, int order) {
  if (eps == 0.0) return std::vector<double>(g.N, 0.0);
  const double n = w_inf_norm(g, f, order);
  if (!(n > 0.0)) fail(ErrorCode::invalid_argument, "initial data: norm target unreachable on this grid");
  for (double& v : f) v *= eps / n;
  return f;
}

std::vector<double> random_phases(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::vector<double> out(n);
  for (double& v : out) v = u(rng);
  return out;
}

std::uint64_t field_seed(std::uint64_t seed, int field) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(field)};
  std::uint32_t w[2];
  seq.generate(w, w + 2);
  return (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
}

}  // namespace

std::vector<double> random_bounded_field(const Grid& g, double eps, std::uint64_t seed, int order) {
  g.validate();
  require(eps >= 0.0 && std::isfinite(eps), "initial data: eps must be non-negative");
  std::vector<std::size_t> modes;
  for (int j = 0;; ++j) {
    const double k = 0.02 * std::pow(2.0, j / 4.0);
    if (k > 8.0) break;
    const std::size_t m = g.nearest_mode(k);
    if (m == 0 || !g.keep(m)) continue;
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
  }
  if (modes.empty()) fail(ErrorCode::invalid_argument, "initial data: grid resolves no lacunary modes");
  std::vector<double> amps(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) amps[m] = std::pow(1.0 + g.k(modes[m]), -3.0);
  return normalize(g, cosine_sum(g, modes, amps, random_phases(modes.size(), seed)), eps, order);
}

std::vector<double> quasiperiodic_field(const Grid& g, double eps, std::uint64_t seed, int order) {
  g.validate();
  require(eps >= 0.0 && std::isfinite(eps), "initial data: eps must be non-negative");
  std::vector<std::size_t> modes;
  for (double k : {0.1, 0.1 * std::sqrt(2.0), 0.1 * std::sqrt(3.0)}) {
    const std::size_t m = g.nearest_mode(k);
    if (m > 0 && std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
  }
  if (modes.empty()) fail(ErrorCode::invalid_argument, "initial data: grid too coarse for quasiperiodic data");
  return normalize(g, cosine_sum(g, modes, std::vector<double>(modes.size(), 1.0),
                                 random_phases(modes.size(), seed)),
                   eps, order);
}

std::vector<double> gaussian_field(const Grid& g, double eps, double p, double width) {
  g.validate();
  require(eps >= 0.0 && std::isfinite(eps), "initial data: eps must be non-negative");
  require(p >= 1.0, "initial data: p must be >= 1");
  require(width > 0.0 && 8.0 * width < g.L, "initial data: Gaussian width must fit in the domain");
  std::vector<double> f(g.N);
  const double c = 0.5 * g.L;
  for (std::size_t i = 0; i < g.N; ++i) {
    const double z = (g.x(i) - c) / width;
    f[i] = std::exp(-0.5 * z * z);
  }
  if (eps == 0.0) return std::vector<double>(g.N, 0.0);
  const double n = lp_norm(f, g.dx(), p) + w_inf_norm(g, f, 1);
  for (double& v : f) v *= eps / n;
  return f;
}

std::vector<double> sideband_field(const Grid& g, double amplitude, double k) {
  g.validate();
  require(std::isfinite(amplitude), "initial data: amplitude must be finite");
  const std::size_t m = g.nearest_mode(k);
  require(m > 0 && g.keep(m), "initial data: sideband wavenumber not resolved on this grid");
  return cosine_sum(g, {m}, {amplitude}, {0.0});
}

void InitialSpec::validate() const {
  require(std::isfinite(eps) && eps >= 0.0, "initial data: eps must be non-negative");
  require(p >= 1.0, "initial data: p must be >= 1");
  require(width > 0.0, "initial data: width must be positive");
  for (InitialKind k : {r, phi, B})
    require(k != InitialKind::lp_localized_B, "initial data: lp_localized_B is a preset, not a field kind");
}

namespace {

std::vector<double> generate(const Grid& g, InitialKind kind, const InitialSpec& s, int field, int order) {
  const std::uint64_t seed = field_seed(s.seed, field);
  switch (kind) {
    case InitialKind::zero: return std::vector<double>(g.N, 0.0);
    case InitialKind::random_bounded: return random_bounded_field(g, s.eps, seed, order);
    case InitialKind::quasiperiodic: return quasiperiodic_field(g, s.eps, seed, order);
    case InitialKind::gaussian_localized: return gaussian_field(g, s.eps, s.p, s.width);
    case InitialKind::sideband: return sideband_field(g, s.eps, s.sideband_k);
    case InitialKind::lp_localized_B: break;
  }
  fail(ErrorCode::invalid_argument, "initial data: unsupported field kind");
}

}  // namespace

InitialData make_initial(const Grid& g, const InitialSpec& spec) {
  g.validate();
  spec.validate();
  InitialData d;
  d.spec = spec;
  FieldState& s = d.state;
  s.t = 0.0;
  s.r = generate(g, spec.r, spec, 0, 2);
  s.phi = generate(g, spec.phi, spec, 1, 2);
  s.B = generate(g, spec.B, spec, 2, 1);
  SpectralOps ops(g);
  s.psi = ops.derivative(s.phi, 1);
  d.r_w2 = w_inf_norm(g, s.r, 2);
  d.phi_w2 = w_inf_norm(g, s.phi, 2);
  d.B_w1 = w_inf_norm(g, s.B, 1);
  d.B_lp = lp_norm(s.B, g.dx(), spec.p);
  d.psi_sup = sup_norm(s.psi);
  return d;
}

InitialData make_initial(InitialKind kind, const Grid& g, double eps, std::uint64_t seed, double p) {
  InitialSpec s;
  s.eps = eps;
  s.seed = seed;
  s.p = p;
  switch (kind) {
    case InitialKind::zero: break;
    case InitialKind::random_bounded:
    case InitialKind::quasiperiodic:
    case InitialKind::gaussian_localized: s.r = s.phi = s.B = kind; break;
    case InitialKind::lp_localized_B:
      s.r = s.phi = InitialKind::random_bounded;
      s.B = InitialKind::gaussian_localized;
      break;
    case InitialKind::sideband: s.phi = InitialKind::sideband; break;
  }
  return make_initial(g, s);
}

}  // namespace rollstab
