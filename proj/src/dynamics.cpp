// SPDX-License-Identifier: Apache-2.0
#include "rollstab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rollstab/error.hpp"
#include "rollstab/fft.hpp"

namespace rollstab {

namespace {

const cplx kI(0.0, 1.0);

// e^{2r} - 1 - 2r without cancellation for small r.
double quad_exp(double r) { return std::expm1(2.0 * r) - 2.0 * r; }

void require_size(const std::vector<double>& f, const Grid& g, const char* what) {
  if (f.size() != g.N) fail(ErrorCode::invalid_argument, std::string(what) + ": field size differs from grid");
}

}  // namespace

FieldState FieldState::zeros(const Grid& g) {
  FieldState s;
  s.r.assign(g.N, 0.0);
  s.psi.assign(g.N, 0.0);
  s.B.assign(g.N, 0.0);
  s.phi.assign(g.N, 0.0);
  return s;
}

bool FieldState::finite() const {
  for (const auto* f : {&r, &psi, &B, &phi})
    for (double v : *f)
      if (!std::isfinite(v)) return false;
  return true;
}

// ---------------------------------------------------------------- perturbation

PerturbationSystem::PerturbationSystem(const RollParams& p, const Grid& g, bool nonlinear, bool dealias)
    : p_(p), grid_(g), nonlinear_(nonlinear), dealias_(dealias), ops_(g) {
  p_.validate();
  grid_.validate();
  work_.resize(grid_.modes());
}

void PerturbationSystem::linear(std::size_t j, cplx* m) const {
  const double k = grid_.k(j), k2 = k * k, a = p_.a(), q = p_.q;
  const cplx rows[4][4] = {
      {-k2 - 2.0 * a, -2.0 * q, 1.0, 0.0},
      {-2.0 * q * k2, -k2, 0.0, 0.0},
      {-2.0 * p_.gamma * a * k2, 0.0, -p_.D * k2, 0.0},
      {2.0 * q * kI * k, 0.0, 0.0, -k2},
  };
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m[r * 4 + c] = rows[r][c];
}

void PerturbationSystem::nonlinear(const Spectrum& u, Spectrum& out) {
  const std::size_t m = grid_.modes();
  if (out.components != 4 || out.modes != m) out = Spectrum(4, m);
  if (!nonlinear_) {
    std::fill(out.data.begin(), out.data.end(), cplx(0.0, 0.0));
    return;
  }
  const double a = p_.a();
  const cplx* rh = u.comp(0);
  const cplx* ph = u.comp(1);
  work_.assign(rh, rh + m);
  ops_.backward(work_, r_);
  for (std::size_t j = 0; j < m; ++j) work_[j] = kI * grid_.k(j) * rh[j];
  work_[m - 1] = 0.0;
  ops_.backward(work_, rx_);
  work_.assign(ph, ph + m);
  ops_.backward(work_, psi_);

  const std::size_t n = grid_.N;
  n1_.resize(n);
  n2_.resize(n);
  n3_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = quad_exp(r_[i]);
    n1_[i] = rx_[i] * rx_[i] - psi_[i] * psi_[i] - a * e;
    n2_[i] = 2.0 * psi_[i] * rx_[i];
    n3_[i] = e;
  }
  cplx* o_r = out.comp(0);
  cplx* o_psi = out.comp(1);
  cplx* o_B = out.comp(2);
  cplx* o_phi = out.comp(3);
  ops_.forward(n1_, work_);
  std::copy(work_.begin(), work_.end(), o_r);
  ops_.forward(n2_, work_);
  for (std::size_t j = 0; j < m; ++j) {
    o_phi[j] = work_[j];
    o_psi[j] = kI * grid_.k(j) * work_[j];
  }
  o_psi[m - 1] = 0.0;
  ops_.forward(n3_, work_);
  const double ga = p_.gamma * a;
  for (std::size_t j = 0; j < m; ++j) o_B[j] = -ga * grid_.k(j) * grid_.k(j) * work_[j];
  if (dealias_) {
    for (std::size_t j = 0; j < m; ++j) {
      if (grid_.keep(j)) continue;
      for (std::size_t c = 0; c < 4; ++c) out.comp(c)[j] = 0.0;
    }
  }
}

Spectrum PerturbationSystem::encode(const FieldState& s) {
  require_size(s.r, grid_, "encode");
  require_size(s.psi, grid_, "encode");
  require_size(s.B, grid_, "encode");
  require_size(s.phi, grid_, "encode");
  Spectrum u(4, grid_.modes());
  const std::vector<double>* f[4] = {&s.r, &s.psi, &s.B, &s.phi};
  for (std::size_t c = 0; c < 4; ++c) {
    ops_.forward(*f[c], work_);
    std::copy(work_.begin(), work_.end(), u.comp(c));
  }
  return u;
}

FieldState PerturbationSystem::decode(const Spectrum& u, double t) {
  FieldState s;
  s.t = t;
  std::vector<double>* f[4] = {&s.r, &s.psi, &s.B, &s.phi};
  for (std::size_t c = 0; c < 4; ++c) {
    work_.assign(u.comp(c), u.comp(c) + u.modes);
    ops_.backward(work_, *f[c]);
  }
  return s;
}

// ------------------------------------------------------------------------ full

struct FullSystem::Impl {
  explicit Impl(std::size_t n) : fft(n), A(n), B(n), w(n), nA(n), nB(n) {}
  ComplexFFT fft;
  std::vector<cplx> A, B, w, nA, nB;
};

FullSystem::FullSystem(const RollParams& p, const Grid& g, bool dealias)
    : p_(p), grid_(g), dealias_(dealias) {
  p_.validate();
  grid_.validate();
  impl_ = std::make_unique<Impl>(grid_.N);
}

FullSystem::~FullSystem() = default;

void FullSystem::linear(std::size_t j, cplx* m) const {
  const double k = grid_.k_signed(j);
  m[0] = 1.0 - k * k;
  m[1] = 0.0;
  m[2] = 0.0;
  m[3] = -p_.D * k * k;
}

void FullSystem::nonlinear(const Spectrum& u, Spectrum& out) {
  const std::size_t n = grid_.N;
  if (out.components != 2 || out.modes != n) out = Spectrum(2, n);
  Impl& s = *impl_;
  s.fft.backward(u.comp(0), s.A.data());
  s.fft.backward(u.comp(1), s.B.data());
  for (std::size_t i = 0; i < n; ++i) {
    const double m2 = std::norm(s.A[i]);
    s.nA[i] = s.A[i] * (s.B[i].real() - m2);
    s.nB[i] = m2;
  }
  s.fft.forward(s.nA.data(), out.comp(0));
  s.fft.forward(s.nB.data(), out.comp(1));
  cplx* oB = out.comp(1);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = grid_.k_signed(j);
    oB[j] *= -p_.gamma * k * k;
  }
  if (dealias_) {
    for (std::size_t j = 0; j < n; ++j) {
      if (grid_.keep_signed(j)) continue;
      out.comp(0)[j] = 0.0;
      out.comp(1)[j] = 0.0;
    }
  }
}

Spectrum FullSystem::encode(const std::vector<cplx>& A, const std::vector<double>& B) {
  require(A.size() == grid_.N, "encode: field size differs from grid");
  require_size(B, grid_, "encode");
  Spectrum u(2, grid_.N);
  Impl& s = *impl_;
  s.fft.forward(A.data(), u.comp(0));
  for (std::size_t i = 0; i < grid_.N; ++i) s.w[i] = B[i];
  s.fft.forward(s.w.data(), u.comp(1));
  return u;
}

void FullSystem::decode(const Spectrum& u, std::vector<cplx>& A, std::vector<double>& B) {
  Impl& s = *impl_;
  A.resize(grid_.N);
  B.resize(grid_.N);
  s.fft.backward(u.comp(0), A.data());
  s.fft.backward(u.comp(1), s.w.data());
  for (std::size_t i = 0; i < grid_.N; ++i) B[i] = s.w[i].real();
}

// ------------------------------------------------------------------------- toy

void ToyParams::validate() const {
  require(std::isfinite(alpha1) && std::isfinite(alpha2), "toy: alpha must be finite");
  require(q1 >= 3 && q2 >= 3, "toy: exponents q1, q2 must be >= 3");
}

ToySystem::ToySystem(const ToyParams& tp, const Grid& g, bool dealias)
    : tp_(tp), grid_(g), dealias_(dealias), ops_(g) {
  tp_.validate();
  work_.resize(grid_.modes());
}

void ToySystem::linear(std::size_t j, cplx* m) const { m[0] = -grid_.k(j) * grid_.k(j); }

void ToySystem::nonlinear(const Spectrum& u, Spectrum& out) {
  const std::size_t m = grid_.modes();
  if (out.components != 1 || out.modes != m) out = Spectrum(1, m);
  work_.assign(u.comp(0), u.comp(0) + m);
  ops_.backward(work_, u_);
  for (std::size_t j = 0; j < m; ++j) work_[j] = kI * grid_.k(j) * u.comp(0)[j];
  work_[m - 1] = 0.0;
  ops_.backward(work_, ux_);
  n_.resize(grid_.N);
  cplx* o = out.comp(0);
  for (std::size_t i = 0; i < grid_.N; ++i) n_[i] = std::pow(u_[i], tp_.q2);
  ops_.forward(n_, work_);
  for (std::size_t j = 0; j < m; ++j) o[j] = tp_.alpha2 * kI * grid_.k(j) * work_[j];
  o[m - 1] = 0.0;
  for (std::size_t i = 0; i < grid_.N; ++i) n_[i] = std::pow(ux_[i], tp_.q1);
  ops_.forward(n_, work_);
  for (std::size_t j = 0; j < m; ++j) o[j] += tp_.alpha1 * work_[j];
  if (dealias_)
    for (std::size_t j = 0; j < m; ++j)
      if (!grid_.keep(j)) o[j] = 0.0;
}

Spectrum ToySystem::encode(const std::vector<double>& u) {
  require_size(u, grid_, "encode");
  Spectrum s(1, grid_.modes());
  ops_.forward(u, work_);
  std::copy(work_.begin(), work_.end(), s.comp(0));
  return s;
}

std::vector<double> ToySystem::decode(const Spectrum& u) {
  work_.assign(u.comp(0), u.comp(0) + u.modes);
  return ops_.backward(work_);
}

// ------------------------------------------------------------- pointwise rhs

namespace {

template <class Sys>
Spectrum full_rhs(Sys& sys, const Spectrum& u) {
  Spectrum nl;
  sys.nonlinear(u, nl);
  const std::size_t n = sys.components();
  std::vector<cplx> block(n * n);
  for (std::size_t j = 0; j < u.modes; ++j) {
    sys.linear(j, block.data());
    for (std::size_t r = 0; r < n; ++r) {
      cplx acc(0.0, 0.0);
      for (std::size_t c = 0; c < n; ++c) acc += block[r * n + c] * u.comp(c)[j];
      nl.comp(r)[j] += acc;
    }
  }
  return nl;
}

}  // namespace

FieldState rhs_pert(const RollParams& p, const Grid& g, const FieldState& s) {
  PerturbationSystem sys(p, g, true, false);
  const Spectrum u = sys.encode(s);
  return sys.decode(full_rhs(sys, u), s.t);
}

void rhs_full(const RollParams& p, const Grid& g, const std::vector<cplx>& A,
              const std::vector<double>& B, std::vector<cplx>& dA, std::vector<double>& dB) {
  FullSystem sys(p, g, false);
  const Spectrum u = sys.encode(A, B);
  sys.decode(full_rhs(sys, u), dA, dB);
}

std::vector<double> rhs_toy(const ToyParams& tp, const Grid& g, const std::vector<double>& u) {
  ToySystem sys(tp, g, false);
  return sys.decode(full_rhs(sys, sys.encode(u)));
}

std::vector<cplx> recover_A(const RollParams& p, const Grid& g, const FieldState& s) {
  p.validate();
  require_size(s.r, g, "recover_A");
  require_size(s.phi, g, "recover_A");
  const double amp = std::sqrt(p.a());
  std::vector<cplx> A(g.N);
  for (std::size_t i = 0; i < g.N; ++i)
    A[i] = amp * std::exp(cplx(s.r[i], p.q * g.x(i) + s.phi[i]));
  return A;
}

FieldState steady_state(const RollParams& p, const Grid& g, double b, double tau) {
  p.validate();
  require(p.a() + b > 0.0, "steady_state: need 1 - q^2 + b > 0");
  FieldState s = FieldState::zeros(g);
  const double r = 0.5 * std::log((p.a() + b) / p.a());
  std::fill(s.r.begin(), s.r.end(), r);
  std::fill(s.B.begin(), s.B.end(), b);
  std::fill(s.phi.begin(), s.phi.end(), tau);
  return s;
}

double nonlinearity_decomposition_check(const RollParams& p, const Grid& g, const FieldState& s) {
  p.validate();
  require(p.q == 0.0, "nonlinearity decomposition holds at q = 0 only");
  SpectralOps ops(g);
  const std::size_t n = g.N;
  const std::vector<double> rx = ops.derivative(s.r, 1);
  // Left side: N1(V) + d/dx N2(V) as in the abbreviated perturbation system.
  std::vector<double> l1(n), n2psi(n), n2B(n);
  for (std::size_t i = 0; i < n; ++i) {
    l1[i] = rx[i] * rx[i] - s.psi[i] * s.psi[i] - quad_exp(s.r[i]);
    n2psi[i] = 2.0 * s.psi[i] * rx[i];
    n2B[i] = std::exp(2.0 * s.r[i]) - 2.0 * s.r[i];
  }
  const std::vector<double> l2 = ops.derivative(n2psi, 1);
  std::vector<double> tmp = ops.derivative(n2B, 1);
  for (double& v : tmp) v *= p.gamma;
  const std::vector<double> l3 = ops.derivative(tmp, 1);
  // Right side from the phase itself.
  const std::vector<double> phx = ops.derivative(s.phi, 1);
  std::vector<double> d1(n), n3(n), n2(n);
  for (std::size_t i = 0; i < n; ++i) {
    n2[i] = quad_exp(s.r[i]);
    d1[i] = rx[i] * rx[i] - phx[i] * phx[i] - n2[i];
    n3[i] = 2.0 * phx[i] * rx[i];
  }
  const std::vector<double> d2 = ops.derivative(n3, 1);
  std::vector<double> d3 = ops.derivative(n2, 2);
  for (double& v : d3) v *= p.gamma;
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    res = std::max({res, std::abs(l1[i] - d1[i]), std::abs(l2[i] - d2[i]), std::abs(l3[i] - d3[i])});
  return res;
}

// -------------------------------------------------------------------- logging

Scheme parse_scheme(const std::string& s) {
  if (s == "etdrk4") return Scheme::etdrk4;
  if (s == "imex") return Scheme::imex;
  fail(ErrorCode::invalid_argument, "unknown scheme '" + s + "' (expected etdrk4 or imex)");
}

const char* scheme_name(Scheme s) { return s == Scheme::etdrk4 ? "etdrk4" : "imex"; }

namespace {
constexpr const char* kNormNames[kNormCount] = {"r",   "dr", "ddr", "dphi",     "ddphi", "phi",
                                                "B",   "dB", "v",   "sideband", "B_mean"};
}

const char* norm_name(NormId id) { return kNormNames[static_cast<std::size_t>(id)]; }

NormId parse_norm(const std::string& s) {
  for (std::size_t i = 0; i < kNormCount; ++i)
    if (s == kNormNames[i]) return static_cast<NormId>(i);
  fail(ErrorCode::invalid_argument, "unknown norm id '" + s + "'");
}

NormRecord measure(const RollParams& p, SpectralOps& ops, const FieldState& s, double sideband_k) {
  NormRecord rec;
  rec.t = s.t;
  auto set = [&](NormId id, double v) { rec.v[static_cast<std::size_t>(id)] = v; };
  set(NormId::r, sup_norm(s.r));
  set(NormId::dr, sup_norm(ops.derivative(s.r, 1)));
  set(NormId::ddr, sup_norm(ops.derivative(s.r, 2)));
  set(NormId::dphi, sup_norm(s.psi));
  set(NormId::ddphi, sup_norm(ops.derivative(s.psi, 1)));
  set(NormId::phi, sup_norm(s.phi));
  set(NormId::B, sup_norm(s.B));
  set(NormId::dB, sup_norm(ops.derivative(s.B, 1)));
  const double c = p.q / p.a();
  double v = 0.0;
  for (std::size_t i = 0; i < s.r.size(); ++i) v = std::max(v, std::abs(s.r[i] + c * s.psi[i]));
  set(NormId::v, v);
  if (sideband_k > 0.0) {
    const Grid& g = ops.grid();
    const std::vector<cplx> ph = ops.forward(s.phi);
    set(NormId::sideband, 2.0 * std::abs(ph[g.nearest_mode(sideband_k)]) / static_cast<double>(g.N));
  }
  set(NormId::B_mean, mean(s.B));
  return rec;
}

void SimulationOptions::validate() const {
  require(std::isfinite(T) && T >= 0.0, "simulate: T must be non-negative");
  require(std::isfinite(dt) && dt > 0.0, "simulate: dt must be positive");
  require(thinning >= 1, "simulate: thinning must be >= 1");
  require(guard > 0.0, "simulate: guard must be positive");
  const double steps = T / dt;
  require(std::abs(steps - std::round(steps)) < 1e-6 * std::max(1.0, steps),
          "simulate: T must be an integer multiple of dt");
}

namespace {

double w1inf(const NormRecord& n) {
  return std::max({n[NormId::r] + n[NormId::dr], n[NormId::dphi] + n[NormId::ddphi],
                   n[NormId::B] + n[NormId::dB]});
}

}  // namespace

Trajectory simulate(const RollParams& p, const Grid& g, const FieldState& init,
                    const SimulationOptions& opt) {
  p.validate();
  g.validate();
  opt.validate();
  Trajectory tr;
  tr.params = p;
  tr.grid = g;
  tr.options = opt;
  PerturbationSystem sys(p, g, true, opt.dealias);
  SpectralOps ops(g);
  Spectrum u = sys.encode(init);
  const double t0 = init.t;
  std::unique_ptr<Etdrk4Stepper> etd;
  std::unique_ptr<ImexStepper> imex;
  if (opt.scheme == Scheme::etdrk4)
    etd = std::make_unique<Etdrk4Stepper>(sys, opt.dt);
  else
    imex = std::make_unique<ImexStepper>(sys, opt.dt);

  const auto nsteps = static_cast<std::size_t>(std::llround(opt.T / opt.dt));
  auto record = [&](std::size_t step, bool force_snapshot) {
    const FieldState s = sys.decode(u, t0 + static_cast<double>(step) * opt.dt);
    const NormRecord rec = measure(p, ops, s, opt.sideband_k);
    tr.log.push_back(rec);
    const bool snap = force_snapshot || (opt.snapshot_every > 0 && step % opt.snapshot_every == 0);
    if (snap) tr.snapshots.push_back(s);
    if (!s.finite() || !(w1inf(rec) <= opt.guard)) {
      std::ostringstream os;
      os << "W^{1,inf} norm " << w1inf(rec) << " exceeds guard " << opt.guard << " at t=" << s.t;
      tr.diverged = true;
      tr.divergence_reason = os.str();
      return false;
    }
    tr.last_valid_t = s.t;
    return true;
  };
  if (!record(0, true)) return tr;
  for (std::size_t step = 1; step <= nsteps; ++step) {
    if (etd)
      etd->step(sys, u);
    else
      imex->step(sys, u);
    if (!u.finite()) {
      std::ostringstream os;
      os << "non-finite state at t=" << t0 + static_cast<double>(step) * opt.dt;
      tr.diverged = true;
      tr.divergence_reason = os.str();
      return tr;
    }
    if (step % opt.thinning == 0 || step == nsteps) {
      if (!record(step, step == nsteps)) return tr;
    } else if (opt.snapshot_every > 0 && step % opt.snapshot_every == 0) {
      tr.snapshots.push_back(sys.decode(u, t0 + static_cast<double>(step) * opt.dt));
    }
  }
  return tr;
}

ToyTrajectory simulate_toy(const ToyParams& tp, const Grid& g, const std::vector<double>& u0,
                           const SimulationOptions& opt) {
  tp.validate();
  g.validate();
  opt.validate();
  ToySystem sys(tp, g, opt.dealias);
  SpectralOps ops(g);
  Spectrum u = sys.encode(u0);
  std::unique_ptr<Etdrk4Stepper> etd;
  std::unique_ptr<ImexStepper> imex;
  if (opt.scheme == Scheme::etdrk4)
    etd = std::make_unique<Etdrk4Stepper>(sys, opt.dt);
  else
    imex = std::make_unique<ImexStepper>(sys, opt.dt);
  ToyTrajectory tr;
  const auto nsteps = static_cast<std::size_t>(std::llround(opt.T / opt.dt));
  auto record = [&](std::size_t step) {
    const std::vector<double> f = sys.decode(u);
    const double us = sup_norm(f), uxs = sup_norm(ops.derivative(f, 1));
    tr.t.push_back(static_cast<double>(step) * opt.dt);
    tr.u_sup.push_back(us);
    tr.ux_sup.push_back(uxs);
    if (!(us + uxs <= opt.guard)) {
      tr.diverged = true;
      return false;
    }
    tr.last_valid_t = tr.t.back();
    if (step == nsteps) tr.final_u = f;
    return true;
  };
  if (!record(0)) return tr;
  for (std::size_t step = 1; step <= nsteps; ++step) {
    if (etd)
      etd->step(sys, u);
    else
      imex->step(sys, u);
    if (!u.finite()) {
      tr.diverged = true;
      return tr;
    }
    if ((step % opt.thinning == 0 || step == nsteps) && !record(step)) return tr;
  }
  return tr;
}

}  // namespace rollstab
