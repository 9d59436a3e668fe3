// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rollstab/dynamics.hpp"
#include "rollstab/error.hpp"
#include "rollstab/fft.hpp"
#include "rollstab/initial.hpp"

using namespace rollstab;

namespace {

const Grid kSmall{20.0 * std::numbers::pi, 256};

double diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double diff(const FieldState& a, const FieldState& b) {
  return std::max({diff(a.r, b.r), diff(a.psi, b.psi), diff(a.B, b.B), diff(a.phi, b.phi)});
}

double sup(const FieldState& s) { return std::max({sup_norm(s.r), sup_norm(s.psi), sup_norm(s.B), sup_norm(s.phi)}); }

FieldState random_state(const Grid& g, double eps, std::uint64_t seed) {
  InitialSpec is;
  is.r = is.phi = is.B = InitialKind::random_bounded;
  is.eps = eps;
  is.seed = seed;
  return make_initial(g, is).state;
}

}  // namespace

TEST_CASE("grid") {
  const Grid g{};
  CHECK_NOTHROW(g.validate());
  CHECK(g.dk() == doctest::Approx(0.01));
  CHECK(g.k_signed(1) == doctest::Approx(g.dk()));
  CHECK(g.k_signed(g.N - 1) == doctest::Approx(-g.dk()));
  CHECK(g.keep(0));
  CHECK_FALSE(g.keep(g.N / 2));
  CHECK(g.nearest_mode(0.4) == 40);
  CHECK_THROWS_AS(Grid({10.0, 100}).validate(), Error);
  CHECK_THROWS_AS(Grid({-1.0, 64}).validate(), Error);
}

TEST_CASE("FFT wrappers") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  SUBCASE("real round trip") {
    RealFFT f(64);
    std::vector<double> x(64), y(64);
    for (double& v : x) v = nd(rng);
    std::vector<std::complex<double>> X(f.modes());
    f.forward(x.data(), X.data());
    double s = 0.0;
    for (double v : x) s += v;
    CHECK(std::abs(X[0] - s) < 1e-12);
    f.backward(X.data(), y.data());
    CHECK(diff(x, y) < 1e-13);
  }
  SUBCASE("complex round trip") {
    ComplexFFT f(32);
    std::vector<std::complex<double>> x(32), X(32), y(32);
    for (auto& v : x) v = {nd(rng), nd(rng)};
    f.forward(x.data(), X.data());
    f.backward(X.data(), y.data());
    double m = 0.0;
    for (std::size_t i = 0; i < 32; ++i) m = std::max(m, std::abs(x[i] - y[i]));
    CHECK(m < 1e-13);
  }
}

TEST_CASE("spectral derivatives and norms") {
  SpectralOps ops(kSmall);
  const std::vector<double> xs = kSmall.xs();
  std::vector<double> f(kSmall.N), df(kSmall.N), ddf(kSmall.N);
  const double k = 3.0 * kSmall.dk();
  for (std::size_t i = 0; i < kSmall.N; ++i) {
    f[i] = std::sin(k * xs[i]);
    df[i] = k * std::cos(k * xs[i]);
    ddf[i] = -k * k * std::sin(k * xs[i]);
  }
  CHECK(diff(ops.derivative(f, 1), df) < 1e-12);
  CHECK(diff(ops.derivative(f, 2), ddf) < 1e-12);
  CHECK(diff(ops.backward(ops.forward(f)), f) < 1e-13);
  const std::vector<double> one(kSmall.N, 2.0);
  CHECK(lp_norm(one, kSmall.dx(), 1.0) == doctest::Approx(2.0 * kSmall.L));
  CHECK(lp_norm(one, kSmall.dx(), 2.0) == doctest::Approx(2.0 * std::sqrt(kSmall.L)));
  CHECK(mean(one) == doctest::Approx(2.0));
  CHECK(sup_norm(f) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("right-hand sides at equilibria") {
  const RollParams p{0.3, 1.0, 0.5};
  SUBCASE("zero perturbation") { CHECK(sup(rhs_pert(p, kSmall, FieldState::zeros(kSmall))) == 0.0); }
  SUBCASE("steady family") {
    for (double b : {-0.2, 0.05, 0.3}) {
      const FieldState s = steady_state(p, kSmall, b, 0.7);
      CHECK(s.r[0] == doctest::Approx(0.5 * std::log((p.a() + b) / p.a())));
      CHECK(sup(rhs_pert(p, kSmall, s)) < 1e-12);
    }
    CHECK_THROWS_AS(steady_state(p, kSmall, -1.0, 0.0), Error);
  }
  SUBCASE("gamma = 0 and B = 0 keep B at zero") {
    FieldState s = random_state(kSmall, 0.05, 3);
    std::fill(s.B.begin(), s.B.end(), 0.0);
    CHECK(sup_norm(rhs_pert({0.2, 1.0, 0.0}, kSmall, s).B) == 0.0);
  }
  SUBCASE("roll in Cartesian form") {
    const std::vector<cplx> A = recover_A(p, kSmall, FieldState::zeros(kSmall));
    std::vector<cplx> dA;
    std::vector<double> dB;
    rhs_full(p, kSmall, A, std::vector<double>(kSmall.N, 0.0), dA, dB);
    double m = 0.0;
    for (const cplx& z : dA) m = std::max(m, std::abs(z));
    CHECK(m < 1e-10);
    CHECK(sup_norm(dB) < 1e-10);
  }
  SUBCASE("toy") {
    ToyParams tp;
    tp.alpha1 = 1.0;
    tp.alpha2 = 1.0;
    CHECK(sup_norm(rhs_toy(tp, kSmall, std::vector<double>(kSmall.N, 0.0))) == 0.0);
    tp.alpha1 = 0.0;
    CHECK(sup_norm(rhs_toy(tp, kSmall, std::vector<double>(kSmall.N, 0.3))) < 1e-14);
  }
}

TEST_CASE("polar map") {
  const RollParams p{0.3, 1.0, 0.5};
  const std::vector<double> xs = kSmall.xs();
  const std::vector<cplx> A = recover_A(p, kSmall, FieldState::zeros(kSmall));
  for (std::size_t i = 0; i < kSmall.N; i += 17)
    CHECK(std::abs(A[i] - std::sqrt(p.a()) * std::exp(cplx(0.0, p.q * xs[i]))) < 1e-14);
  FieldState s = FieldState::zeros(kSmall);
  std::fill(s.r.begin(), s.r.end(), 0.2);
  const std::vector<cplx> As = recover_A(p, kSmall, s);
  for (std::size_t i = 0; i < kSmall.N; i += 17) CHECK(std::abs(As[i] - std::exp(0.2) * A[i]) < 1e-14);
}

TEST_CASE("nonlinearity decomposition at q = 0") {
  const RollParams p{0.0, 1.0, 0.5};
  CHECK(nonlinearity_decomposition_check(p, kSmall, FieldState::zeros(kSmall)) == 0.0);
  FieldState s = random_state(kSmall, 0.1, 4);
  CHECK(nonlinearity_decomposition_check(p, kSmall, s) < 1e-8);
  std::fill(s.psi.begin(), s.psi.end(), 0.0);
  std::fill(s.phi.begin(), s.phi.end(), 0.0);
  CHECK(nonlinearity_decomposition_check(p, kSmall, s) < 1e-8);
  CHECK_THROWS_AS(nonlinearity_decomposition_check({0.3, 1.0, 0.5}, kSmall, s), Error);
}

TEST_CASE("linear propagation is exact") {
  const RollParams p{0.3, 1.0, 0.5};
  PerturbationSystem sys(p, kSmall, false);
  const FieldState s0 = random_state(kSmall, 0.05, 6);
  Spectrum u = sys.encode(s0);
  const Spectrum u0 = u;
  Etdrk4Stepper st(sys, 0.05);
  st.step(sys, u);
  const ModeMatrices E = linear_propagator(sys, 0.05);
  Spectrum expect(4, sys.modes());
  for (std::size_t j = 0; j < sys.modes(); ++j) E.apply_add(j, u0.comp(0) + j, sys.modes(), expect.comp(0) + j, 1.0);
  double m = 0.0;
  for (std::size_t i = 0; i < u.data.size(); ++i) m = std::max(m, std::abs(u.data[i] - expect.data[i]));
  CHECK(m < 1e-12);
}

TEST_CASE("trajectory invariants") {
  const RollParams p{0.3, 1.0, 0.5};
  SimulationOptions o;
  o.T = 5.0;
  o.dt = 0.01;
  o.thinning = 50;
  SUBCASE("zero data stays zero") {
    const Trajectory tr = simulate(p, kSmall, FieldState::zeros(kSmall), o);
    CHECK_FALSE(tr.diverged);
    for (const NormRecord& n : tr.log)
      for (double v : n.v) CHECK(std::abs(v) < 1e-15);
  }
  SUBCASE("mean of B is conserved") {
    const Trajectory tr = simulate(p, kSmall, random_state(kSmall, 0.05, 7), o);
    const double m0 = tr.log.front()[NormId::B_mean];
    for (const NormRecord& n : tr.log)
      if (n.t > 0.0) CHECK(std::abs(n[NormId::B_mean] - m0) / n.t < 1e-10);
  }
  SUBCASE("gauge shift of phi") {
    const FieldState a = random_state(kSmall, 0.05, 8);
    FieldState b = a;
    for (double& v : b.phi) v += 0.75;
    const FieldState ea = simulate(p, kSmall, a, o).snapshots.back();
    const FieldState eb = simulate(p, kSmall, b, o).snapshots.back();
    CHECK(diff(ea.r, eb.r) < 1e-10);
    CHECK(diff(ea.psi, eb.psi) < 1e-10);
    CHECK(diff(ea.B, eb.B) < 1e-10);
    double m = 0.0;
    for (std::size_t i = 0; i < ea.phi.size(); ++i) m = std::max(m, std::abs(eb.phi[i] - ea.phi[i] - 0.75));
    CHECK(m < 1e-10);
  }
  SUBCASE("real Ginzburg-Landau keeps B at zero") {
    FieldState s = random_state(kSmall, 0.05, 9);
    std::fill(s.B.begin(), s.B.end(), 0.0);
    const Trajectory tr = simulate({0.2, 1.0, 0.0}, kSmall, s, o);
    for (const NormRecord& n : tr.log) CHECK(n[NormId::B] == 0.0);
  }
  SUBCASE("divergence guard") {
    SimulationOptions g = o;
    g.guard = 1e-4;
    const Trajectory tr = simulate(p, kSmall, random_state(kSmall, 0.05, 10), g);
    CHECK(tr.diverged);
    CHECK_FALSE(tr.divergence_reason.empty());
  }
}

TEST_CASE("polar and Cartesian integrations agree") {
  const RollParams p{0.3, 1.0, 0.5};
  const FieldState s0 = random_state(kSmall, 0.05, 12);
  SimulationOptions o;
  o.T = 1.0;
  o.dt = 0.01;
  o.thinning = 1000;
  const FieldState s1 = simulate(p, kSmall, s0, o).snapshots.back();
  FullSystem full(p, kSmall);
  Spectrum u = full.encode(recover_A(p, kSmall, s0), s0.B);
  Etdrk4Stepper st(full, 0.01);
  for (int i = 0; i < 100; ++i) st.step(full, u);
  std::vector<cplx> A;
  std::vector<double> B;
  full.decode(u, A, B);
  const std::vector<cplx> Ap = recover_A(p, kSmall, s1);
  double m = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) m = std::max(m, std::abs(A[i] - Ap[i]));
  CHECK(m < 1e-6);
  CHECK(diff(B, s1.B) < 1e-6);
}

TEST_CASE("time-stepping orders") {
  const RollParams p{0.3, 1.0, 0.5};
  const Grid g{20.0 * std::numbers::pi, 128};
  InitialSpec is;
  is.r = is.phi = is.B = InitialKind::quasiperiodic;
  is.eps = 0.5;
  is.seed = 3;
  const FieldState init = make_initial(g, is).state;
  auto run = [&](Scheme sc, double dt) {
    SimulationOptions o;
    o.T = 2.0;
    o.dt = dt;
    o.scheme = sc;
    o.thinning = 1000000;
    return simulate(p, g, init, o).snapshots.back();
  };
  SUBCASE("ETDRK4") {
    const FieldState ref = run(Scheme::etdrk4, 0.05 / 8);
    const double order = std::log2(diff(run(Scheme::etdrk4, 0.1), ref) / diff(run(Scheme::etdrk4, 0.05), ref));
    CHECK(order == doctest::Approx(4.0).epsilon(0.075));
  }
  SUBCASE("IMEX") {
    const FieldState ref = run(Scheme::imex, 0.005 / 8);
    const double order = std::log2(diff(run(Scheme::imex, 0.01), ref) / diff(run(Scheme::imex, 0.005), ref));
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("initial data") {
  const Grid g{};
  SUBCASE("eps = 0 gives the zero state") {
    InitialSpec is;
    is.r = is.phi = is.B = InitialKind::random_bounded;
    is.eps = 0.0;
    CHECK(sup(make_initial(g, is).state) == 0.0);
  }
  SUBCASE("determinism and seeds") {
    const auto a = random_bounded_field(g, 0.01, 5);
    CHECK(a == random_bounded_field(g, 0.01, 5));
    CHECK(a != random_bounded_field(g, 0.01, 6));
  }
  SUBCASE("normalizations") {
    CHECK(w_inf_norm(g, random_bounded_field(g, 0.01, 5), 2) == doctest::Approx(0.01).epsilon(1e-10));
    CHECK(w_inf_norm(g, quasiperiodic_field(g, 0.02, 5), 2) == doctest::Approx(0.02).epsilon(1e-10));
    const auto gs = gaussian_field(g, 0.01, 1.0);
    CHECK(lp_norm(gs, g.dx(), 1.0) + w_inf_norm(g, gs, 1) == doctest::Approx(0.01).epsilon(1e-10));
  }
  SUBCASE("psi is the derivative of phi") {
    InitialSpec is;
    is.r = is.phi = InitialKind::random_bounded;
    is.B = InitialKind::gaussian_localized;
    const InitialData d = make_initial(g, is);
    SpectralOps ops(g);
    CHECK(diff(ops.derivative(d.state.phi, 1), d.state.psi) < 1e-15);
    CHECK(d.r_w2 == doctest::Approx(is.eps));
    CHECK(d.phi_w2 == doctest::Approx(is.eps));
    CHECK(d.B_lp + d.B_w1 == doctest::Approx(is.eps));
  }
  SUBCASE("sideband") {
    const auto s = sideband_field(g, 1e-3, 0.4);
    CHECK(sup_norm(s) == doctest::Approx(1e-3));
  }
  SUBCASE("names") {
    for (InitialKind k : {InitialKind::zero, InitialKind::random_bounded, InitialKind::quasiperiodic,
                          InitialKind::gaussian_localized, InitialKind::lp_localized_B, InitialKind::sideband})
      CHECK(parse_initial_kind(initial_kind_name(k)) == k);
    CHECK_THROWS_AS(parse_initial_kind("bogus"), Error);
  }
}

TEST_CASE("toy system") {
  ToyParams tp;
  tp.alpha1 = 1.0;
  SimulationOptions o;
  o.T = 2.0;
  o.thinning = 10;
  const ToyTrajectory z = simulate_toy(tp, kSmall, std::vector<double>(kSmall.N, 0.0), o);
  for (double v : z.u_sup) CHECK(v == 0.0);
  ToyParams bad;
  bad.q1 = 2;
  CHECK_THROWS_AS(bad.validate(), Error);
}
