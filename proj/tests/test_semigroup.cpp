// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rollstab/error.hpp"
#include "rollstab/semigroup.hpp"

using namespace rollstab;

namespace {

KernelSamples scalar_kernel(const ZGrid& g, const std::function<cplx(double)>& m) {
  return kernel_from_multiplier(g, [&](double k) {
    Mat3c M = Mat3c::Zero();
    M(0, 0) = m(k);
    return M;
  });
}

}  // namespace

TEST_CASE("smooth cutoff") {
  CHECK(smooth_step(-1.0) == 0.0);
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(2.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  const double k0 = 0.4;
  CHECK(cutoff_chi(0.0, k0) == 1.0);
  CHECK(cutoff_chi(0.2, k0) == 1.0);
  CHECK(cutoff_chi(-0.2, k0) == 1.0);
  CHECK(cutoff_chi(0.4, k0) == 0.0);
  CHECK(cutoff_chi(1.0, k0) == 0.0);
  double prev = 1.0;
  for (double k = 0.2; k <= 0.4; k += 0.01) {
    const double c = cutoff_chi(k, k0);
    CHECK(c <= prev + 1e-15);
    CHECK(cutoff_chi(-k, k0) == c);
    prev = c;
  }
}

TEST_CASE("heat kernel references") {
  SUBCASE("unit mass") {
    const ZGrid g{400.0, 8192};
    for (double t : {0.5, 2.0, 20.0}) {
      const KernelSamples G = scalar_kernel(g, [t](double k) { return cplx(std::exp(-k * k * t)); });
      CHECK(operator_norm_Linf(g, G) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(max_imag(G) < 1e-10);
    }
  }
  SUBCASE("derivative kernel") {
    const ZGrid g{100.0, 32768};
    const double t = 1.0;
    const KernelSamples G = scalar_kernel(g, [t](double k) { return cplx(0.0, k) * std::exp(-k * k * t); });
    CHECK(std::abs(operator_norm_Linf(g, G) / oracle::heat_derivative_l1(t) - 1.0) < 1e-6);
  }
  SUBCASE("homogeneity") {
    const ZGrid g{400.0, 4096};
    const KernelSamples G = scalar_kernel(g, [](double k) { return cplx(std::exp(-k * k)); });
    const KernelSamples H = scalar_kernel(g, [](double k) { return cplx(3.0 * std::exp(-k * k)); });
    CHECK(operator_norm_Linf(g, H) == doctest::Approx(3.0 * operator_norm_Linf(g, G)).epsilon(1e-12));
  }
  SUBCASE("L1 data gives the sup of the kernel") {
    const ZGrid g{400.0, 8192};
    const double t = 4.0;
    const KernelSamples G = scalar_kernel(g, [t](double k) { return cplx(std::exp(-k * k * t)); });
    CHECK(operator_norm_Lp(g, G, 1.0) == doctest::Approx(1.0 / std::sqrt(4.0 * std::numbers::pi * t)).epsilon(1e-8));
  }
}

TEST_CASE("multiplier round trip") {
  const ZGrid g{200.0, 2048};
  const KernelSamples G = scalar_kernel(g, [](double k) { return cplx(std::exp(-k * k), 0.3 * k * std::exp(-k * k)); });
  const std::vector<Mat3c> M = multiplier_from_kernel(g, G);
  const std::vector<double> ks = g.ks();
  double worst = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const cplx expect(std::exp(-ks[j] * ks[j]), 0.3 * ks[j] * std::exp(-ks[j] * ks[j]));
    worst = std::max(worst, std::abs(M[j](0, 0) - expect));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("matrix exponential and its k-derivatives") {
  SUBCASE("scalar example") {
    const Mat3c L = -Mat3c::Identity();
    const Mat3c dL = -2.0 * Mat3c::Identity();
    const Mat3c ddL = -2.0 * Mat3c::Identity();
    const FrechetResult f = frechet_dk_exp(L, dL, ddL, 1.0);
    CHECK(std::abs(f.first(0, 0) - (-2.0 * std::exp(-1.0))) < 1e-12);
    // d^2/dk^2 exp(-t k^2) at k = t = 1: (4 - 2) e^-1.
    CHECK(std::abs(f.second(0, 0) - 2.0 * std::exp(-1.0)) < 1e-10);
  }
  SUBCASE("finite differences on stable symbols") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uq(0.0, 0.55), uD(0.3, 4.0), ug(0.0, 2.0), uk(0.05, 1.0);
    int done = 0;
    while (done < 10) {
      const RollParams p{uq(rng), uD(rng), ug(rng)};
      if (!oracle::stable(p.q, p.D, p.gamma)) continue;
      const double k = uk(rng), t = 1.5, h = 1e-4;
      const FrechetResult f =
          frechet_dk_exp(assemble_symbol(p, k), symbol_dk(p, k).cast<cplx>(), symbol_dkk(p).cast<cplx>(), t);
      auto E = [&](double kk) { return expm3(t * assemble_symbol(p, kk)); };
      const Mat3c fd1 = (E(k + h) - E(k - h)) / (2.0 * h);
      const Mat3c fd2 = (E(k + h) - 2.0 * E(k) + E(k - h)) / (h * h);
      CHECK((f.first - fd1).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((f.second - fd2).cwiseAbs().maxCoeff() < 1e-5);
      ++done;
    }
  }
  SUBCASE("expm3 of a diagonal matrix") {
    Mat3c m = Mat3c::Zero();
    m(0, 0) = -1.0;
    m(1, 1) = 0.5;
    m(2, 2) = cplx(0.0, 1.0);
    const Mat3c e = expm3(m);
    CHECK(std::abs(e(0, 0) - std::exp(-1.0)) < 1e-14);
    CHECK(std::abs(e(1, 1) - std::exp(0.5)) < 1e-14);
    CHECK(std::abs(e(2, 2) - std::exp(cplx(0.0, 1.0))) < 1e-14);
  }
}

TEST_CASE("mode filters and kernel decomposition") {
  const RollParams p{0.3, 1.0, 0.5};
  const ZGrid g{};
  const double k0 = select_k0(p).k0;
  const ModeFilterTable f = build_mode_filters(p, k0, g.ks());
  CHECK(f.min_gap > 0.0);
  const KernelTable kt = greens_kernel(p, f, {1.0, 5.0, 20.0}, g);
  CHECK(kt.max_imag < 1e-10);
  SUBCASE("mass of the critical kernel is time-independent") {
    for (std::size_t i = 1; i < kt.mass_c.size(); ++i)
      CHECK((kt.mass_c[i] - kt.mass_c[0]).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("critical norms decay and exponential norms decay faster") {
    CHECK(kt.opnorm_e[2] < kt.opnorm_e[0]);
    CHECK(kt.opnorm_e[2] / kt.opnorm_e[1] < kt.opnorm_c[2] / kt.opnorm_c[1]);
  }
}

TEST_CASE("reconstruction and semigroup law") {
  const RollParams p{0.3, 1.0, 0.5};
  for (unsigned seed : {1u, 2u})
    for (double t : {0.1, 1.0, 10.0}) CHECK(reconstruction_error(p, 0.0, t, ZGrid{}, seed) < 1e-8);
  CHECK(semigroup_law_error(p, 1.0, 2.0, ZGrid{}) < 1e-6);
}

TEST_CASE("block form separates the damped eigenvalue") {
  const RollParams p{0.3, 1.0, 0.5};
  for (double k : {0.0, 0.05, 0.1}) {
    const BlockForm b = block_form(p, k);
    CHECK(b.off_block < 1e-10);
    CHECK(b.Lambda(2, 2).real() < -0.5);
  }
}

TEST_CASE("certificate preconditions") {
  CHECK_THROWS_AS(certify_exponential({0.3, 1.0, 0.5}, 1, 1), Error);
  CHECK_THROWS_AS(certify_diffusive({0.6, 1.0, 0.0}, 0, 0, 1.0), Error);
}
