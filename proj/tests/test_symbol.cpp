// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rollstab/error.hpp"
#include "rollstab/symbol.hpp"

using namespace rollstab;

namespace {

RollParams random_stable(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uq(0.0, 0.56), uD(0.1, 6.0), ug(0.0, 3.0);
  for (;;) {
    RollParams p{uq(rng), uD(rng), ug(rng)};
    if (oracle::stable(p.q, p.D, p.gamma)) return p;
  }
}

}  // namespace

TEST_CASE("symbol at k = 0 and q = 0") {
  const Mat3 m = symbol_real({0.0, 1.0, 0.0}, 0.0);
  Mat3 expect;
  expect << -2, 0, 1, 0, 0, 0, 0, 0, 0;
  CHECK((m - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("symbol entries at q = 0.3, D = 1, gamma = 0.5, k = 1") {
  const Mat3 m = symbol_real({0.3, 1.0, 0.5}, 1.0);
  Mat3 expect;
  expect << -2.82, -0.6, 1, -0.6, -1, 0, -0.91, 0, -1;
  CHECK((m - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("symbol matches the typed oracle and is even in k") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uk(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const RollParams p = random_stable(rng);
    const double k = uk(rng);
    CHECK((symbol_real(p, k) - oracle::symbol(p.q, p.D, p.gamma, k)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((assemble_symbol(p, k) - assemble_symbol(p, -k)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("symbol derivatives against finite differences") {
  const RollParams p{0.25, 1.7, 0.8};
  const double k = 0.7, h = 1e-5;
  const Mat3 fd1 = (symbol_real(p, k + h) - symbol_real(p, k - h)) / (2 * h);
  const Mat3 fd2 = (symbol_real(p, k + h) - 2 * symbol_real(p, k) + symbol_real(p, k - h)) / (h * h);
  CHECK((symbol_dk(p, k) - fd1).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((symbol_dkk(p) - fd2).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("characteristic polynomial") {
  SUBCASE("triangular example") {
    const CharPoly c = char_poly_coeffs({0.0, 1.0, 0.0}, 1.0);
    CHECK(c.a2 == doctest::Approx(5.0));
    CHECK(c.a1 == doctest::Approx(7.0));
    CHECK(c.a0 == doctest::Approx(3.0));
  }
  SUBCASE("k = 0") {
    const RollParams p{0.4, 2.0, 1.0};
    const CharPoly c = char_poly_coeffs(p, 0.0);
    CHECK(c.a2 == doctest::Approx(2.0 * p.a()));
    CHECK(c.a1 == 0.0);
    CHECK(c.a0 == 0.0);
  }
  SUBCASE("agrees with trace and minors") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
      const RollParams p = random_stable(rng);
      const double k = 0.1 * i;
      const CharPoly a = char_poly_coeffs(p, k), b = char_poly_of(oracle::symbol(p.q, p.D, p.gamma, k));
      CHECK(a.a2 == doctest::Approx(b.a2).epsilon(1e-12));
      CHECK(a.a1 == doctest::Approx(b.a1).epsilon(1e-12));
      CHECK(a.a0 == doctest::Approx(b.a0).epsilon(1e-12));
    }
  }
}

TEST_CASE("Hurwitz product carries the factor 2k^2") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const RollParams p = random_stable(rng);
    const double k = 0.05 + 0.2 * i;
    const CharPoly c = char_poly_of(oracle::symbol(p.q, p.D, p.gamma, k));
    const double direct = c.a2 * c.a1 - c.a0;
    CHECK(hurwitz_product(p, k) == doctest::Approx(direct).epsilon(1e-10));
    const QuarticCoeffs b = quartic_coeffs(p);
    const double k2 = k * k;
    CHECK(2 * k2 * (b.b4 * k2 * k2 + b.b2 * k2 + b.b0) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("Routh-Hurwitz verdicts") {
  const std::vector<double> ks = symmetric_grid(10.0, 0.01);
  SUBCASE("q = 0 stable with L_inf eigenvalues -1") {
    const StabilityReport r = routh_hurwitz_check({0.0, 1.0, 0.0}, ks);
    CHECK(r.verdict == "stable");
    for (const cplx& z : r.Linf_eigs) CHECK(std::abs(z + 1.0) < 1e-12);
  }
  SUBCASE("beyond the Eckhaus boundary") {
    const StabilityReport r = routh_hurwitz_check({0.6, 1.0, 0.0}, ks);
    CHECK(r.verdict == "unstable");
    CHECK(r.reason.find("1/3") != std::string::npos);
  }
  SUBCASE("negative coupling margin") {
    const StabilityReport r = routh_hurwitz_check({0.5, 1.0, -0.9}, ks);
    CHECK(r.verdict == "unstable");
  }
  SUBCASE("agrees with the closed-form condition") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uq(0.0, 0.7), uD(0.1, 5.0), ug(-1.0, 3.0);
    const std::vector<double> coarse = symmetric_grid(10.0, 0.05);
    for (int i = 0; i < 60; ++i) {
      const RollParams p{uq(rng), uD(rng), ug(rng)};
      const StabilityReport r = routh_hurwitz_check(p, coarse);
      if (r.verdict == "boundary") continue;
      CHECK((r.verdict == "stable") == oracle::stable(p.q, p.D, p.gamma));
    }
  }
}

TEST_CASE("eig3") {
  SUBCASE("identity") {
    for (const cplx& z : eig3(Mat3c::Identity()).values) CHECK(std::abs(z - 1.0) < 1e-14);
  }
  SUBCASE("zero mode at q = 0.5") {
    Eig3 e = eig3(assemble_symbol({0.5, 1.0, 0.0}, 0.0)).values;
    std::sort(e.begin(), e.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(std::abs(e[0] + 1.5) < 1e-12);
    CHECK(std::abs(e[1]) < 1e-12);
    CHECK(std::abs(e[2]) < 1e-12);
  }
  SUBCASE("diagonal") {
    Mat3c m = Mat3c::Zero();
    m(0, 0) = -3;
    m(1, 1) = -1;
    m(2, 2) = -1;
    Eig3 e = eig3(m).values;
    std::sort(e.begin(), e.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(std::abs(e[0] + 3.0) < 1e-12);
    CHECK(std::abs(e[1] + 1.0) < 1e-12);
  }
  SUBCASE("roots satisfy the characteristic polynomial") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
      const RollParams p = random_stable(rng);
      const Eig3Result r = eig3(assemble_symbol(p, 0.1 * (i % 40)));
      CHECK(r.residual < 1e-10);
    }
  }
}

TEST_CASE("stable parameters have negative spectrum away from k = 0") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 40; ++i) {
    const RollParams p = random_stable(rng);
    for (double k = 0.01; k <= 10.0; k += 0.13)
      for (const cplx& z : eig3(assemble_symbol(p, k)).values) CHECK(z.real() < 0.0);
  }
}

TEST_CASE("curvatures of the critical pair") {
  const Lambda1 a = lambda1_pm({0.0, 1.0, 0.0});
  CHECK(a.plus == doctest::Approx(-1.0));
  CHECK(a.minus == doctest::Approx(-1.0));
  const Lambda1 b = lambda1_pm({0.0, 2.0, 0.0});
  CHECK(b.plus == doctest::Approx(-1.0));
  CHECK(b.minus == doctest::Approx(-2.0));
  std::mt19937_64 rng(29);
  for (int i = 0; i < 30; ++i) {
    const RollParams p = random_stable(rng);
    const oracle::Curvatures c = oracle::curvatures(p.q, p.D, p.gamma);
    const Lambda1 l = lambda1_pm(p);
    CHECK(std::abs(l.plus_c - c.plus) < 1e-12);
    CHECK(std::abs(l.minus_c - c.minus) < 1e-12);
  }
}

TEST_CASE("continued branches approach the curvatures") {
  const RollParams p{0.3, 1.0, 0.5};
  const double k = 1e-2;
  const auto br = continued_branches(p, {0.0, 0.5 * k, k}, 0.5);
  const Lambda1 l = lambda1_pm(p);
  CHECK(std::abs(br[2][0] / (k * k) - l.plus_c) < 1e-4);
  CHECK(std::abs(br[2][1] / (k * k) - l.minus_c) < 1e-4);
  CHECK_THROWS_AS(continued_branches(p, {0.1, 0.2}, 0.5), Error);
}

TEST_CASE("projections") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const RollParams p = random_stable(rng);
    const auto [P0, P2] = projection_P0_P2(p);
    CHECK((P0 - oracle::P0(p.q)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((P2 - oracle::P2(p.q, p.D, p.gamma)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(verify_specid(p, {0.1, 0.5, 1.0}) < 1e-12);
    CHECK(verify_specid(p, {0.0}) == 0.0);
  }
}

TEST_CASE("projection algebra on (-k0, k0)") {
  const RollParams p{0.3, 1.0, 0.5};
  const K0Selection sel = select_k0(p);
  CHECK(sel.k0 > 0.0);
  for (double k : {0.0, 0.25 * sel.k0, 0.5 * sel.k0, 0.9 * sel.k0}) {
    const Mat3c L = assemble_symbol(p, k);
    Eig3 e = eig3(L).values;
    std::sort(e.begin(), e.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    const Mat3c P = spectral_projection(L, e[0], e[1], e[2]);
    CHECK((P * P - P).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((P * L - L * P).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(P.trace() - 1.0) < 1e-8);
    Eigen::JacobiSVD<Mat3c> svd(P);
    CHECK(svd.singularValues()(1) < 1e-8);
  }
}

TEST_CASE("Taylor consistency of the projection") {
  const RollParams p{0.2, 2.0, 0.7};
  auto proj = [&](double k) {
    const Mat3c L = assemble_symbol(p, k);
    Eig3 e = eig3(L).values;
    std::sort(e.begin(), e.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    return Mat3(spectral_projection(L, e[0], e[1], e[2]).real());
  };
  auto second = [&](double h) { return Mat3((proj(h) + proj(-h) - 2.0 * proj(0.0)) / (h * h)); };
  const Mat3 rich = (4.0 * second(5e-3) - second(1e-2)) / 3.0;
  CHECK((rich - oracle::P2(p.q, p.D, p.gamma)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("reduced criteria") {
  CHECK(reduced_phase_diffusion_check({0.3, 1.0, 0.5}).consistent);
  for (double q : {0.1, 0.5, 0.6}) {
    const ReducedCheck r = reduced_phase_diffusion_check({q, 1.0, 0.0});
    CHECK(r.reduced_stable == (q * q < 1.0 / 3.0));
  }
}

TEST_CASE("spectral curves") {
  const RollParams p{0.3, 1.0, 0.5};
  const SpectralData d = spectral_curves(p, symmetric_grid(10.0, 0.01));
  CHECK(d.k0 > 0.0);
  CHECK(d.mu > 0.0);
  CHECK(d.sup_re_nonzero < 0.0);
  CHECK(d.curves.size() == d.k.size());
  for (std::size_t i = 0; i < d.k.size(); ++i)
    if (std::abs(d.k[i]) < d.k0) CHECK(d.curves[i][2].real() < -d.mu + 1e-12);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(RollParams({0.0, 0.0, 0.0}).validate(), Error);
  CHECK_THROWS_AS(RollParams({1.0, 1.0, 0.0}).validate(), Error);
  CHECK_THROWS_AS(RollParams({NAN, 1.0, 0.0}).validate(), Error);
  CHECK_NOTHROW(RollParams({0.3, 1.0, 0.5}).validate());
}
