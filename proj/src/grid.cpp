// SPDX-License-Identifier: Apache-2.0
#include "rollstab/grid.hpp"

#include <algorithm>
#include <cmath>

#include "rollstab/error.hpp"
#include "rollstab/fft.hpp"

namespace rollstab {

void Grid::validate() const {
  require(std::isfinite(L) && L > 0.0, "grid: L must be positive");
  require(N >= 8 && (N & (N - 1)) == 0, "grid: N must be a power of two >= 8");
}

std::vector<double> Grid::xs() const {
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = x(i);
  return out;
}

double Grid::k_signed(std::size_t j) const {
  const double s = j < N / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(N);
  return s * dk();
}

std::size_t Grid::nearest_mode(double kk) const {
  const double j = std::round(std::abs(kk) / dk());
  return static_cast<std::size_t>(std::min(j, static_cast<double>(N / 2)));
}

SpectralOps::SpectralOps(const Grid& g) : g_(g) {
  g_.validate();
  fft_ = std::make_unique<RealFFT>(g_.N);
  work_.resize(g_.modes());
}

SpectralOps::~SpectralOps() = default;

void SpectralOps::forward(const std::vector<double>& f, std::vector<std::complex<double>>& fh) {
  require(f.size() == g_.N, "spectral: field size differs from grid");
  fh.resize(g_.modes());
  fft_->forward(f.data(), fh.data());
}

void SpectralOps::backward(const std::vector<std::complex<double>>& fh, std::vector<double>& f) {
  require(fh.size() == g_.modes(), "spectral: spectrum size differs from grid");
  f.resize(g_.N);
  work_ = fh;
  fft_->backward(work_.data(), f.data());
}

std::vector<std::complex<double>> SpectralOps::forward(const std::vector<double>& f) {
  std::vector<std::complex<double>> fh;
  forward(f, fh);
  return fh;
}

std::vector<double> SpectralOps::backward(const std::vector<std::complex<double>>& fh) {
  std::vector<double> f;
  backward(fh, f);
  return f;
}

std::vector<double> SpectralOps::derivative(const std::vector<double>& f, int order) {
  require(order >= 0, "spectral: derivative order must be non-negative");
  std::vector<std::complex<double>> fh = forward(f);
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t j = 0; j < fh.size(); ++j) {
    std::complex<double> m(1.0, 0.0);
    for (int o = 0; o < order; ++o) m *= I * g_.k(j);
    fh[j] *= m;
  }
  if (order % 2 == 1) fh.back() = 0.0;
  return backward(fh);
}

double sup_norm(const std::vector<double>& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double mean(const std::vector<double>& f) {
  if (f.empty()) return 0.0;
  double s = 0.0;
  for (double v : f) s += v;
  return s / static_cast<double>(f.size());
}

double lp_norm(const std::vector<double>& f, double dx, double p) {
  if (std::isinf(p)) return sup_norm(f);
  require(p >= 1.0, "lp_norm: p must be >= 1");
  double s = 0.0;
  for (double v : f) s += std::pow(std::abs(v), p);
  return std::pow(s * dx, 1.0 / p);
}

}  // namespace rollstab
