// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <vector>

namespace rollstab {

class RealFFT;

// Uniform periodic grid on [0, L) with N points (N a power of two).
struct Grid {
  double L = 200.0 * std::numbers::pi;
  std::size_t N = 4096;

  void validate() const;
  double dx() const { return L / static_cast<double>(N); }
  double dk() const { return 2.0 * std::numbers::pi / L; }
  double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
  std::vector<double> xs() const;

  // Real-transform modes j = 0..N/2 with wavenumber j * dk.
  std::size_t modes() const { return N / 2 + 1; }
  double k(std::size_t j) const { return static_cast<double>(j) * dk(); }
  // Signed wavenumber of complex-transform index j = 0..N-1.
  double k_signed(std::size_t j) const;
  // Two-thirds rule: keep modes with |index| < N/3.
  bool keep(std::size_t j) const { return 3 * j < N; }
  bool keep_signed(std::size_t j) const { return 3 * (j < N / 2 ? j : N - j) < N; }
  // Index of the real-transform mode nearest to wavenumber k >= 0.
  std::size_t nearest_mode(double k) const;
};

// Pseudo-spectral helpers bound to one grid. Each instance owns its FFT
// workspace and must not be shared between threads.
class SpectralOps {
 public:
  explicit SpectralOps(const Grid& g);
  ~SpectralOps();
  SpectralOps(const SpectralOps&) = delete;
  SpectralOps& operator=(const SpectralOps&) = delete;

  const Grid& grid() const { return g_; }
  void forward(const std::vector<double>& f, std::vector<std::complex<double>>& fh);
  void backward(const std::vector<std::complex<double>>& fh, std::vector<double>& f);
  std::vector<std::complex<double>> forward(const std::vector<double>& f);
  std::vector<double> backward(const std::vector<std::complex<double>>& fh);
  // Spectral derivative of the given order. The Nyquist mode is dropped for
  // odd orders so the result stays real.
  std::vector<double> derivative(const std::vector<double>& f, int order);

 private:
  Grid g_;
  std::unique_ptr<RealFFT> fft_;
  std::vector<std::complex<double>> work_;
};

double sup_norm(const std::vector<double>& f);
double mean(const std::vector<double>& f);
// Trapezoid L^p norm on the periodic grid.
double lp_norm(const std::vector<double>& f, double dx, double p);

}  // namespace rollstab
