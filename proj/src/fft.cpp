// SPDX-License-Identifier: Apache-2.0
#include "rollstab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "rollstab/error.hpp"

namespace rollstab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFFT::RealFFT(std::size_t n) : n_(n) {
  require(n >= 2 && n % 2 == 0, "RealFFT: size must be even and >= 2");
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = fftw_alloc_real(n);
  auto* spec = fftw_alloc_complex(n / 2 + 1);
  spec_ = spec;
  const int ni = static_cast<int>(n);
  fwd_ = fftw_plan_dft_r2c_1d(ni, real_, spec, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_c2r_1d(ni, spec, real_, FFTW_ESTIMATE);
}

RealFFT::~RealFFT() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFFT::forward(const double* in, std::complex<double>* out) {
  std::copy(in, in + n_, real_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::memcpy(static_cast<void*>(out), spec_, sizeof(fftw_complex) * modes());
}

void RealFFT::backward(const std::complex<double>* in, double* out) {
  // c2r destroys its input, so the spectrum is staged in the owned buffer.
  std::memcpy(spec_, static_cast<const void*>(in), sizeof(fftw_complex) * modes());
  fftw_execute(static_cast<fftw_plan>(bwd_));
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * inv;
}

ComplexFFT::ComplexFFT(std::size_t n) : n_(n) {
  require(n >= 1, "ComplexFFT: size must be positive");
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* buf = fftw_alloc_complex(n);
  buf_ = buf;
  const int ni = static_cast<int>(n);
  fwd_ = fftw_plan_dft_1d(ni, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(ni, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFFT::~ComplexFFT() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(buf_);
}

void ComplexFFT::forward(const std::complex<double>* in, std::complex<double>* out) {
  std::memcpy(buf_, static_cast<const void*>(in), sizeof(fftw_complex) * n_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::memcpy(static_cast<void*>(out), buf_, sizeof(fftw_complex) * n_);
}

void ComplexFFT::backward(const std::complex<double>* in, std::complex<double>* out) {
  std::memcpy(buf_, static_cast<const void*>(in), sizeof(fftw_complex) * n_);
  fftw_execute(static_cast<fftw_plan>(bwd_));
  const double inv = 1.0 / static_cast<double>(n_);
  auto* b = static_cast<std::complex<double>*>(buf_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = b[i] * inv;
}

}  // namespace rollstab
