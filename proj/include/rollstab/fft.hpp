// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>

namespace rollstab {

// Thin owning wrappers over FFTW plans. Each instance keeps its own aligned
// buffers, so separate instances may be used from separate threads once
// constructed. Construction itself is serialized internally.
class RealFFT {
 public:
  explicit RealFFT(std::size_t n);
  ~RealFFT();
  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;

  std::size_t size() const { return n_; }
  std::size_t modes() const { return n_ / 2 + 1; }
  // Unnormalized forward transform: out[j] = sum_m in[m] exp(-2 pi i j m / n).
  void forward(const double* in, std::complex<double>* out);
  // Inverse transform including the 1/n factor.
  void backward(const std::complex<double>* in, double* out);

 private:
  std::size_t n_;
  double* real_;
  void* spec_;
  void* fwd_;
  void* bwd_;
};

class ComplexFFT {
 public:
  explicit ComplexFFT(std::size_t n);
  ~ComplexFFT();
  ComplexFFT(const ComplexFFT&) = delete;
  ComplexFFT& operator=(const ComplexFFT&) = delete;

  std::size_t size() const { return n_; }
  void forward(const std::complex<double>* in, std::complex<double>* out);
  // Inverse transform including the 1/n factor.
  void backward(const std::complex<double>* in, std::complex<double>* out);

 private:
  std::size_t n_;
  void* buf_;
  void* fwd_;
  void* bwd_;
};

}  // namespace rollstab
