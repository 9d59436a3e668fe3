// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rollstab {

using cplx = std::complex<double>;

// Fourier coefficients of a multi-component field, component-major.
struct Spectrum {
  std::size_t components = 0;
  std::size_t modes = 0;
  std::vector<cplx> data;

  Spectrum() = default;
  Spectrum(std::size_t c, std::size_t m) : components(c), modes(m), data(c * m) {}
  cplx* comp(std::size_t c) { return data.data() + c * modes; }
  const cplx* comp(std::size_t c) const { return data.data() + c * modes; }
  bool finite() const;
};

// du/dt = M(k) u + N(u) in Fourier space, with a small dense linear block per
// mode and a pseudo-spectral nonlinearity.
class SemilinearSystem {
 public:
  virtual ~SemilinearSystem() = default;
  virtual std::size_t components() const = 0;
  virtual std::size_t modes() const = 0;
  // Row-major components x components block at mode j.
  virtual void linear(std::size_t j, cplx* block) const = 0;
  virtual void nonlinear(const Spectrum& u, Spectrum& out) = 0;
};

// Per-mode dense operators, stored contiguously.
class ModeMatrices {
 public:
  ModeMatrices() = default;
  ModeMatrices(std::size_t n, std::size_t modes) : n_(n), data_(n * n * modes) {}
  cplx* at(std::size_t j) { return data_.data() + j * n_ * n_; }
  const cplx* at(std::size_t j) const { return data_.data() + j * n_ * n_; }
  // out += scale * M_j x  (x, out strided by `modes` between components)
  void apply_add(std::size_t j, const cplx* x, std::size_t stride, cplx* out, cplx scale) const;

 private:
  std::size_t n_ = 0;
  std::vector<cplx> data_;
};

// Fourth-order exponential time differencing Runge-Kutta (Cox-Matthews) with
// matrix phi-functions per mode.
class Etdrk4Stepper {
 public:
  Etdrk4Stepper(const SemilinearSystem& sys, double dt);
  void step(SemilinearSystem& sys, Spectrum& u);
  double dt() const { return dt_; }

 private:
  double dt_;
  std::size_t n_, m_;
  ModeMatrices E_, E2_, Q_, f1_, f2_, f3_;
  Spectrum Nu_, Na_, Nb_, Nc_, a_, b_, c_;
};

// Second-order IMEX backward differentiation (SBDF2): linear block implicit,
// nonlinearity extrapolated. The first step after construction or reset() is
// IMEX Euler.
class ImexStepper {
 public:
  ImexStepper(const SemilinearSystem& sys, double dt);
  void step(SemilinearSystem& sys, Spectrum& u);
  void reset() { started_ = false; }
  double dt() const { return dt_; }

 private:
  double dt_;
  std::size_t n_, m_;
  ModeMatrices euler_inv_, bdf_inv_;
  Spectrum prev_u_, prev_N_, N_, rhs_;
  bool started_ = false;
};

// exp(h M_j) for every mode; used by tests of the linear propagation.
ModeMatrices linear_propagator(const SemilinearSystem& sys, double h);

}  // namespace rollstab
