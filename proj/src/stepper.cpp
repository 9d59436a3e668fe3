// SPDX-License-Identifier: Apache-2.0
#include "rollstab/stepper.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>

#include "rollstab/error.hpp"

namespace rollstab {

namespace {

using MatX = Eigen::MatrixXcd;

MatX block_at(const SemilinearSystem& sys, std::size_t j) {
  const std::size_t n = sys.components();
  std::vector<cplx> buf(n * n);
  sys.linear(j, buf.data());
  MatX M(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) M(r, c) = buf[r * n + c];
  return M;
}

// Entries that any analytic function of M can populate: the transitive
// closure of the sparsity pattern plus the diagonal. Zeroing the rest keeps
// decoupled components exactly decoupled after the Pade evaluation.
Eigen::MatrixX<bool> reach_pattern(const MatX& M) {
  const Eigen::Index n = M.rows();
  Eigen::MatrixX<bool> P(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) P(r, c) = r == c || M(r, c) != cplx(0.0, 0.0);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index r = 0; r < n; ++r)
      if (P(r, k))
        for (Eigen::Index c = 0; c < n; ++c)
          if (P(k, c)) P(r, c) = true;
  return P;
}

void store(ModeMatrices& dst, std::size_t j, const MatX& A, const Eigen::MatrixX<bool>& P) {
  const Eigen::Index n = A.rows();
  cplx* out = dst.at(j);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out[r * n + c] = P(r, c) ? A(r, c) : cplx(0.0, 0.0);
}

// Top block row of exp([[A, I, 0, 0], [0, 0, I, 0], [0, 0, 0, I], [0, 0, 0, 0]])
// holds e^A, phi1(A), phi2(A), phi3(A).
std::array<MatX, 4> phi_functions(const MatX& A) {
  const Eigen::Index n = A.rows();
  MatX aug = MatX::Zero(4 * n, 4 * n);
  aug.topLeftCorner(n, n) = A;
  for (int b = 0; b < 3; ++b) aug.block(b * n, (b + 1) * n, n, n) = MatX::Identity(n, n);
  const MatX e = aug.exp();
  return {e.block(0, 0, n, n), e.block(0, n, n, n), e.block(0, 2 * n, n, n), e.block(0, 3 * n, n, n)};
}

}  // namespace

bool Spectrum::finite() const {
  for (const cplx& v : data)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void ModeMatrices::apply_add(std::size_t j, const cplx* x, std::size_t stride, cplx* out,
                             cplx scale) const {
  const cplx* M = at(j);
  for (std::size_t r = 0; r < n_; ++r) {
    cplx acc(0.0, 0.0);
    for (std::size_t c = 0; c < n_; ++c) acc += M[r * n_ + c] * x[c * stride];
    out[r * stride] += scale * acc;
  }
}

ModeMatrices linear_propagator(const SemilinearSystem& sys, double h) {
  const std::size_t n = sys.components(), m = sys.modes();
  ModeMatrices E(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    const MatX M = block_at(sys, j);
    store(E, j, MatX(h * M).exp(), reach_pattern(M));
  }
  return E;
}

Etdrk4Stepper::Etdrk4Stepper(const SemilinearSystem& sys, double dt)
    : dt_(dt), n_(sys.components()), m_(sys.modes()) {
  require(std::isfinite(dt) && dt > 0.0, "ETDRK4: dt must be positive");
  E_ = E2_ = Q_ = f1_ = f2_ = f3_ = ModeMatrices(n_, m_);
  for (std::size_t j = 0; j < m_; ++j) {
    const MatX M = block_at(sys, j);
    const Eigen::MatrixX<bool> P = reach_pattern(M);
    const auto full = phi_functions(dt * M);
    const auto half = phi_functions(0.5 * dt * M);
    store(E_, j, full[0], P);
    store(E2_, j, half[0], P);
    store(Q_, j, 0.5 * dt * half[1], P);
    store(f1_, j, dt * (full[1] - 3.0 * full[2] + 4.0 * full[3]), P);
    store(f2_, j, dt * (full[2] - 2.0 * full[3]), P);
    store(f3_, j, dt * (-full[2] + 4.0 * full[3]), P);
  }
  for (Spectrum* s : {&Nu_, &Na_, &Nb_, &Nc_, &a_, &b_, &c_}) *s = Spectrum(n_, m_);
}

void Etdrk4Stepper::step(SemilinearSystem& sys, Spectrum& u) {
  require(u.components == n_ && u.modes == m_, "ETDRK4: state shape differs from system");
  const cplx one(1.0, 0.0);
  sys.nonlinear(u, Nu_);
  std::fill(a_.data.begin(), a_.data.end(), cplx(0.0, 0.0));
  for (std::size_t j = 0; j < m_; ++j) {
    E2_.apply_add(j, u.data.data() + j, m_, a_.data.data() + j, one);
  }
  // b and c start from E2 u, which a_ holds before the Q term is added.
  b_.data = a_.data;
  for (std::size_t j = 0; j < m_; ++j) Q_.apply_add(j, Nu_.data.data() + j, m_, a_.data.data() + j, one);
  sys.nonlinear(a_, Na_);
  for (std::size_t j = 0; j < m_; ++j) Q_.apply_add(j, Na_.data.data() + j, m_, b_.data.data() + j, one);
  sys.nonlinear(b_, Nb_);
  std::fill(c_.data.begin(), c_.data.end(), cplx(0.0, 0.0));
  for (std::size_t i = 0; i < Nc_.data.size(); ++i) Nc_.data[i] = 2.0 * Nb_.data[i] - Nu_.data[i];
  for (std::size_t j = 0; j < m_; ++j) {
    E2_.apply_add(j, a_.data.data() + j, m_, c_.data.data() + j, one);
    Q_.apply_add(j, Nc_.data.data() + j, m_, c_.data.data() + j, one);
  }
  sys.nonlinear(c_, Nc_);
  // u+ = E u + f1 N(u) + 2 f2 (N(a) + N(b)) + f3 N(c); a_ is reused as output.
  for (std::size_t i = 0; i < Na_.data.size(); ++i) Na_.data[i] += Nb_.data[i];
  std::fill(a_.data.begin(), a_.data.end(), cplx(0.0, 0.0));
  for (std::size_t j = 0; j < m_; ++j) {
    cplx* out = a_.data.data() + j;
    E_.apply_add(j, u.data.data() + j, m_, out, one);
    f1_.apply_add(j, Nu_.data.data() + j, m_, out, one);
    f2_.apply_add(j, Na_.data.data() + j, m_, out, 2.0 * one);
    f3_.apply_add(j, Nc_.data.data() + j, m_, out, one);
  }
  u.data.swap(a_.data);
}

ImexStepper::ImexStepper(const SemilinearSystem& sys, double dt)
    : dt_(dt), n_(sys.components()), m_(sys.modes()) {
  require(std::isfinite(dt) && dt > 0.0, "IMEX: dt must be positive");
  euler_inv_ = bdf_inv_ = ModeMatrices(n_, m_);
  for (std::size_t j = 0; j < m_; ++j) {
    const MatX M = block_at(sys, j);
    const Eigen::MatrixX<bool> P = reach_pattern(M);
    const MatX I = MatX::Identity(M.rows(), M.cols());
    store(euler_inv_, j, MatX(I - dt * M).inverse(), P);
    store(bdf_inv_, j, MatX(3.0 * I - 2.0 * dt * M).inverse(), P);
  }
  prev_u_ = prev_N_ = N_ = rhs_ = Spectrum(n_, m_);
}

void ImexStepper::step(SemilinearSystem& sys, Spectrum& u) {
  require(u.components == n_ && u.modes == m_, "IMEX: state shape differs from system");
  const cplx one(1.0, 0.0);
  sys.nonlinear(u, N_);
  if (!started_) {
    for (std::size_t i = 0; i < rhs_.data.size(); ++i) rhs_.data[i] = u.data[i] + dt_ * N_.data[i];
    prev_u_.data = u.data;
    prev_N_.data = N_.data;
    std::fill(u.data.begin(), u.data.end(), cplx(0.0, 0.0));
    for (std::size_t j = 0; j < m_; ++j)
      euler_inv_.apply_add(j, rhs_.data.data() + j, m_, u.data.data() + j, one);
    started_ = true;
    return;
  }
  for (std::size_t i = 0; i < rhs_.data.size(); ++i)
    rhs_.data[i] = 4.0 * u.data[i] - prev_u_.data[i] + 2.0 * dt_ * (2.0 * N_.data[i] - prev_N_.data[i]);
  prev_u_.data = u.data;
  prev_N_.data.swap(N_.data);
  std::fill(u.data.begin(), u.data.end(), cplx(0.0, 0.0));
  for (std::size_t j = 0; j < m_; ++j)
    bdf_inv_.apply_add(j, rhs_.data.data() + j, m_, u.data.data() + j, one);
}

}  // namespace rollstab
