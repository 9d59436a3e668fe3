// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "rollstab/grid.hpp"
#include "rollstab/params.hpp"
#include "rollstab/stepper.hpp"

namespace rollstab {

// Perturbation of the roll in polar variables: A = sqrt(1-q^2) exp(iqx + r + i phi),
// with psi = phi_x carried as its own field.
struct FieldState {
  double t = 0.0;
  std::vector<double> r, psi, B, phi;

  static FieldState zeros(const Grid& g);
  bool finite() const;
};

// (r, psi, B, phi) with the symbol of the linearization on (r, psi, B) and
// phi_t = phi_xx + 2q r_x + 2 r_x psi. The linear phi row keeps
// psi - phi_x decaying like a heat mode, so psi = phi_x is preserved.
class PerturbationSystem : public SemilinearSystem {
 public:
  PerturbationSystem(const RollParams& p, const Grid& g, bool nonlinear = true, bool dealias = true);
  std::size_t components() const override { return 4; }
  std::size_t modes() const override { return grid_.modes(); }
  void linear(std::size_t j, cplx* block) const override;
  void nonlinear(const Spectrum& u, Spectrum& out) override;

  Spectrum encode(const FieldState& s);
  FieldState decode(const Spectrum& u, double t);
  const Grid& grid() const { return grid_; }
  const RollParams& params() const { return p_; }

 private:
  RollParams p_;
  Grid grid_;
  bool nonlinear_, dealias_;
  SpectralOps ops_;
  std::vector<cplx> work_;
  std::vector<double> r_, rx_, psi_, n1_, n2_, n3_;
};

// (A, B) system on the complex transform: A_t = A_xx + A + AB - A|A|^2,
// B_t = D B_xx + gamma (|A|^2)_xx. B is carried as a complex field whose
// imaginary part stays at round-off.
class FullSystem : public SemilinearSystem {
 public:
  FullSystem(const RollParams& p, const Grid& g, bool dealias = true);
  ~FullSystem() override;
  std::size_t components() const override { return 2; }
  std::size_t modes() const override { return grid_.N; }
  void linear(std::size_t j, cplx* block) const override;
  void nonlinear(const Spectrum& u, Spectrum& out) override;

  Spectrum encode(const std::vector<cplx>& A, const std::vector<double>& B);
  void decode(const Spectrum& u, std::vector<cplx>& A, std::vector<double>& B);

 private:
  RollParams p_;
  Grid grid_;
  bool dealias_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ToyParams {
  double alpha1 = 0.0, alpha2 = 0.0;
  int q1 = 3, q2 = 3;
  void validate() const;
};

// u_t = u_xx + alpha1 (u_x)^q1 + alpha2 (u^q2)_x.
class ToySystem : public SemilinearSystem {
 public:
  ToySystem(const ToyParams& tp, const Grid& g, bool dealias = true);
  std::size_t components() const override { return 1; }
  std::size_t modes() const override { return grid_.modes(); }
  void linear(std::size_t j, cplx* block) const override;
  void nonlinear(const Spectrum& u, Spectrum& out) override;

  Spectrum encode(const std::vector<double>& u);
  std::vector<double> decode(const Spectrum& u);

 private:
  ToyParams tp_;
  Grid grid_;
  bool dealias_;
  SpectralOps ops_;
  std::vector<cplx> work_;
  std::vector<double> u_, ux_, n_;
};

// Pointwise time derivatives (no dealiasing), for identity checks.
FieldState rhs_pert(const RollParams& p, const Grid& g, const FieldState& s);
void rhs_full(const RollParams& p, const Grid& g, const std::vector<cplx>& A,
              const std::vector<double>& B, std::vector<cplx>& dA, std::vector<double>& dB);
std::vector<double> rhs_toy(const ToyParams& tp, const Grid& g, const std::vector<double>& u);

// A = sqrt(1-q^2) exp(iqx + r + i phi).
std::vector<cplx> recover_A(const RollParams& p, const Grid& g, const FieldState& s);
// Constant member (r, psi, B, phi) = (ln((1-q^2+b)/(1-q^2)) / 2, 0, b, tau) of
// the steady family; requires 1 - q^2 + b > 0.
FieldState steady_state(const RollParams& p, const Grid& g, double b, double tau);
// Sup-difference between N1(V) + d/dx N2(V) and its decomposed form at q = 0.
double nonlinearity_decomposition_check(const RollParams& p, const Grid& g, const FieldState& s);

enum class Scheme { etdrk4, imex };
Scheme parse_scheme(const std::string& s);
const char* scheme_name(Scheme s);

// Quantities logged along a trajectory.
enum class NormId : int {
  r = 0,     // |r|
  dr,        // |r_x|
  ddr,       // |r_xx|
  dphi,      // |psi| = |phi_x|
  ddphi,     // |psi_x|
  phi,       // |phi|
  B,         // |B|
  dB,        // |B_x|
  v,         // |r + q/(1-q^2) psi|
  sideband,  // |phi-hat| at the tracked wavenumber
  B_mean,    // spatial mean of B (signed)
  count
};
constexpr std::size_t kNormCount = static_cast<std::size_t>(NormId::count);
const char* norm_name(NormId id);
NormId parse_norm(const std::string& s);

struct NormRecord {
  double t = 0.0;
  std::array<double, kNormCount> v{};
  double operator[](NormId id) const { return v[static_cast<std::size_t>(id)]; }
};
NormRecord measure(const RollParams& p, SpectralOps& ops, const FieldState& s, double sideband_k);

struct SimulationOptions {
  double T = 200.0;
  double dt = 0.01;
  Scheme scheme = Scheme::etdrk4;
  std::size_t thinning = 10;       // log norms every `thinning` steps
  std::size_t snapshot_every = 0;  // 0: first and last state only
  double guard = 1e6;              // W^{1,inf} divergence threshold
  bool dealias = true;
  double sideband_k = 0.0;         // > 0: track the phi amplitude at this wavenumber
  void validate() const;
};

struct Trajectory {
  RollParams params;
  Grid grid;
  SimulationOptions options;
  std::vector<NormRecord> log;
  std::vector<FieldState> snapshots;
  bool diverged = false;
  double last_valid_t = 0.0;
  std::string divergence_reason;
};

Trajectory simulate(const RollParams& p, const Grid& g, const FieldState& init,
                    const SimulationOptions& opt);

// Toy runs log |u| and |u_x|.
struct ToyTrajectory {
  std::vector<double> t, u_sup, ux_sup;
  bool diverged = false;
  double last_valid_t = 0.0;
  std::vector<double> final_u;
};
ToyTrajectory simulate_toy(const ToyParams& tp, const Grid& g, const std::vector<double>& u0,
                           const SimulationOptions& opt);

}  // namespace rollstab
