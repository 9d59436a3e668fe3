// SPDX-License-Identifier: Apache-2.0
#include "rollstab/decay.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rollstab/error.hpp"
#include "rollstab/initial.hpp"

namespace rollstab {

void DecaySeries::validate() const {
  require(t.size() == value.size(), "series: times and values differ in length");
  for (std::size_t i = 0; i < t.size(); ++i) {
    require(std::isfinite(t[i]) && std::isfinite(value[i]), "series: non-finite entry");
    if (i > 0) require(t[i] > t[i - 1], "series: times must be strictly increasing");
  }
}

DecaySeries series_of(const Trajectory& tr, NormId id) {
  DecaySeries s;
  s.id = id;
  s.t.reserve(tr.log.size());
  s.value.reserve(tr.log.size());
  for (const NormRecord& r : tr.log) {
    s.t.push_back(r.t);
    s.value.push_back(r[id]);
  }
  s.validate();
  return s;
}

std::vector<DecaySeries> track_norms(const Trajectory& tr) {
  if (tr.diverged) {
    std::ostringstream os;
    os << "track_norms: trajectory diverged at t=" << tr.last_valid_t << " (" << tr.divergence_reason << ")";
    fail(ErrorCode::divergence, os.str());
  }
  std::vector<DecaySeries> out;
  for (NormId id : {NormId::r, NormId::dr, NormId::ddr, NormId::dphi, NormId::ddphi, NormId::phi, NormId::B,
                    NormId::dB})
    out.push_back(series_of(tr, id));
  return out;
}

FitWindow default_fit_window(const Trajectory& tr) {
  const double d_max = std::max(1.0, tr.params.D);
  const double scale = tr.grid.L / (4.0 * std::numbers::pi);
  FitWindow w;
  w.t_min = 4.0;
  w.t_max = std::min(tr.options.T, 0.1 * scale * scale / d_max);
  return w;
}

RateFit fit_rate(const DecaySeries& s, const FitWindow& w) {
  s.validate();
  require(w.t_min < w.t_max, "fit_rate: degenerate window");
  require(!s.t.empty() && w.t_min >= s.t.front() && w.t_max <= s.t.back() * (1.0 + 1e-12),
          "fit_rate: window outside the series range");
  return fit_power_law(s.t, s.value, w.t_min, w.t_max, 20);
}

void TemplateVariant::validate() const {
  if (kind == TemplateKind::partloc) require(p >= 1.0 && std::isfinite(p), "template: p must be >= 1");
  if (kind == TemplateKind::q0) require(alpha > 0.0 && alpha < 0.25, "template: alpha must lie in (0, 1/4)");
}

std::string TemplateVariant::describe() const {
  std::ostringstream os;
  switch (kind) {
    case TemplateKind::explong: os << "explong"; break;
    case TemplateKind::partloc: os << "partloc(p=" << p << ")"; break;
    case TemplateKind::q0: os << "q0(alpha=" << alpha << ")"; break;
  }
  return os.str();
}

TemplateVariant parse_template(const std::string& s) {
  TemplateVariant v;
  if (s == "explong")
    v.kind = TemplateKind::explong;
  else if (s == "partloc")
    v.kind = TemplateKind::partloc;
  else if (s == "q0")
    v.kind = TemplateKind::q0;
  else
    fail(ErrorCode::invalid_argument, "unknown template variant '" + s + "'");
  return v;
}

namespace {

struct Eta {
  double eta1 = 0, eta2 = 0;
};

Eta template_terms(const TemplateVariant& v, const NormRecord& n) {
  const double s1 = 1.0 + n.t;
  const double V = n[NormId::r] + n[NormId::dphi] + n[NormId::B];
  const double dV = n[NormId::dr] + n[NormId::ddphi] + n[NormId::dB];
  const double ddr = n[NormId::ddr], phi = n[NormId::phi];
  Eta e;
  switch (v.kind) {
    case TemplateKind::explong:
      e.eta1 = V + std::sqrt(s1) * dV;
      e.eta2 = std::sqrt(s1) * ddr + phi / std::sqrt(s1);
      break;
    case TemplateKind::partloc: {
      const double w = 1.0 / (2.0 * v.p);
      e.eta1 = std::pow(s1, w) * V + std::pow(s1, w + 0.5) * dV;
      e.eta2 = std::pow(s1, w - 0.5) * phi + std::pow(s1, w + 0.5) * ddr;
      break;
    }
    case TemplateKind::q0: {
      const double dphi_w1 = n[NormId::dphi] + n[NormId::ddphi];
      e.eta1 = V + std::sqrt(s1) * dV + std::pow(s1, -v.alpha) * (phi + std::sqrt(s1) * dphi_w1);
      e.eta2 = std::sqrt(s1) * ddr;
      break;
    }
  }
  return e;
}

}  // namespace

std::vector<TemplateValue> template_series(const TemplateVariant& v, const Trajectory& tr) {
  v.validate();
  std::vector<TemplateValue> out;
  out.reserve(tr.log.size());
  Eta run;
  for (const NormRecord& n : tr.log) {
    const Eta e = template_terms(v, n);
    run.eta1 = std::max(run.eta1, e.eta1);
    run.eta2 = std::max(run.eta2, e.eta2);
    TemplateValue tv;
    tv.variant = v;
    tv.t = n.t;
    tv.eta1 = run.eta1;
    tv.eta2 = run.eta2;
    tv.eta = run.eta1 + run.eta2;
    out.push_back(tv);
  }
  return out;
}

TemplateValue eval_template(const TemplateVariant& v, const Trajectory& tr, double t) {
  v.validate();
  require(!tr.log.empty() && tr.log.front().t <= t && t <= tr.log.back().t + 1e-12,
          "eval_template: trajectory does not cover [0, t]");
  TemplateValue tv;
  tv.variant = v;
  tv.t = t;
  for (const NormRecord& n : tr.log) {
    if (n.t > t) break;
    const Eta e = template_terms(v, n);
    tv.eta1 = std::max(tv.eta1, e.eta1);
    tv.eta2 = std::max(tv.eta2, e.eta2);
  }
  tv.eta = tv.eta1 + tv.eta2;
  return tv;
}

DecaySeries damped_mode_series(const Trajectory& tr, double q) {
  require(tr.params.gamma == 0.0, "damped_mode_series: requires gamma = 0");
  require(q == tr.params.q, "damped_mode_series: q differs from the trajectory's q");
  for (const NormRecord& n : tr.log)
    require(n[NormId::B] == 0.0, "damped_mode_series: requires B identically zero");
  return series_of(tr, NormId::v);
}

OracleKind parse_oracle_kind(const std::string& s) {
  if (s == "A") return OracleKind::A;
  if (s == "B") return OracleKind::B;
  if (s == "Bprime" || s == "B'") return OracleKind::Bprime;
  fail(ErrorCode::invalid_argument, "unknown oracle kind '" + s + "'");
}

const char* oracle_kind_name(OracleKind k) {
  switch (k) {
    case OracleKind::A: return "A";
    case OracleKind::B: return "B";
    case OracleKind::Bprime: return "Bprime";
  }
  return "unknown";
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// Adaptive Gauss-Kronrod on [a, b], split at powers of ten so that the O(1)
// scale of (1 + s)^-c near s = 0 is resolved even when b is large.
template <class F>
double integrate_smooth(F f, double a, double b) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double c = 1.0; c < b; c *= 10.0)
    if (c > a) cuts.push_back(c);
  cuts.push_back(b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    sum += GK::integrate(f, cuts[i], cuts[i + 1], 15, 1e-13, &err);
    if (!std::isfinite(sum)) fail(ErrorCode::numerical, "oracle: quadrature failure");
  }
  return sum;
}

// int_a^t (t - s)^(-1/2) g(s) ds with s = t - u^2, which removes the
// endpoint singularity: 2 int_0^sqrt(t - a) g(t - u^2) du.
template <class G>
double integrate_inv_sqrt(G g, double a, double t) {
  if (!(t > a)) return 0.0;
  const double umax = std::sqrt(t - a);
  auto h = [&](double u) { return 2.0 * g(t - u * u); };
  double err = 0.0;
  const double v = GK::integrate(h, 0.0, umax, 15, 1e-13, &err);
  if (!std::isfinite(v)) fail(ErrorCode::numerical, "oracle: quadrature failure near s = t");
  return v;
}

void check_index(OracleKind kind, double index) {
  if (kind == OracleKind::A)
    require(index == 0.0 || index == 1.0, "oracle: kind A needs j in {0, 1}");
  else
    require(index >= 1.0 && index <= 2.0, "oracle: kinds B and B' need p in [1, 2]");
}

}  // namespace

double oracle_integral(OracleKind kind, double index, double t) {
  check_index(kind, index);
  require(t > 0.0 && std::isfinite(t), "oracle: t must be positive");
  switch (kind) {
    case OracleKind::A: {
      auto g = [](double s) { return std::pow(1.0 + s, -1.5); };
      if (index == 0.0) return integrate_smooth(g, 0.0, t);
      return integrate_smooth([&](double s) { return g(s) / std::sqrt(t - s); }, 0.0, 0.5 * t) +
             integrate_inv_sqrt(g, 0.5 * t, t);
    }
    case OracleKind::B: {
      const double c = 3.0 / (2.0 * index);
      auto g = [c](double s) { return std::pow(1.0 + s, -c); };
      return integrate_smooth([&](double s) { return g(s) / std::sqrt(t - s); }, 0.0, 0.5 * t) +
             integrate_inv_sqrt(g, 0.5 * t, t);
    }
    case OracleKind::Bprime: {
      const double c = 3.0 / (2.0 * index);
      const double split = t > 1.0 ? 0.5 * t : 0.0;
      const double first =
          integrate_smooth([&](double s) { return std::pow(1.0 + s, -c) / (t - s); }, 0.0, split);
      auto g = [c](double s) { return std::pow(1.0 + s, -0.5 - c); };
      // The second integral keeps the split point; its own s = t/2 cut only
      // separates the substituted part from the regular one.
      const double mid = std::max(split, 0.5 * t);
      const double regular =
          integrate_smooth([&](double s) { return g(s) / std::sqrt(t - s); }, split, mid);
      return first + regular + integrate_inv_sqrt(g, mid, t);
    }
  }
  return 0.0;
}

double oracle_bound(OracleKind kind, double index, double t) {
  check_index(kind, index);
  switch (kind) {
    case OracleKind::A: return std::pow(1.0 + t, -0.5 * index);
    case OracleKind::B: return std::pow(1.0 + t, -1.0 / (2.0 * index));
    case OracleKind::Bprime: return std::pow(1.0 + t, -0.5 - 1.0 / (2.0 * index));
  }
  return 1.0;
}

OracleReport integral_inequality_oracle(OracleKind kind, double index, const std::vector<double>& t_samples) {
  check_index(kind, index);
  require(!t_samples.empty(), "oracle: no samples");
  for (double t : t_samples) require(t > 0.0 && std::isfinite(t), "oracle: samples must be positive");
  OracleReport rep;
  rep.kind = kind;
  rep.index = index;
  rep.t = t_samples;
  std::sort(rep.t.begin(), rep.t.end());
  const double t_last = rep.t.back();
  double sup_early = 0.0;
  bool has_early = false;
  for (double t : rep.t) {
    const double I = oracle_integral(kind, index, t);
    const double r = I / oracle_bound(kind, index, t);
    rep.integral.push_back(I);
    rep.ratio.push_back(r);
    rep.sup_ratio = std::max(rep.sup_ratio, r);
    if (t <= t_last / 10.0 * (1.0 + 1e-12)) {
      sup_early = std::max(sup_early, r);
      has_early = true;
    }
  }
  rep.last_decade_variation = has_early && sup_early > 0.0
                                  ? (rep.sup_ratio - sup_early) / sup_early
                                  : std::numeric_limits<double>::infinity();
  return rep;
}

ToyCase parse_toy_case(const std::string& s) {
  if (s == "alpha1" || s == "a1") return ToyCase::alpha1;
  if (s == "alpha2" || s == "a2") return ToyCase::alpha2;
  fail(ErrorCode::invalid_argument, "unknown toy case '" + s + "'");
}

const char* toy_case_name(ToyCase c) { return c == ToyCase::alpha1 ? "alpha1" : "alpha2"; }

ToyReport toy_scheme_experiment(ToyCase c, const ToyExperimentOptions& opt) {
  require(std::isfinite(opt.eps) && opt.eps >= 0.0, "toy: eps must be non-negative");
  require(opt.p >= 1.0, "toy: p must be >= 1");
  opt.grid.validate();
  opt.sim.validate();
  ToyReport rep;
  rep.toy_case = c;
  rep.options = opt;
  ToyParams tp;
  std::vector<double> u0;
  if (c == ToyCase::alpha1) {
    tp.alpha1 = opt.coefficient;
    u0 = random_bounded_field(opt.grid, opt.eps, opt.seed, 1);
    rep.ux_theory = -0.5;
    rep.ux_checked = true;
  } else {
    tp.alpha2 = opt.coefficient;
    u0 = gaussian_field(opt.grid, opt.eps, opt.p);
    rep.u_theory = -1.0 / (2.0 * opt.p);
    rep.ux_theory = -0.5 - 1.0 / (2.0 * opt.p);
    rep.u_checked = rep.ux_checked = true;
  }
  rep.trajectory = simulate_toy(tp, opt.grid, u0, opt.sim);
  const ToyTrajectory& tr = rep.trajectory;
  for (double v : tr.u_sup) rep.u_sup = std::max(rep.u_sup, v);
  const double scale = opt.grid.L / (4.0 * std::numbers::pi);
  rep.window.t_min = 4.0;
  rep.window.t_max = std::min(opt.sim.T, 0.1 * scale * scale);
  if (tr.diverged) {
    std::ostringstream os;
    os << "diverged at t=" << tr.last_valid_t;
    rep.note = os.str();
    return rep;
  }
  if (opt.eps == 0.0) {
    rep.note = "zero data: all norms vanish";
    rep.pass = rep.u_sup == 0.0;
    return rep;
  }
  rep.u_fit = fit_power_law(tr.t, tr.u_sup, rep.window.t_min, rep.window.t_max);
  rep.ux_fit = fit_power_law(tr.t, tr.ux_sup, rep.window.t_min, rep.window.t_max);
  bool ok = true;
  if (c == ToyCase::alpha1) {
    ok = ok && rep.u_sup <= 2.0 * opt.eps;
    ok = ok && std::abs(rep.ux_fit.exponent - rep.ux_theory) <= opt.tolerance_primary;
  } else {
    ok = ok && std::abs(rep.u_fit.exponent - rep.u_theory) <= opt.tolerance_primary;
    ok = ok && std::abs(rep.ux_fit.exponent - rep.ux_theory) <= opt.tolerance_secondary;
  }
  rep.pass = ok;
  return rep;
}

}  // namespace rollstab
