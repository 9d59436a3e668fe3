// SPDX-License-Identifier: Apache-2.0
#include "rollstab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "rollstab/error.hpp"

namespace rollstab {

namespace {

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const RollParams& p) { return {{"q", p.q}, {"D", p.D}, {"gamma", p.gamma}}; }

Json to_json(const Grid& g) { return {{"L", g.L}, {"N", g.N}, {"dx", g.dx()}, {"dk", g.dk()}}; }

Json to_json(const Lambda1& l) {
  return {{"plus", l.plus},
          {"minus", l.minus},
          {"plus_complex", complex_json(l.plus_c)},
          {"minus_complex", complex_json(l.minus_c)},
          {"complex_pair", l.complex_pair},
          {"discriminant", l.discriminant}};
}

Json to_json(const StabilityReport& r) {
  Json eigs = Json::array();
  for (const cplx& z : r.Linf_eigs) eigs.push_back(complex_json(z));
  return {{"params", to_json(r.params)},
          {"verdict", r.verdict},
          {"reason", r.reason},
          {"margin", finite_or_null(r.margin)},
          {"b4", r.b.b4},
          {"b2", r.b.b2},
          {"b0", r.b.b0},
          {"min_a2", r.min_a2},
          {"min_a0_scaled", r.min_a0_scaled},
          {"min_hurwitz_scaled", r.min_hurwitz_scaled},
          {"k_points", r.k.size()},
          {"Linf_eigenvalues", eigs},
          {"Linf_bound", r.Linf_bound}};
}

Json to_json(const EstimateCertificate& c) {
  Json j{{"id", c.id},
         {"pass", c.pass},
         {"exponential", c.exponential},
         {"exponent", c.exponent},
         {"theoretical", c.theoretical},
         {"tolerance", c.tolerance},
         {"constant", c.constant},
         {"t_min", c.t_min},
         {"t_max", c.t_max},
         {"residual", c.residual},
         {"times", c.times},
         {"values", c.values}};
  if (c.exponential) {
    j["rate"] = c.rate;
    j["short_time_constant"] = c.short_time_constant;
  }
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json to_json(const RateFit& f) {
  return {{"exponent", f.exponent}, {"constant", f.constant}, {"t_min", f.t_min},
          {"t_max", f.t_max},       {"residual", f.residual}, {"samples", f.samples}};
}

Json to_json(const ExpFit& f) {
  return {{"rate", f.rate},   {"constant", f.constant}, {"t_min", f.t_min},
          {"t_max", f.t_max}, {"residual", f.residual}, {"samples", f.samples}};
}

Json to_json(const TemplateValue& v) {
  return {{"variant", v.variant.describe()}, {"t", v.t}, {"eta1", v.eta1}, {"eta2", v.eta2}, {"eta", v.eta}};
}

Json to_json(const OracleReport& r) {
  return {{"kind", oracle_kind_name(r.kind)},
          {"index", r.index},
          {"t", r.t},
          {"integral", r.integral},
          {"ratio", r.ratio},
          {"sup_ratio", r.sup_ratio},
          {"last_decade_variation", finite_or_null(r.last_decade_variation)}};
}

Json to_json(const ToyReport& r) {
  Json j{{"case", toy_case_name(r.toy_case)},
         {"eps", r.options.eps},
         {"p", r.options.p},
         {"coefficient", r.options.coefficient},
         {"seed", r.options.seed},
         {"grid", to_json(r.options.grid)},
         {"window", {r.window.t_min, r.window.t_max}},
         {"diverged", r.trajectory.diverged},
         {"last_valid_t", r.trajectory.last_valid_t},
         {"u_sup", r.u_sup},
         {"pass", r.pass}};
  if (r.u_checked || r.ux_checked || r.u_fit.samples > 0) {
    j["u_fit"] = to_json(r.u_fit);
    j["ux_fit"] = to_json(r.ux_fit);
    j["u_theory"] = r.u_checked ? Json(r.u_theory) : Json(nullptr);
    j["ux_theory"] = r.ux_checked ? Json(r.ux_theory) : Json(nullptr);
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json to_json(const InitialData& d) {
  return {{"r", initial_kind_name(d.spec.r)},
          {"phi", initial_kind_name(d.spec.phi)},
          {"B", initial_kind_name(d.spec.B)},
          {"eps", d.spec.eps},
          {"p", d.spec.p},
          {"seed", d.spec.seed},
          {"sideband_k", d.spec.sideband_k},
          {"width", d.spec.width},
          {"r_W2inf", d.r_w2},
          {"phi_W2inf", d.phi_w2},
          {"B_W1inf", d.B_w1},
          {"B_Lp", d.B_lp},
          {"psi_sup", d.psi_sup}};
}

Json to_json(const SimulationOptions& o) {
  return {{"T", o.T},
          {"dt", o.dt},
          {"scheme", scheme_name(o.scheme)},
          {"thinning", o.thinning},
          {"snapshot_every", o.snapshot_every},
          {"guard", o.guard},
          {"dealias", o.dealias},
          {"sideband_k", o.sideband_k}};
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) fail(ErrorCode::io, "write failed for '" + path + "'");
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_curves_csv(const std::string& path, const SpectralData& d) {
  auto out = open_out(path);
  out << "k,re_lc_p,im_lc_p,re_lc_m,im_lc_m,re_ls,im_ls\n";
  for (std::size_t i = 0; i < d.k.size(); ++i) {
    out << format_number(d.k[i]);
    for (const cplx& z : d.curves[i]) out << ',' << format_number(z.real()) << ',' << format_number(z.imag());
    out << '\n';
  }
}

void write_kernel_csv(const std::string& path, const KernelTable& table, double z_max, std::size_t stride) {
  require(stride >= 1, "kernel csv: stride must be >= 1");
  auto out = open_out(path);
  out << "z,t,component,i,j,value\n";
  const auto zs = table.grid.zs();
  auto emit = [&](const std::vector<KernelSamples>& G, const char* comp) {
    for (std::size_t ti = 0; ti < G.size(); ++ti)
      for (std::size_t zi = 0; zi < zs.size(); zi += stride) {
        if (std::abs(zs[zi]) > z_max) continue;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            out << format_number(zs[zi]) << ',' << format_number(table.times[ti]) << ',' << comp << ',' << i << ','
                << j << ',' << format_number(G[ti][zi](i, j).real()) << '\n';
      }
  };
  emit(table.Gc, "c");
  emit(table.Ge, "e");
}

void write_norms_csv(const std::string& path, const std::vector<NormRecord>& log) {
  auto out = open_out(path);
  out << "t,norm_id,value\n";
  for (const NormRecord& r : log)
    for (std::size_t i = 0; i < kNormCount; ++i)
      out << format_number(r.t) << ',' << norm_name(static_cast<NormId>(i)) << ',' << format_number(r.v[i]) << '\n';
}

void write_series_csv(const std::string& path, const std::vector<double>& t, const std::vector<double>& v) {
  require(t.size() == v.size(), "series csv: length mismatch");
  auto out = open_out(path);
  out << "t,value\n";
  for (std::size_t i = 0; i < t.size(); ++i) out << format_number(t[i]) << ',' << format_number(v[i]) << '\n';
}

void write_field_csv(const std::string& path, const Grid& g, const std::vector<double>& f) {
  require(f.size() == g.N, "field csv: length differs from grid");
  auto out = open_out(path);
  out << "x,value\n";
  for (std::size_t i = 0; i < g.N; ++i) out << format_number(g.x(i)) << ',' << format_number(f[i]) << '\n';
}

}  // namespace rollstab
