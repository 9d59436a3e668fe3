// SPDX-License-Identifier: Apache-2.0
#include "rollstab/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "rollstab/error.hpp"

namespace rollstab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const std::string s = trim(value);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    fail(ErrorCode::invalid_argument, "config: '" + key + "' expects a non-negative integer, got '" + value + "'");
  return v;
}

}  // namespace

double parse_real(const std::string& key, const std::string& value) {
  std::string s = trim(value);
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (s.empty()) s = "1";
  }
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    fail(ErrorCode::invalid_argument, "config: '" + key + "' expects a number, got '" + value + "'");
  return v * factor;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    // Inline comments start at a '#' preceded by whitespace.
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i] == '#' && std::isspace(static_cast<unsigned char>(t[i - 1]))) {
        t = trim(t.substr(0, i));
        break;
      }
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::invalid_argument, origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) fail(ErrorCode::invalid_argument, origin + ":" + std::to_string(lineno) + ": empty key");
    kv.set(key, trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::invalid_argument, "config: cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

const std::string& KeyValueConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(ErrorCode::invalid_argument, "config: missing key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::to_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
  return os.str();
}

namespace {

// One table drives parsing, printing and the unknown-key check.
struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class M>
Field real_field(const char* key, M member) {
  return {key, [key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_real(key, v); },
          [member](const ExperimentConfig& c) { return format_real(c.*member); }};
}
template <class M>
Field size_field(const char* key, M member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            c.*member = static_cast<std::size_t>(parse_uint(key, v));
          },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}
template <class M>
Field text_field(const char* key, M member) {
  return {key, [member](ExperimentConfig& c, const std::string& v) { c.*member = v; },
          [member](const ExperimentConfig& c) { return c.*member; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    v.push_back(text_field("command", &ExperimentConfig::command));
    v.push_back(text_field("preset", &ExperimentConfig::preset));
    v.push_back({"q", [](ExperimentConfig& c, const std::string& s) { c.params.q = parse_real("q", s); },
                 [](const ExperimentConfig& c) { return format_real(c.params.q); }});
    v.push_back({"D", [](ExperimentConfig& c, const std::string& s) { c.params.D = parse_real("D", s); },
                 [](const ExperimentConfig& c) { return format_real(c.params.D); }});
    v.push_back({"gamma", [](ExperimentConfig& c, const std::string& s) { c.params.gamma = parse_real("gamma", s); },
                 [](const ExperimentConfig& c) { return format_real(c.params.gamma); }});
    v.push_back(real_field("eps", &ExperimentConfig::eps));
    v.push_back({"seed", [](ExperimentConfig& c, const std::string& s) { c.seed = parse_uint("seed", s); },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
    v.push_back(real_field("L", &ExperimentConfig::L));
    v.push_back(size_field("N", &ExperimentConfig::N));
    v.push_back(real_field("dt", &ExperimentConfig::dt));
    v.push_back(real_field("T", &ExperimentConfig::T));
    v.push_back(real_field("p", &ExperimentConfig::p));
    v.push_back(real_field("alpha", &ExperimentConfig::alpha));
    v.push_back(text_field("out", &ExperimentConfig::out));
    v.push_back(text_field("only", &ExperimentConfig::only));
    v.push_back(text_field("scheme", &ExperimentConfig::scheme));
    v.push_back(text_field("init_r", &ExperimentConfig::init_r));
    v.push_back(text_field("init_phi", &ExperimentConfig::init_phi));
    v.push_back(text_field("init_B", &ExperimentConfig::init_B));
    v.push_back(real_field("width", &ExperimentConfig::width));
    v.push_back(real_field("sideband_k", &ExperimentConfig::sideband_k));
    v.push_back(size_field("thinning", &ExperimentConfig::thinning));
    v.push_back(real_field("guard", &ExperimentConfig::guard));
    v.push_back(real_field("fit_tmin", &ExperimentConfig::fit_tmin));
    v.push_back(real_field("fit_tmax", &ExperimentConfig::fit_tmax));
    v.push_back(real_field("k_max", &ExperimentConfig::k_max));
    v.push_back(real_field("dk", &ExperimentConfig::dk));
    v.push_back(real_field("k0", &ExperimentConfig::k0));
    v.push_back(real_field("kernel_tmin", &ExperimentConfig::kernel_tmin));
    v.push_back(real_field("kernel_tmax", &ExperimentConfig::kernel_tmax));
    v.push_back(size_field("kernel_times", &ExperimentConfig::kernel_times));
    v.push_back(real_field("kernel_length", &ExperimentConfig::kernel_length));
    v.push_back(size_field("kernel_n", &ExperimentConfig::kernel_n));
    v.push_back(text_field("toy_case", &ExperimentConfig::toy_case));
    v.push_back(real_field("toy_coefficient", &ExperimentConfig::toy_coefficient));
    v.push_back(real_field("oracle_tmax", &ExperimentConfig::oracle_tmax));
    return v;
  }();
  return f;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.L = 200.0 * std::numbers::pi;
  return c;
}

void ExperimentConfig::apply(const KeyValueConfig& kv) {
  for (const auto& [key, value] : kv.entries()) {
    bool found = false;
    for (const Field& f : fields()) {
      if (key == f.key) {
        f.set(*this, value);
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorCode::invalid_argument, "config: unknown key '" + key + "'");
  }
}

KeyValueConfig ExperimentConfig::to_kv() const {
  KeyValueConfig kv;
  for (const Field& f : fields()) kv.set(f.key, f.get(*this));
  return kv;
}

void ExperimentConfig::validate() const {
  params.validate();
  require(std::isfinite(eps) && eps >= 0.0, "config: eps must be non-negative");
  require(std::isfinite(L) && L > 0.0, "config: L must be positive");
  require(N >= 8 && (N & (N - 1)) == 0, "config: N must be a power of two >= 8");
  require(std::isfinite(dt) && dt > 0.0, "config: dt must be positive");
  require(std::isfinite(T) && T > 0.0, "config: T must be positive");
  require(p >= 1.0 && std::isfinite(p), "config: p must be >= 1");
  require(alpha > 0.0 && alpha < 0.25, "config: alpha must lie in (0, 1/4)");
  require(!out.empty(), "config: out must name a directory");
  require(scheme == "etdrk4" || scheme == "imex", "config: scheme must be etdrk4 or imex");
  require(width > 0.0, "config: width must be positive");
  require(sideband_k > 0.0, "config: sideband_k must be positive");
  require(thinning >= 1, "config: thinning must be >= 1");
  require(guard > 0.0, "config: guard must be positive");
  require(fit_tmin >= 0.0 && (fit_tmax == 0.0 || fit_tmax > fit_tmin), "config: fit window is degenerate");
  require(k_max > 0.0 && dk > 0.0 && dk < k_max, "config: need 0 < dk < k_max");
  require(k0 >= 0.0, "config: k0 must be non-negative");
  require(kernel_tmin > 0.0 && kernel_tmax > kernel_tmin && kernel_times >= 2, "config: kernel time range");
  require(kernel_length > 0.0 && kernel_n >= 16 && (kernel_n & (kernel_n - 1)) == 0,
          "config: kernel_n must be a power of two >= 16");
  require(toy_case == "alpha1" || toy_case == "alpha2", "config: toy_case must be alpha1 or alpha2");
  require(std::isfinite(toy_coefficient), "config: toy_coefficient must be finite");
  require(oracle_tmax > 10.0, "config: oracle_tmax must exceed 10");
}

std::vector<std::string> preset_names() {
  return {"realgl", "modgl", "nonlocal", "q0", "eckhaus", "eckhaus_control", "toy_alpha1", "toy_alpha2"};
}

void apply_preset(ExperimentConfig& c, const std::string& name) {
  c.preset = name;
  if (name == "realgl") {
    c.params = {0.2, 1.0, 0.0};
    c.init_r = c.init_phi = "random_bounded";
    c.init_B = "zero";
  } else if (name == "modgl") {
    c.params = {0.3, 1.0, 0.5};
    c.init_r = c.init_phi = "random_bounded";
    c.init_B = "gaussian_localized";
    c.p = 1.0;
  } else if (name == "nonlocal") {
    c.params = {0.3, 1.0, 0.5};
    c.init_r = c.init_phi = c.init_B = "random_bounded";
  } else if (name == "q0") {
    c.params = {0.0, 1.0, 0.5};
    c.init_r = c.init_phi = c.init_B = "random_bounded";
  } else if (name == "eckhaus" || name == "eckhaus_control") {
    c.params = {name == "eckhaus" ? 0.62 : 0.2, 1.0, 0.0};
    c.eps = 1e-3;
    c.init_r = c.init_B = "zero";
    c.init_phi = "sideband";
  } else if (name == "toy_alpha1") {
    c.toy_case = "alpha1";
  } else if (name == "toy_alpha2") {
    c.toy_case = "alpha2";
    c.p = 1.0;
  } else {
    fail(ErrorCode::invalid_argument, "unknown preset '" + name + "'");
  }
}

ExperimentConfig resolve_config(const std::string& command, const std::string& file,
                                const KeyValueConfig& overrides) {
  ExperimentConfig c = ExperimentConfig::defaults();
  KeyValueConfig from_file;
  if (!file.empty()) from_file = KeyValueConfig::load(file);
  std::string preset;
  if (overrides.has("preset"))
    preset = overrides.get("preset");
  else if (from_file.has("preset"))
    preset = from_file.get("preset");
  if (!preset.empty()) apply_preset(c, preset);
  c.apply(from_file);
  c.apply(overrides);
  c.command = command;
  c.validate();
  return c;
}

}  // namespace rollstab
