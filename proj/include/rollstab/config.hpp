// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rollstab/params.hpp"

namespace rollstab {

// Flat "key = value" text. Blank lines, lines starting with '#' and inline
// comments introduced by " #" are ignored; later assignments override
// earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<text>");
  static KeyValueConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::string to_text() const;

 private:
  std::map<std::string, std::string> entries_;
};

// Accepts plain decimals and a trailing "pi" factor ("200pi", "0.5 pi").
double parse_real(const std::string& key, const std::string& value);

// Every knob of every command. Defaults are mirrored in config/defaults.conf.
struct ExperimentConfig {
  std::string command;
  std::string preset;
  RollParams params{0.3, 1.0, 0.5};
  double eps = 0.01;
  std::uint64_t seed = 1;
  double L = 0;               // set to 200 pi by defaults()
  std::size_t N = 4096;
  double dt = 0.01;
  double T = 200.0;
  double p = 1.0;
  double alpha = 0.1;
  std::string out = "rollstab_out";
  std::string only;
  std::string scheme = "etdrk4";
  std::string init_r = "random_bounded";
  std::string init_phi = "random_bounded";
  std::string init_B = "gaussian_localized";
  double width = 2.0;
  double sideband_k = 0.4;
  std::size_t thinning = 10;
  double guard = 1e6;
  double fit_tmin = 4.0;
  double fit_tmax = 0.0;      // 0: default window rule
  double k_max = 10.0;
  double dk = 0.01;
  double k0 = 0.0;            // 0: automatic cutoff
  double kernel_tmin = 4.0, kernel_tmax = 400.0;
  std::size_t kernel_times = 40;
  double kernel_length = 800.0;
  std::size_t kernel_n = 8192;
  std::string toy_case = "alpha1";
  double toy_coefficient = 1.0;
  double oracle_tmax = 1e4;

  static ExperimentConfig defaults();
  // Throws invalid_argument on unknown keys or malformed values.
  void apply(const KeyValueConfig& kv);
  KeyValueConfig to_kv() const;
  void validate() const;
};

std::vector<std::string> preset_names();
// Overwrites the preset's fields; throws invalid_argument for unknown names.
void apply_preset(ExperimentConfig& cfg, const std::string& name);

// defaults < preset < config file < overrides. The preset name is taken from
// the overrides first, then from the file.
ExperimentConfig resolve_config(const std::string& command, const std::string& file,
                                const KeyValueConfig& overrides);

}  // namespace rollstab
