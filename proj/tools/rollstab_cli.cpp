// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Talks to the library through the C API only.
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rollstab/rollstab.h"

namespace {

constexpr int kUsage = 2;

struct SharedFlags {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;
  bool quiet = false;
};

// Flag name and config key coincide for every documented flag.
const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"q", "roll wavenumber offset"},
    {"D", "diffusion ratio of the large-scale mode"},
    {"gamma", "coupling strength"},
    {"eps", "initial data size"},
    {"seed", "random seed"},
    {"L", "domain length (accepts a trailing 'pi', e.g. 200pi)"},
    {"N", "number of grid points"},
    {"dt", "time step"},
    {"T", "final time"},
    {"p", "Lebesgue exponent of the localized data"},
    {"alpha", "template exponent at q = 0"},
    {"out", "output directory"},
    {"only", "comma list of suites or criterion numbers (verify-all)"},
    {"preset", "named parameter set"},
};

void add_shared(CLI::App* sub, SharedFlags& f) {
  for (const auto& [name, help] : kFlags) {
    sub->add_option_function<std::string>(
        "--" + name, [&f, key = name](const std::string& v) { f.values[key] = v; }, help);
  }
  sub->add_option("--config", f.config_file, "key = value configuration file")->check(CLI::ExistingFile);
  sub->add_option("--set", f.sets, "extra override KEY=VALUE (repeatable)");
  sub->add_flag("--quiet", f.quiet, "suppress the summary on stdout");
}

std::string read_string(rs_status (*get)(const rs_result*, char*, size_t, size_t*), const rs_result* r) {
  size_t need = 0;
  get(r, nullptr, 0, &need);
  std::string s(need, '\0');
  if (get(r, s.data(), s.size(), &need) != RS_OK) return {};
  s.resize(need ? need - 1 : 0);
  return s;
}

int fail_usage(const std::string& what) {
  std::cerr << "rollstab: " << what << "\n";
  return kUsage;
}

int run(const std::string& command, const SharedFlags& f) {
  rs_config* cfg = nullptr;
  if (rs_config_create(command.c_str(), &cfg) != RS_OK) return fail_usage(rs_last_error());
  struct Guard {
    rs_config* c;
    ~Guard() { rs_config_destroy(c); }
  } guard{cfg};

  if (!f.config_file.empty()) rs_config_set_file(cfg, f.config_file.c_str());
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) return fail_usage("--set expects KEY=VALUE, got '" + kv + "'");
    if (rs_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) != RS_OK)
      return fail_usage(rs_last_error());
  }
  for (const auto& [key, value] : f.values)
    if (rs_config_set(cfg, key.c_str(), value.c_str()) != RS_OK) return fail_usage(rs_last_error());
  if (rs_config_resolve(cfg) != RS_OK) return fail_usage(rs_last_error());

  rs_result* res = nullptr;
  const rs_status st = rs_run(cfg, &res);
  const int code = rs_result_exit_code(res);
  if (st != RS_OK) std::cerr << "rollstab: " << rs_status_name(st) << ": " << rs_last_error() << "\n";
  if (!f.quiet) std::cout << read_string(rs_result_summary, res) << "\n";
  const std::string dir = read_string(rs_result_out_dir, res);
  if (!dir.empty()) std::cerr << "rollstab: artifacts in " << dir << "\n";
  rs_result_destroy(res);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability experiments for roll solutions coupled to a conserved large-scale mode"};
  app.set_version_flag("--version", std::string(rs_version()));
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"spectrum", "spectral stability report and eigenvalue curves"},
      {"kernel", "Green-function decomposition and decay certificates"},
      {"simulate", "nonlinear run with fitted decay exponents"},
      {"toy", "scalar toy scheme and integral inequality oracles"},
      {"verify-all", "acceptance criteria with a pass/fail summary"},
  };
  std::map<std::string, SharedFlags> flags;
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) subs.push_back(app.add_subcommand(name, help));
  for (std::size_t i = 0; i < subs.size(); ++i) add_shared(subs[i], flags[commands[i].first]);

  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "print preset names and exit");

  try {
    if (argc >= 2 && std::string(argv[1]) == "--list-presets") {
      size_t need = 0;
      rs_preset_names(nullptr, 0, &need);
      std::string s(need, '\0');
      rs_preset_names(s.data(), s.size(), &need);
      std::cout << s.c_str();
      return 0;
    }
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) return run(commands[i].first, flags[commands[i].first]);
  return kUsage;
}
