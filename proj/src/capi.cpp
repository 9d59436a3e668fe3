// SPDX-License-Identifier: Apache-2.0
#include "rollstab/rollstab.h"

#include <algorithm>
#include <cstring>
#include <limits>
#include <exception>
#include <new>
#include <string>

#include "rollstab/config.hpp"
#include "rollstab/error.hpp"
#include "rollstab/experiments.hpp"
#include "rollstab/symbol.hpp"

struct rs_config {
  std::string command;
  std::string file;
  rollstab::KeyValueConfig overrides;
  rollstab::ExperimentConfig resolved;
  bool is_resolved = false;
};

struct rs_result {
  int exit_code = 0;
  std::string summary;
  std::string out_dir;
};

namespace {

thread_local std::string last_error;

rs_status to_status(rollstab::ErrorCode c) {
  switch (c) {
    case rollstab::ErrorCode::ok: return RS_OK;
    case rollstab::ErrorCode::criterion_failed: return RS_CRITERION_FAILED;
    case rollstab::ErrorCode::invalid_argument: return RS_INVALID_ARGUMENT;
    case rollstab::ErrorCode::divergence: return RS_DIVERGENCE;
    case rollstab::ErrorCode::numerical: return RS_NUMERICAL;
    case rollstab::ErrorCode::io: return RS_IO;
  }
  return RS_INTERNAL;
}

// Runs f, mapping exceptions to status codes and recording the message.
template <class F>
rs_status guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const rollstab::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RS_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RS_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return RS_INTERNAL;
  }
}

rs_status copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || cap < s.size() + 1) {
    last_error = "buffer too small";
    return RS_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return RS_OK;
}

rs_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return RS_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* rs_version(void) { return "1.0.0"; }

const char* rs_status_name(rs_status s) {
  switch (s) {
    case RS_OK: return "ok";
    case RS_CRITERION_FAILED: return "criterion_failed";
    case RS_INVALID_ARGUMENT: return "invalid_argument";
    case RS_DIVERGENCE: return "divergence";
    case RS_NUMERICAL: return "numerical";
    case RS_IO: return "io";
    case RS_BUFFER_TOO_SMALL: return "buffer_too_small";
    case RS_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* rs_last_error(void) { return last_error.c_str(); }

rs_status rs_config_create(const char* command, rs_config** out) {
  if (!command) return null_argument("command");
  if (!out) return null_argument("out");
  return guarded([&] {
    const std::string c(command);
    if (c != "spectrum" && c != "kernel" && c != "simulate" && c != "toy" && c != "verify-all")
      rollstab::fail(rollstab::ErrorCode::invalid_argument, "unknown command '" + c + "'");
    auto* cfg = new rs_config;
    cfg->command = c;
    *out = cfg;
    return RS_OK;
  });
}

void rs_config_destroy(rs_config* cfg) { delete cfg; }

rs_status rs_config_set_file(rs_config* cfg, const char* path) {
  if (!cfg) return null_argument("cfg");
  if (!path) return null_argument("path");
  last_error.clear();
  cfg->file = path;
  cfg->is_resolved = false;
  return RS_OK;
}

rs_status rs_config_set(rs_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_argument("cfg");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] {
    // Validate the key and value eagerly against a scratch config.
    rollstab::KeyValueConfig one;
    one.set(key, value);
    rollstab::ExperimentConfig probe = rollstab::ExperimentConfig::defaults();
    probe.apply(one);
    cfg->overrides.set(key, value);
    cfg->is_resolved = false;
    return RS_OK;
  });
}

rs_status rs_config_resolve(rs_config* cfg) {
  if (!cfg) return null_argument("cfg");
  return guarded([&] {
    cfg->resolved = rollstab::resolve_config(cfg->command, cfg->file, cfg->overrides);
    cfg->is_resolved = true;
    return RS_OK;
  });
}

rs_status rs_config_get(const rs_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_argument("cfg");
  if (!key) return null_argument("key");
  return guarded([&] {
    if (!cfg->is_resolved) rollstab::fail(rollstab::ErrorCode::invalid_argument, "config is not resolved");
    return copy_out(cfg->resolved.to_kv().get(key), buf, cap, needed);
  });
}

rs_status rs_config_dump(const rs_config* cfg, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_argument("cfg");
  return guarded([&] {
    if (!cfg->is_resolved) rollstab::fail(rollstab::ErrorCode::invalid_argument, "config is not resolved");
    return copy_out(cfg->resolved.to_kv().to_text(), buf, cap, needed);
  });
}

rs_status rs_preset_names(char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    std::string s;
    for (const std::string& n : rollstab::preset_names()) s += n + "\n";
    return copy_out(s, buf, cap, needed);
  });
}

rs_status rs_run(rs_config* cfg, rs_result** out) {
  if (!cfg) return null_argument("cfg");
  rs_result* res = nullptr;
  if (out) {
    res = new (std::nothrow) rs_result;
    if (!res) return RS_INTERNAL;
    *out = res;
  }
  const rs_status st = guarded([&] {
    if (!cfg->is_resolved) {
      cfg->resolved = rollstab::resolve_config(cfg->command, cfg->file, cfg->overrides);
      cfg->is_resolved = true;
    }
    const rollstab::CommandResult r = rollstab::run_command(cfg->resolved);
    if (res) {
      res->exit_code = static_cast<int>(r.status);
      res->summary = r.summary.dump(2);
      res->out_dir = r.out_dir;
    }
    return RS_OK;
  });
  if (st != RS_OK && res) {
    rollstab::ErrorCode code = rollstab::ErrorCode::criterion_failed;
    switch (st) {
      case RS_INVALID_ARGUMENT: code = rollstab::ErrorCode::invalid_argument; break;
      case RS_IO: code = rollstab::ErrorCode::io; break;
      case RS_DIVERGENCE: code = rollstab::ErrorCode::divergence; break;
      default: break;
    }
    res->exit_code = static_cast<int>(rollstab::exit_status_for(code));
    res->summary = rollstab::Json{{"error", last_error}, {"status", rs_status_name(st)}}.dump(2);
  }
  return st;
}

int rs_result_exit_code(const rs_result* res) { return res ? res->exit_code : static_cast<int>(RS_INVALID_ARGUMENT); }

rs_status rs_result_summary(const rs_result* res, char* buf, size_t cap, size_t* needed) {
  if (!res) return null_argument("res");
  last_error.clear();
  return copy_out(res->summary, buf, cap, needed);
}

rs_status rs_result_out_dir(const rs_result* res, char* buf, size_t cap, size_t* needed) {
  if (!res) return null_argument("res");
  last_error.clear();
  return copy_out(res->out_dir, buf, cap, needed);
}

void rs_result_destroy(rs_result* res) { delete res; }

rs_status rs_spectrally_stable(double q, double D, double gamma, int* stable) {
  if (!stable) return null_argument("stable");
  return guarded([&] {
    const rollstab::RollParams p{q, D, gamma};
    p.validate();
    *stable = p.spectrally_stable() ? 1 : 0;
    return RS_OK;
  });
}

rs_status rs_lambda1(double q, double D, double gamma, double out[4]) {
  if (!out) return null_argument("out");
  return guarded([&] {
    const rollstab::RollParams p{q, D, gamma};
    p.validate();
    const rollstab::Lambda1 l = rollstab::lambda1_pm(p);
    out[0] = l.plus_c.real();
    out[1] = l.plus_c.imag();
    out[2] = l.minus_c.real();
    out[3] = l.minus_c.imag();
    return RS_OK;
  });
}

rs_status rs_max_real_eigenvalue(double q, double D, double gamma, double k, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    const rollstab::RollParams p{q, D, gamma};
    p.validate();
    double m = -std::numeric_limits<double>::infinity();
    for (const rollstab::cplx& z : rollstab::eig3(rollstab::assemble_symbol(p, k)).values) m = std::max(m, z.real());
    *out = m;
    return RS_OK;
  });
}

}  // extern "C"
