// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rollstab {

// Numeric values double as process exit statuses in the command runner.
enum class ErrorCode : int {
  ok = 0,
  criterion_failed = 1,
  invalid_argument = 2,
  divergence = 3,
  numerical = 4,
  io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::invalid_argument, what);
}

const char* error_code_name(ErrorCode code) noexcept;

}  // namespace rollstab
