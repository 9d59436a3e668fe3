// SPDX-License-Identifier: Apache-2.0
#include "rollstab/error.hpp"

namespace rollstab {

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::criterion_failed: return "criterion_failed";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace rollstab
