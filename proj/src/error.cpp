// SPDX-License-Identifier: Apache-2.0
#include "tedjoin/error.hpp"

namespace tedjoin {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Bounds: return "bounds error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Resource: return "resource error";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace tedjoin
