// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace tedjoin {

enum class ErrorKind {
  Validation,
  Bounds,
  Parse,
  Io,
  Resource,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. The kind maps one-to-one onto the
/// C API status codes and the CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace tedjoin
