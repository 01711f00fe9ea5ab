// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace scenemock {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kFormat,
  kNumeric,
  kBehindCamera,
  kDegenerateDatabase,
  kInsufficientSamples,
  kCollapsedComponent,
  kZeroSupport,
};

/// Base exception for every failure raised by the core library. The C API
/// translates the code into an sm_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace scenemock
