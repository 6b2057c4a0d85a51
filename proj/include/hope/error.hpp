/*
 * Copyright 2026 The HOPE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HOPE_ERROR_HPP_
#define HOPE_ERROR_HPP_

#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hope {

enum class ErrorCode {
  kNotInvertible,
  kExhausted,
  kPlaintextOutOfRange,
  kKeyMismatch,
  kMalformedCiphertext,
  kBoundTooLarge,
  kInvalidKey,
  kInvalidArgument,
  kBadEncoding,
  kCorruptFile,
  kVersionMismatch,
  kProtocol,
  kTransport,
};

constexpr std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotInvertible: return "not-invertible";
    case ErrorCode::kExhausted: return "exhausted";
    case ErrorCode::kPlaintextOutOfRange: return "plaintext-out-of-range";
    case ErrorCode::kKeyMismatch: return "key-mismatch";
    case ErrorCode::kMalformedCiphertext: return "malformed-ciphertext";
    case ErrorCode::kBoundTooLarge: return "bound-too-large";
    case ErrorCode::kInvalidKey: return "invalid-key";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kBadEncoding: return "bad-encoding";
    case ErrorCode::kCorruptFile: return "corrupt-file";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kTransport: return "transport";
  }
  return "unknown";
}

inline std::ostream& operator<<(std::ostream& os, ErrorCode code) { return os << ErrorCodeName(code); }

// All library failures are reported as hope::Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// An ERROR message returned by a remote server. `remote_code()` is the
// wire-level code string, e.g. "not-initialized".
class ServerError : public Error {
 public:
  ServerError(std::string remote_code, const std::string& message)
      : Error(ErrorCode::kProtocol, remote_code + " (" + message + ")"),
        remote_code_(std::move(remote_code)) {}

  const std::string& remote_code() const noexcept { return remote_code_; }

 private:
  std::string remote_code_;
};

}  // namespace hope

#endif  // HOPE_ERROR_HPP_
