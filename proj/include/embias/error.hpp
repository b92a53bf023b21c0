// Copyright 2026 The embias Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMBIAS_ERROR_HPP_
#define EMBIAS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace embias {

// Error categories. Values line up with the C API status codes and the
// CLI exit codes.
enum class ErrorCode {
  kUsage = 1,    // bad argument or configuration
  kData = 2,     // malformed input, validation failure, I/O
  kNumeric = 3,  // undefined or non-finite numeric result
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void ThrowUsage(const std::string& message) {
  throw Error(ErrorCode::kUsage, message);
}
[[noreturn]] inline void ThrowData(const std::string& message) {
  throw Error(ErrorCode::kData, message);
}
[[noreturn]] inline void ThrowNumeric(const std::string& message) {
  throw Error(ErrorCode::kNumeric, message);
}

}  // namespace embias

#endif  // EMBIAS_ERROR_HPP_
