// Copyright 2026 the hsmmattn authors
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

#ifndef HSMMATTN_ERROR_HPP
#define HSMMATTN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hsmmattn {

// Error categories. The numeric values of Config, Diverged and Validation
// double as process exit codes at the CLI and as status codes in the C API.
enum class ErrorCode : int {
  kInternal = 1,
  kConfig = 2,      // configuration or input parse error
  kDiverged = 3,    // training produced a non-finite objective
  kValidation = 4,  // a validation command exceeded its tolerance
  kInvalidArgument = 5,
  kInfeasible = 6,  // observation length outside [K, K*d_max]
  kIo = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw_error(code, message);
}

}  // namespace hsmmattn

#endif  // HSMMATTN_ERROR_HPP
