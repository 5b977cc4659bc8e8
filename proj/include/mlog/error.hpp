// Copyright 2026 the mlog authors
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

#ifndef MLOG_ERROR_HPP
#define MLOG_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlog {

// Machine-readable failure and violation codes. Validation reports reuse the
// same vocabulary as thrown errors so diagnostics stay greppable.
enum class ErrorCode {
  // schema validation
  NONPOSITIVE_VERSION,
  INVALID_NAME,
  DUPLICATE_TYPE,
  DUPLICATE_CATEGORY,
  DUPLICATE_FIELD,
  DUPLICATE_PARAM,
  DUPLICATE_TOKEN,
  EMPTY_VOCABULARY,
  NO_CATEGORIES,
  LEVEL_ENCODING_MISMATCH,
  BOUNDS_ORDER,
  NONPOSITIVE_SCALE,
  LABEL_NOT_IN_VOCAB,
  MISSING_VOCABULARY,
  MISSING_BOUNDS,
  MISSING_CENTER_SCALE,
  SUPERFLUOUS_CONSTANT,
  VOCAB_SIZE,
  // registry / persistence
  UNKNOWN_TYPE_OR_CATEGORY,
  UNKNOWN_PARAMETER,
  INVALID_SCHEMA,
  IO_FAILURE,
  PARSE_FAILURE,
  // encoders
  UNKNOWN_TOKEN,
  MALFORMED_ONE_HOT,
  K_TOO_SMALL,
  INDEX_OUT_OF_RANGE,
  OUT_OF_RANGE,
  INSUFFICIENT_STATE,
  // norm state
  NONFINITE_VALUE,
  UNSUPPORTED_FOR_ENCODING,
  RAW_VALUE_MISSING,
  VALUE_OUTSIDE_NEW_BOUNDS,
  // emitter / reader
  SCHEMA_MISMATCH,
  ARITY_MISMATCH,
  EMPTY_INPUT,
  UNSUPPORTED_REDUCER,
  MALFORMED_LINE,
  WIDTH_MISMATCH,
  FINGERPRINT_MIX,
  EMPTY_SELECTION,
  // evolution
  UNRESOLVABLE_SEGMENT,
  FINGERPRINT_MISMATCH,
  OVERRIDE_INVALID,
  // cli
  USAGE,
};

std::string_view to_string(ErrorCode code);

// All failing operations throw Error; soft outcomes (validation violations,
// template no-match, unknown link ids) are returned as values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlog

#endif  // MLOG_ERROR_HPP
