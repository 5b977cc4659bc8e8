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

#include "mlog/error.hpp"

namespace mlog {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NONPOSITIVE_VERSION: return "NONPOSITIVE_VERSION";
    case ErrorCode::INVALID_NAME: return "INVALID_NAME";
    case ErrorCode::DUPLICATE_TYPE: return "DUPLICATE_TYPE";
    case ErrorCode::DUPLICATE_CATEGORY: return "DUPLICATE_CATEGORY";
    case ErrorCode::DUPLICATE_FIELD: return "DUPLICATE_FIELD";
    case ErrorCode::DUPLICATE_PARAM: return "DUPLICATE_PARAM";
    case ErrorCode::DUPLICATE_TOKEN: return "DUPLICATE_TOKEN";
    case ErrorCode::EMPTY_VOCABULARY: return "EMPTY_VOCABULARY";
    case ErrorCode::NO_CATEGORIES: return "NO_CATEGORIES";
    case ErrorCode::LEVEL_ENCODING_MISMATCH: return "LEVEL_ENCODING_MISMATCH";
    case ErrorCode::BOUNDS_ORDER: return "BOUNDS_ORDER";
    case ErrorCode::NONPOSITIVE_SCALE: return "NONPOSITIVE_SCALE";
    case ErrorCode::LABEL_NOT_IN_VOCAB: return "LABEL_NOT_IN_VOCAB";
    case ErrorCode::MISSING_VOCABULARY: return "MISSING_VOCABULARY";
    case ErrorCode::MISSING_BOUNDS: return "MISSING_BOUNDS";
    case ErrorCode::MISSING_CENTER_SCALE: return "MISSING_CENTER_SCALE";
    case ErrorCode::SUPERFLUOUS_CONSTANT: return "SUPERFLUOUS_CONSTANT";
    case ErrorCode::VOCAB_SIZE: return "VOCAB_SIZE";
    case ErrorCode::UNKNOWN_TYPE_OR_CATEGORY: return "UNKNOWN_TYPE_OR_CATEGORY";
    case ErrorCode::UNKNOWN_PARAMETER: return "UNKNOWN_PARAMETER";
    case ErrorCode::INVALID_SCHEMA: return "INVALID_SCHEMA";
    case ErrorCode::IO_FAILURE: return "IO_FAILURE";
    case ErrorCode::PARSE_FAILURE: return "PARSE_FAILURE";
    case ErrorCode::UNKNOWN_TOKEN: return "UNKNOWN_TOKEN";
    case ErrorCode::MALFORMED_ONE_HOT: return "MALFORMED_ONE_HOT";
    case ErrorCode::K_TOO_SMALL: return "K_TOO_SMALL";
    case ErrorCode::INDEX_OUT_OF_RANGE: return "INDEX_OUT_OF_RANGE";
    case ErrorCode::OUT_OF_RANGE: return "OUT_OF_RANGE";
    case ErrorCode::INSUFFICIENT_STATE: return "INSUFFICIENT_STATE";
    case ErrorCode::NONFINITE_VALUE: return "NONFINITE_VALUE";
    case ErrorCode::UNSUPPORTED_FOR_ENCODING: return "UNSUPPORTED_FOR_ENCODING";
    case ErrorCode::RAW_VALUE_MISSING: return "RAW_VALUE_MISSING";
    case ErrorCode::VALUE_OUTSIDE_NEW_BOUNDS: return "VALUE_OUTSIDE_NEW_BOUNDS";
    case ErrorCode::SCHEMA_MISMATCH: return "SCHEMA_MISMATCH";
    case ErrorCode::ARITY_MISMATCH: return "ARITY_MISMATCH";
    case ErrorCode::EMPTY_INPUT: return "EMPTY_INPUT";
    case ErrorCode::UNSUPPORTED_REDUCER: return "UNSUPPORTED_REDUCER";
    case ErrorCode::MALFORMED_LINE: return "MALFORMED_LINE";
    case ErrorCode::WIDTH_MISMATCH: return "WIDTH_MISMATCH";
    case ErrorCode::FINGERPRINT_MIX: return "FINGERPRINT_MIX";
    case ErrorCode::EMPTY_SELECTION: return "EMPTY_SELECTION";
    case ErrorCode::UNRESOLVABLE_SEGMENT: return "UNRESOLVABLE_SEGMENT";
    case ErrorCode::FINGERPRINT_MISMATCH: return "FINGERPRINT_MISMATCH";
    case ErrorCode::OVERRIDE_INVALID: return "OVERRIDE_INVALID";
    case ErrorCode::USAGE: return "USAGE";
  }
  return "UNKNOWN";
}

}  // namespace mlog
