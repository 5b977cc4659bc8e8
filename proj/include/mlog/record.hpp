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
//
// The AI log wire format. One LF-terminated ASCII line per record:
//
//   <fp16>|<writer_id>|<seq>|<timestamp_us>|<link_id32>|<t>.<c>|<e,...>|<r,...>|<label>
//
// Encoded values print as fixed 6-fractional-digit decimals, raw numerics as
// shortest round-trip decimals, raw tokens percent-encoded. The header line
// is `#mlog v1 fp=<fp16>`.

#ifndef MLOG_RECORD_HPP
#define MLOG_RECORD_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mlog/schema.hpp"

namespace mlog {

// Reserved type index for in-log meta records (encoding-change markers).
inline constexpr std::size_t kMetaTypeIndex = 65535;

// A retained original value: a token for identifying fields and categorical
// parameters, a number for numeric parameters. An empty token marks a value
// that never existed (e.g. segments introduced by migration).
using RawValue = std::variant<std::string, double>;

bool raw_is_number(const RawValue& value);
double raw_number(const RawValue& value);          // RAW_VALUE_MISSING
const std::string& raw_token(const RawValue& value);

struct AiLogRecord {
  std::string schema_fp;   // 16 hex digits
  std::string writer_id;
  std::uint64_t seq = 0;   // per-writer, gap-free within a file
  std::int64_t timestamp_us = 0;
  std::string link_id;     // 32 hex digits, shared with the human log line
  std::size_t type_index = 0;
  std::size_t category_index = 0;
  std::vector<double> encoded;
  std::vector<RawValue> raw;  // identifying fields then parameters
  std::string label;          // empty = unlabeled

  bool is_meta() const { return type_index == kMetaTypeIndex; }

  bool operator==(const AiLogRecord&) const = default;
};

struct HumanLogRecord {
  std::int64_t timestamp_us = 0;
  std::string link_id;
  std::string text;
};

std::string ai_header(std::string_view fingerprint);
// Fingerprint if the line is a well-formed header.
std::optional<std::string> parse_ai_header(std::string_view line);

std::string serialize_record(const AiLogRecord& record);  // no trailing LF

// Full parse with width and arity checks against the schema layout. Throws
// MALFORMED_LINE / WIDTH_MISMATCH / UNKNOWN_TYPE_OR_CATEGORY without line
// context; readers add positions.
AiLogRecord parse_record(std::string_view line, const LogSchema& schema);

std::string serialize_human(const HumanLogRecord& record);  // no trailing LF
HumanLogRecord parse_human(std::string_view line);          // MALFORMED_LINE

}  // namespace mlog

#endif  // MLOG_RECORD_HPP
