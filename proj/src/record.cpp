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

#include "mlog/record.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>

#include "mlog/error.hpp"
#include "mlog/util.hpp"

namespace mlog {

namespace {

constexpr std::string_view kHeaderPrefix = "#mlog v1 fp=";

bool is_hex(std::string_view text, std::size_t length) {
  if (text.size() != length) return false;
  for (char c : text) {
    bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!ok) return false;
  }
  return true;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MALFORMED_LINE, what);
}

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    malformed(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::int64_t parse_i64(std::string_view text, const char* what) {
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    malformed(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

bool raw_is_number(const RawValue& value) {
  return std::holds_alternative<double>(value);
}

double raw_number(const RawValue& value) {
  if (const double* number = std::get_if<double>(&value)) return *number;
  throw Error(ErrorCode::RAW_VALUE_MISSING,
              "raw value is not a number ('" + std::get<std::string>(value) +
                  "')");
}

const std::string& raw_token(const RawValue& value) {
  if (const std::string* token = std::get_if<std::string>(&value)) {
    return *token;
  }
  throw Error(ErrorCode::RAW_VALUE_MISSING, "raw value is not a token");
}

std::string ai_header(std::string_view fingerprint) {
  return std::string(kHeaderPrefix) + std::string(fingerprint);
}

std::optional<std::string> parse_ai_header(std::string_view line) {
  if (line.substr(0, kHeaderPrefix.size()) != kHeaderPrefix) {
    return std::nullopt;
  }
  std::string_view fp = line.substr(kHeaderPrefix.size());
  if (!is_hex(fp, 16)) return std::nullopt;
  return std::string(fp);
}

std::string serialize_record(const AiLogRecord& record) {
  std::string line;
  line.reserve(96 + 9 * record.encoded.size());
  line += record.schema_fp;
  line += '|';
  line += record.writer_id;
  line += '|';
  line += std::to_string(record.seq);
  line += '|';
  line += std::to_string(record.timestamp_us);
  line += '|';
  line += record.link_id;
  line += '|';
  line += std::to_string(record.type_index);
  line += '.';
  line += std::to_string(record.category_index);
  line += '|';
  for (std::size_t i = 0; i < record.encoded.size(); ++i) {
    if (i > 0) line += ',';
    line += format_encoded(record.encoded[i]);
  }
  line += '|';
  for (std::size_t i = 0; i < record.raw.size(); ++i) {
    if (i > 0) line += ',';
    if (raw_is_number(record.raw[i])) {
      line += format_raw_number(std::get<double>(record.raw[i]));
    } else {
      line += percent_encode(std::get<std::string>(record.raw[i]));
    }
  }
  line += '|';
  line += percent_encode(record.label);
  return line;
}

namespace {

// Raw cells are typed by position: identifying fields and categorical
// parameters are tokens, numeric parameters are numbers. Empty numeric
// cells stay as empty tokens (raw value absent).
RawValue parse_raw_cell(std::string_view cell, bool numeric) {
  if (!numeric || cell.empty()) return RawValue(percent_decode(cell));
  return RawValue(parse_number(cell));
}

AiLogRecord parse_meta_tail(AiLogRecord record,
                            const std::vector<std::string_view>& encoded,
                            const std::vector<std::string_view>& raw) {
  if (!(encoded.size() == 1 && encoded[0].empty())) {
    malformed("meta records carry no encoded values");
  }
  if (raw.size() != 4) malformed("meta records carry 4 raw cells");
  record.raw.push_back(RawValue(percent_decode(raw[0])));
  record.raw.push_back(RawValue(percent_decode(raw[1])));
  record.raw.push_back(RawValue(parse_number(raw[2])));
  record.raw.push_back(RawValue(parse_number(raw[3])));
  return record;
}

}  // namespace

AiLogRecord parse_record(std::string_view line, const LogSchema& schema) {
  const auto fields = split(line, '|');
  if (fields.size() != 9) {
    malformed("expected 9 '|'-separated fields, got " +
              std::to_string(fields.size()));
  }
  AiLogRecord record;
  if (!is_hex(fields[0], 16)) malformed("bad schema fingerprint");
  record.schema_fp = std::string(fields[0]);
  if (!is_valid_name(fields[1])) malformed("bad writer id");
  record.writer_id = std::string(fields[1]);
  record.seq = parse_u64(fields[2], "seq");
  record.timestamp_us = parse_i64(fields[3], "timestamp");
  if (!is_hex(fields[4], 32)) malformed("bad link id");
  record.link_id = std::string(fields[4]);

  const auto indices = split(fields[5], '.');
  if (indices.size() != 2) malformed("bad type.category index");
  record.type_index = parse_u64(indices[0], "type index");
  record.category_index = parse_u64(indices[1], "category index");

  const auto encoded_cells = split(fields[6], ',');
  const auto raw_cells = split(fields[7], ',');
  record.label = percent_decode(fields[8]);

  if (record.is_meta()) {
    return parse_meta_tail(std::move(record), encoded_cells, raw_cells);
  }

  if (record.type_index >= schema.entry_types.size()) {
    throw Error(ErrorCode::UNKNOWN_TYPE_OR_CATEGORY,
                "type index " + std::to_string(record.type_index));
  }
  const EntryTypeDef& type = schema.entry_types[record.type_index];
  if (record.category_index >= type.categories.size()) {
    throw Error(ErrorCode::UNKNOWN_TYPE_OR_CATEGORY,
                "category index " + std::to_string(record.category_index) +
                    " under type " + type.name);
  }
  const EntryCategoryDef& category = type.categories[record.category_index];
  const Layout layout = vector_layout(schema, type.name, category.name);

  const bool encoded_empty =
      encoded_cells.size() == 1 && encoded_cells[0].empty();
  const std::size_t encoded_count = encoded_empty ? 0 : encoded_cells.size();
  if (encoded_count != layout.total_width) {
    throw Error(ErrorCode::WIDTH_MISMATCH,
                std::to_string(encoded_count) + " encoded values, layout " +
                    type.name + "." + category.name + " demands " +
                    std::to_string(layout.total_width));
  }
  record.encoded.reserve(encoded_count);
  for (std::size_t i = 0; i < encoded_count; ++i) {
    record.encoded.push_back(parse_number(encoded_cells[i]));
  }

  const std::size_t expected_raw =
      schema.identifying_fields.size() + category.params.size();
  const bool raw_empty = raw_cells.size() == 1 && raw_cells[0].empty();
  const std::size_t raw_count = raw_empty ? 0 : raw_cells.size();
  if (raw_count != expected_raw) {
    // A single empty cell is also a legitimate empty token when exactly one
    // raw value is expected.
    if (!(raw_empty && expected_raw == 1)) {
      throw Error(ErrorCode::WIDTH_MISMATCH,
                  std::to_string(raw_count) + " raw values, expected " +
                      std::to_string(expected_raw));
    }
  }
  record.raw.reserve(expected_raw);
  for (std::size_t i = 0; i < expected_raw; ++i) {
    const bool numeric = i >= schema.identifying_fields.size() &&
                         !category.params[i - schema.identifying_fields.size()]
                              .categorical();
    record.raw.push_back(parse_raw_cell(raw_cells[i], numeric));
  }
  return record;
}

std::string serialize_human(const HumanLogRecord& record) {
  std::string text = record.text;
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';  // human lines are single lines
  }
  return iso8601_utc_us(record.timestamp_us) + " [" + record.link_id + "] " +
         text;
}

HumanLogRecord parse_human(std::string_view line) {
  // 2026-01-01T00:00:00.000000Z [<32 hex>] text
  constexpr std::size_t kTsLen = 27;
  if (line.size() < kTsLen + 36 || line[kTsLen] != ' ' ||
      line[kTsLen + 1] != '[' || line[kTsLen + 34] != ']') {
    malformed("bad human log line");
  }
  HumanLogRecord record;
  std::string_view ts = line.substr(0, kTsLen);
  // Only the pieces needed for ordering are re-derived; the text dominates.
  std::tm tm{};
  int micros = 0;
  if (std::sscanf(std::string(ts).c_str(), "%d-%d-%dT%d:%d:%d.%6dZ",
                  &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &micros) != 7) {
    malformed("bad human log timestamp");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  record.timestamp_us =
      static_cast<std::int64_t>(timegm(&tm)) * 1000000 + micros;
  record.link_id = std::string(line.substr(kTsLen + 2, 32));
  if (!is_hex(record.link_id, 32)) malformed("bad link id in human line");
  record.text = std::string(line.substr(kTsLen + 36));
  return record;
}

}  // namespace mlog
