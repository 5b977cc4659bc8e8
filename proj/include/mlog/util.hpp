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

#ifndef MLOG_UTIL_HPP
#define MLOG_UTIL_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mlog {

// Fixed 6-fractional-digit decimal, the wire form of every encoded value.
std::string format_encoded(double v);

// Shortest decimal that round-trips the exact double (raw numeric values).
std::string format_raw_number(double v);

// Strict double parse over the whole view; throws PARSE_FAILURE.
double parse_number(std::string_view text);

// Raw tokens travel percent-encoded so '|' ',' '%' and newlines never break
// the line framing. decode accepts any %XX escape.
std::string percent_encode(std::string_view raw);
std::string percent_decode(std::string_view encoded);

std::vector<std::string_view> split(std::string_view text, char sep);

// Structural names (types, categories, params, fields, writer ids, labels)
// must survive unescaped inside selectors and wire lines: [A-Za-z0-9_-]+.
bool is_valid_name(std::string_view name);

// 64-bit FNV-1a, printed as the 16-hex-digit schema fingerprint.
std::uint64_t fnv1a64(std::string_view data);
std::string to_hex16(std::uint64_t value);

// `2026-01-01T00:00:01.000123Z` from microseconds since the Unix epoch.
std::string iso8601_utc_us(std::int64_t micros);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
// Write to `path.tmp` then rename over `path`; the swap used by every
// log-rewriting operation.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace mlog

#endif  // MLOG_UTIL_HPP
