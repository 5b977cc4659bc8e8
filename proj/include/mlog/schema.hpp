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
// The organization-wide log schema: the single source of truth for entry
// taxonomy, identifying vocabularies, parameter encodings and the resulting
// vector layout of every emitted record. Schemas are immutable values after
// validation and safe to share across threads.

#ifndef MLOG_SCHEMA_HPP
#define MLOG_SCHEMA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlog/error.hpp"

namespace mlog {

// Stevens measurement levels; each admits a fixed set of encodings.
enum class Level {
  nominal,
  ordinal_dichotomous,
  ordinal,
  interval,
  ratio,
};

enum class Encoding {
  one_hot,
  bit,
  helmert,
  backward_difference,
  orthogonal_polynomial,
  minmax,
  sigmoid,
  tanh,
  quantile_gaussian,
};

std::string_view to_string(Level level);
std::string_view to_string(Encoding encoding);
std::optional<Level> parse_level(std::string_view token);
std::optional<Encoding> parse_encoding(std::string_view token);

// True for encodings that consume a token and need a vocabulary.
bool is_categorical(Encoding encoding);
// True for contrast codings (vocab of k levels -> k-1 real columns).
bool is_contrast(Encoding encoding);

struct Bounds {
  double min = 0.0;
  double max = 1.0;
  bool operator==(const Bounds&) const = default;
};

struct CenterScale {
  double center = 0.0;
  double scale = 1.0;
  bool operator==(const CenterScale&) const = default;
};

// One parameter: measurement level, encoding choice and the constants the
// encoding needs (exactly the one matching the encoding; quantile_gaussian
// carries none, its state lives with the writer).
struct ParameterSpec {
  std::string name;
  Level level = Level::ratio;
  Encoding encoding = Encoding::minmax;
  std::vector<std::string> vocabulary;
  std::optional<Bounds> bounds;
  std::optional<CenterScale> center_scale;

  bool categorical() const { return is_categorical(encoding); }
  std::size_t encoded_width() const;

  bool operator==(const ParameterSpec&) const = default;
};

struct EntryCategoryDef {
  std::string name;
  std::vector<ParameterSpec> params;  // arity fixed at definition time
  std::optional<std::string> intrinsic_label;

  bool operator==(const EntryCategoryDef&) const = default;
};

struct EntryTypeDef {
  std::string name;
  std::vector<EntryCategoryDef> categories;

  bool operator==(const EntryTypeDef&) const = default;
};

// Identifying header field; always one-hot, vocabulary order defines bit
// positions and is append-only across schema versions.
struct IdentifyingFieldDef {
  std::string name;
  std::vector<std::string> vocabulary;

  bool operator==(const IdentifyingFieldDef&) const = default;
};

struct LogSchema {
  std::uint32_t version = 1;
  std::vector<IdentifyingFieldDef> identifying_fields;
  std::vector<EntryTypeDef> entry_types;
  std::vector<std::string> labels;

  const EntryTypeDef* find_type(std::string_view name) const;
  const EntryCategoryDef* find_category(std::string_view type,
                                        std::string_view category) const;
  // Indices into the schema ordering, as carried by records on the wire.
  std::optional<std::size_t> type_index(std::string_view name) const;
  std::optional<std::size_t> category_index(std::string_view type,
                                            std::string_view category) const;
  std::optional<std::size_t> label_index(std::string_view label) const;

  bool operator==(const LogSchema&) const = default;
};

struct Violation {
  ErrorCode code;
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  std::string to_text() const;
};

// Pure: lists every invariant violation; an empty report means valid.
ValidationReport validate_schema(const LogSchema& schema);

enum class SegmentKind { identifying, parameter };

struct LayoutSegment {
  SegmentKind kind;
  std::string name;
  std::size_t offset = 0;
  std::size_t width = 0;
};

// Encoded-vector layout of one (type, category): identifying one-hot blocks
// in field order, then parameter blocks in spec order.
struct Layout {
  std::vector<LayoutSegment> segments;
  std::size_t total_width = 0;

  const LayoutSegment* find(SegmentKind kind, std::string_view name) const;
};

Layout vector_layout(const LogSchema& schema, std::string_view type,
                     std::string_view category);

// Canonical serialization: UTF-8, sorted-key compact JSON, LF only. The
// fingerprint is the 64-bit FNV-1a of that text as 16 lowercase hex digits.
std::string canonical_schema_json(const LogSchema& schema);
std::string schema_fingerprint(const LogSchema& schema);  // INVALID_SCHEMA

std::string schema_to_json(const LogSchema& schema);  // pretty, for files
LogSchema parse_schema(std::string_view json_text);   // PARSE_FAILURE
void save_schema(const LogSchema& schema, const std::string& path);
LogSchema load_schema(const std::string& path);

// The HDFS-flavoured example schema bundled with the repository (also the
// `mlog demo` default).
std::string_view bundled_example_schema_json();
LogSchema bundled_example_schema();

}  // namespace mlog

#endif  // MLOG_SCHEMA_HPP
