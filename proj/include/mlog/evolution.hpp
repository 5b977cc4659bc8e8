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
// Schema evolution: classify changes between two schema versions, build an
// executable per-segment migration map for breaking changes, and rewrite old
// logs into the new layout so multi-version logs combine into one training
// set. Raw-value retention is what makes re_encode_from_raw total.

#ifndef MLOG_EVOLUTION_HPP
#define MLOG_EVOLUTION_HPP

#include <map>
#include <string>
#include <vector>

#include "mlog/record.hpp"
#include "mlog/schema.hpp"

namespace mlog {

enum class ChangeKind {
  vocab_append,
  vocab_remove,
  vocab_reorder,
  param_add,
  param_remove,
  bounds_change,
  encoding_change,
  category_add,
  category_remove,
};

std::string_view to_string(ChangeKind kind);

struct SchemaChange {
  ChangeKind kind;
  std::string path;
  std::string detail;
};

enum class Compatibility { compatible, breaking };

struct SchemaDiff {
  std::vector<SchemaChange> changes;
  Compatibility classification = Compatibility::compatible;

  std::string to_text() const;
};

// Complete change list; compatible iff every change is one of
// {vocab_append, category_add, param_add}.
SchemaDiff diff_schemas(const LogSchema& old_schema,
                        const LogSchema& new_schema);

enum class RuleKind { copy, zero_pad, re_encode_from_raw, default_fill };

std::string_view to_string(RuleKind kind);

struct SegmentRule {
  RuleKind kind = RuleKind::copy;
  double fill_value = 0.0;  // default_fill
};

// How one target-layout segment is produced from an old record.
struct SegmentPlan {
  LayoutSegment target;  // in the new layout
  SegmentRule rule;
  std::ptrdiff_t source_offset = -1;  // encoded offset in the old layout
  std::size_t source_width = 0;
  std::ptrdiff_t source_raw_index = -1;  // raw cell in the old record
};

struct CategoryPlan {
  std::string type;
  std::string category;
  std::size_t old_type_index = 0;
  std::size_t old_category_index = 0;
  std::size_t new_type_index = 0;
  std::size_t new_category_index = 0;
  std::size_t target_width = 0;
  std::vector<SegmentPlan> segments;           // covers the full new layout
  std::vector<std::ptrdiff_t> raw_map;         // target raw -> source raw
  std::vector<std::string> dropped_segments;   // removed params (audit)
};

// Override rule text per segment path (`type.category.param` or
// `identifying_fields.field`), or `type.category=drop` to discard a removed
// category's records: copy | zero_pad | re_encode_from_raw | drop |
// default_fill:<value>.
using MigrationOverrides = std::map<std::string, std::string>;

struct MigrationMap {
  std::string from_fp;
  std::string to_fp;
  LogSchema from_schema;
  LogSchema to_schema;
  std::vector<CategoryPlan> categories;
  std::vector<std::string> dropped_categories;  // "type.category"

  const CategoryPlan* plan_for(std::size_t old_type_index,
                               std::size_t old_category_index) const;
  bool is_dropped(std::string_view type, std::string_view category) const;
  std::string to_text() const;
};

// Every target segment ends up covered by exactly one rule or the build
// fails with UNRESOLVABLE_SEGMENT naming the segment that needs an override.
MigrationMap build_migration(const LogSchema& old_schema,
                             const LogSchema& new_schema,
                             const MigrationOverrides& overrides = {});

AiLogRecord migrate_record(const AiLogRecord& record, const MigrationMap& map);

struct MigrateSummary {
  std::size_t records_in = 0;
  std::size_t records_out = 0;
  std::size_t records_dropped = 0;
};

MigrateSummary migrate_log(const std::string& in_path,
                           const std::string& out_path,
                           const MigrationMap& map);

}  // namespace mlog

#endif  // MLOG_EVOLUTION_HPP
