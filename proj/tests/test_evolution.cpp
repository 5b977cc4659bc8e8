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

#include "mlog/evolution.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "mlog/emitter.hpp"
#include "mlog/reader.hpp"
#include "mlog/util.hpp"
#include "test_schemas.hpp"

using namespace mlog;

namespace {

std::string temp_path(const std::string& name) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove(path);
  return path.string();
}

bool has_change(const SchemaDiff& diff, ChangeKind kind,
                std::string_view path) {
  return std::any_of(diff.changes.begin(), diff.changes.end(),
                     [&](const SchemaChange& c) {
                       return c.kind == kind && c.path == path;
                     });
}

}  // namespace

TEST_CASE("identical schemas diff to an empty compatible change list") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const SchemaDiff diff = diff_schemas(schema, schema);
  CHECK(diff.changes.empty());
  CHECK(diff.classification == Compatibility::compatible);
}

TEST_CASE("vocabulary appends stay compatible") {
  const LogSchema old_schema = test_schemas::hdfs_job_schema();
  LogSchema new_schema = old_schema;
  new_schema.identifying_fields[2].vocabulary.push_back("srv4");
  const SchemaDiff diff = diff_schemas(old_schema, new_schema);
  REQUIRE(diff.changes.size() == 1);
  CHECK(has_change(diff, ChangeKind::vocab_append,
                   "identifying_fields.server"));
  CHECK(diff.classification == Compatibility::compatible);
}

TEST_CASE("bounds changes are breaking") {
  const LogSchema old_schema = test_schemas::hdfs_job_schema();
  LogSchema new_schema = old_schema;
  new_schema.entry_types[0].categories[0].params[1].bounds = Bounds{0, 40};
  const SchemaDiff diff = diff_schemas(old_schema, new_schema);
  REQUIRE(diff.changes.size() == 1);
  CHECK(has_change(diff, ChangeKind::bounds_change,
                   "info.job_submit.splits"));
  CHECK(diff.classification == Compatibility::breaking);
}

TEST_CASE("diff covers the full change-kind taxonomy") {
  const LogSchema old_schema = bundled_example_schema();
  LogSchema new_schema = old_schema;

  SUBCASE("param_add is compatible") {
    new_schema.entry_types[0].categories[0].params.push_back(
        test_schemas::minmax_param("priority", 0.0, 9.0));
    const SchemaDiff diff = diff_schemas(old_schema, new_schema);
    CHECK(has_change(diff, ChangeKind::param_add,
                     "info.job_submit.priority"));
    CHECK(diff.classification == Compatibility::compatible);
  }
  SUBCASE("param_remove is breaking") {
    new_schema.entry_types[0].categories[0].params.pop_back();
    const SchemaDiff diff = diff_schemas(old_schema, new_schema);
    CHECK(has_change(diff, ChangeKind::param_remove,
                     "info.job_submit.splits"));
    CHECK(diff.classification == Compatibility::breaking);
  }
  SUBCASE("category_add is compatible") {
    EntryCategoryDef extra;
    extra.name = "heartbeat";
    new_schema.entry_types[1].categories.push_back(extra);
    const SchemaDiff diff = diff_schemas(old_schema, new_schema);
    CHECK(has_change(diff, ChangeKind::category_add, "debug.heartbeat"));
    CHECK(diff.classification == Compatibility::compatible);
  }
  SUBCASE("category_remove is breaking") {
    new_schema.entry_types[3].categories.pop_back();
    const SchemaDiff diff = diff_schemas(old_schema, new_schema);
    CHECK(has_change(diff, ChangeKind::category_remove, "error.job_failed"));
    CHECK(diff.classification == Compatibility::breaking);
  }
  SUBCASE("encoding changes are breaking") {
    auto& param = new_schema.entry_types[0].categories[0].params[0];
    param.encoding = Encoding::tanh;
    param.bounds.reset();
    param.center_scale = CenterScale{0.0, 1.0};
    const SchemaDiff diff = diff_schemas(old_schema, new_schema);
    CHECK(has_change(diff, ChangeKind::encoding_change,
                     "info.job_submit.job_size"));
    CHECK(diff.classification == Compatibility::breaking);
  }
  SUBCASE("vocabulary reorders are breaking") {
    auto& vocab = new_schema.identifying_fields[0].vocabulary;
    std::swap(vocab[0], vocab[1]);
    const SchemaDiff diff = diff_schemas(old_schema, new_schema);
    CHECK(has_change(diff, ChangeKind::vocab_reorder,
                     "identifying_fields.level"));
    CHECK(diff.classification == Compatibility::breaking);
  }
  SUBCASE("vocabulary removals are breaking") {
    new_schema.identifying_fields[1].vocabulary = {"main"};
    const SchemaDiff diff = diff_schemas(old_schema, new_schema);
    CHECK(has_change(diff, ChangeKind::vocab_remove,
                     "identifying_fields.process"));
    CHECK(diff.classification == Compatibility::breaking);
  }
  SUBCASE("parameter reorders are breaking") {
    auto& params = new_schema.entry_types[0].categories[0].params;
    std::swap(params[0], params[1]);
    const SchemaDiff diff = diff_schemas(old_schema, new_schema);
    CHECK(has_change(diff, ChangeKind::vocab_reorder,
                     "info.job_submit.params"));
    CHECK(diff.classification == Compatibility::breaking);
  }
}

TEST_CASE("build_migration resolves compatible changes automatically") {
  const LogSchema old_schema = test_schemas::hdfs_job_schema();

  SUBCASE("vocab_append widens a one-hot block by zero padding") {
    LogSchema new_schema = old_schema;
    new_schema.identifying_fields[2].vocabulary.push_back("srv4");
    const MigrationMap map = build_migration(old_schema, new_schema);
    REQUIRE(map.categories.size() == 1);
    const auto& plan = map.categories[0];
    const auto it = std::find_if(
        plan.segments.begin(), plan.segments.end(), [](const SegmentPlan& s) {
          return s.target.name == "server";
        });
    REQUIRE(it != plan.segments.end());
    CHECK(it->rule.kind == RuleKind::zero_pad);
    CHECK(it->target.width == 4);
    CHECK(it->source_width == 3);
  }
  SUBCASE("bounds_change re-encodes from retained raw values") {
    LogSchema new_schema = old_schema;
    new_schema.entry_types[0].categories[0].params[1].bounds = Bounds{0, 40};
    const MigrationMap map = build_migration(old_schema, new_schema);
    const auto& plan = map.categories[0];
    const auto it = std::find_if(
        plan.segments.begin(), plan.segments.end(), [](const SegmentPlan& s) {
          return s.target.name == "splits";
        });
    REQUIRE(it != plan.segments.end());
    CHECK(it->rule.kind == RuleKind::re_encode_from_raw);
  }
  SUBCASE("param_remove drops the segment from the target layout") {
    LogSchema new_schema = old_schema;
    new_schema.entry_types[0].categories[0].params.pop_back();
    const MigrationMap map = build_migration(old_schema, new_schema);
    const auto& plan = map.categories[0];
    REQUIRE(plan.dropped_segments.size() == 1);
    CHECK(plan.dropped_segments[0] == "splits");
    CHECK(plan.target_width == 10);  // 9 identifying + job_size
  }
  SUBCASE("unresolvable segments name themselves") {
    LogSchema new_schema = old_schema;
    auto& vocab = new_schema.identifying_fields[0].vocabulary;
    std::swap(vocab[0], vocab[1]);
    CHECK_THROWS_WITH_AS(build_migration(old_schema, new_schema),
                         doctest::Contains("identifying_fields.level"),
                         Error);
    const MigrationMap map = build_migration(
        old_schema, new_schema,
        {{"identifying_fields.level", "re_encode_from_raw"}});
    CHECK(map.categories.size() == 1);
  }
  SUBCASE("category removal needs an explicit drop override") {
    LogSchema new_schema = old_schema;
    EntryCategoryDef keep;
    keep.name = "keep";
    new_schema.entry_types[0].categories.push_back(keep);
    LogSchema removed = new_schema;
    removed.entry_types[0].categories.erase(
        removed.entry_types[0].categories.begin());
    CHECK_THROWS_AS(build_migration(new_schema, removed), Error);
    const MigrationMap map = build_migration(
        new_schema, removed, {{"info.job_submit", "drop"}});
    REQUIRE(map.dropped_categories.size() == 1);
    CHECK(map.dropped_categories[0] == "info.job_submit");
  }
  SUBCASE("unknown override paths are rejected") {
    CHECK_THROWS_AS(
        build_migration(old_schema, old_schema, {{"info.nope.x", "copy"}}),
        Error);
  }
}

TEST_CASE("migrate_record re-encodes, pads, and remaps indices") {
  LogSchema old_schema;
  old_schema.identifying_fields = {{"src", {"a", "b"}}};
  EntryCategoryDef category;
  category.name = "c";
  category.params = {test_schemas::minmax_param("size", 0.0, 10.0)};
  old_schema.entry_types = {{"m", {category}}};

  LogSchema new_schema = old_schema;
  new_schema.entry_types[0].categories[0].params[0].bounds = Bounds{0, 20};
  new_schema.identifying_fields[0].vocabulary.push_back("c");

  const MigrationMap map = build_migration(old_schema, new_schema);

  AiLogRecord record;
  record.schema_fp = map.from_fp;
  record.writer_id = "w0";
  record.seq = 7;
  record.timestamp_us = 123456;
  record.link_id = std::string(32, '1');
  record.type_index = 0;
  record.category_index = 0;
  record.encoded = {1.0, 0.0, 0.5};  // src=a, size raw 5 under (0,10)
  record.raw = {RawValue(std::string("a")), RawValue(5.0)};

  const AiLogRecord migrated = migrate_record(record, map);
  CHECK(migrated.schema_fp == map.to_fp);
  CHECK(migrated.seq == 7);
  CHECK(migrated.timestamp_us == 123456);
  CHECK(migrated.link_id == record.link_id);
  REQUIRE(migrated.encoded.size() == 4);
  // one-hot zero-padded [1,0] -> [1,0,0]; raw 5 re-encoded under (0,20)
  CHECK(migrated.encoded[0] == 1.0);
  CHECK(migrated.encoded[1] == 0.0);
  CHECK(migrated.encoded[2] == 0.0);
  CHECK(format_encoded(migrated.encoded[3]) == "0.250000");

  AiLogRecord wrong = record;
  wrong.schema_fp = std::string(16, '0');
  CHECK_THROWS_AS(migrate_record(wrong, map), Error);
}

TEST_CASE("migrate_log preserves order and rewrites the header") {
  const LogSchema old_schema = test_schemas::hdfs_job_schema();
  LogSchema new_schema = old_schema;
  new_schema.entry_types[0].categories[0].params[0].bounds = Bounds{0, 3e9};
  const MigrationMap map = build_migration(old_schema, new_schema);

  const std::string in_path = temp_path("mlog_mig_in.log");
  const std::string out_path = temp_path("mlog_mig_out.log");

  SUBCASE("empty log migrates to an empty log with the new fingerprint") {
    write_file(in_path, ai_header(map.from_fp) + "\n");
    const MigrateSummary summary = migrate_log(in_path, out_path, map);
    CHECK(summary.records_in == 0);
    CHECK(summary.records_out == 0);
    CHECK(read_file(out_path) == ai_header(map.to_fp) + "\n");
  }

  SUBCASE("record count and order are preserved") {
    {
      WriterOptions options;
      options.link_seed = 11;
      options.clock = fixed_step_clock(0, 1000);
      Writer writer(old_schema, in_path, "", options);
      for (int i = 0; i < 20; ++i) {
        writer.log_event("info", "job_submit", {"INFO", "main", "srv1"},
                         {RawValue(double(i) * 1e7), RawValue(double(i))});
      }
    }
    const MigrateSummary summary = migrate_log(in_path, out_path, map);
    CHECK(summary.records_in == 20);
    CHECK(summary.records_out == 20);
    const RecordStream migrated = read_ai_log(out_path, new_schema);
    REQUIRE(migrated.records.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(migrated.records[i].seq == i);
      // commuted re-encoding: raw/3e9 instead of raw/1.5e9
      CHECK(migrated.records[i].encoded[9] ==
            doctest::Approx(double(i) * 1e7 / 3e9));
    }
  }

  std::remove(in_path.c_str());
  std::remove(out_path.c_str());
}

TEST_CASE("migration commutes with encoding for events in both versions") {
  // Randomized smaller sibling of the acceptance criterion.
  std::uint64_t rng_state = 99;
  auto next = [&rng_state] {
    rng_state ^= rng_state << 13;
    rng_state ^= rng_state >> 7;
    rng_state ^= rng_state << 17;
    return rng_state;
  };

  for (int round = 0; round < 25; ++round) {
    LogSchema old_schema;
    old_schema.identifying_fields = {{"f0", {"a", "b"}},
                                     {"f1", {"x", "y", "z"}}};
    EntryCategoryDef category;
    category.name = "c";
    category.params = {
        test_schemas::minmax_param("m0", 0.0, 100.0),
        test_schemas::one_hot_param("n0", {"p", "q"}),
        test_schemas::ordinal_param("o0", Encoding::backward_difference,
                                    {"l1", "l2", "l3"}),
    };
    old_schema.entry_types = {{"t", {category}}};

    LogSchema new_schema = old_schema;
    switch (next() % 3) {
      case 0:  // vocab_append on an identifying field
        new_schema.identifying_fields[next() % 2].vocabulary.push_back("new");
        break;
      case 1:  // bounds_change
        new_schema.entry_types[0].categories[0].params[0].bounds =
            Bounds{0.0, 50.0 + double(next() % 300)};
        break;
      default:  // param_add
        new_schema.entry_types[0].categories[0].params.push_back(
            test_schemas::minmax_param("extra", 0.0, 1.0));
        break;
    }

    const MigrationMap map = build_migration(old_schema, new_schema);

    // An event expressible in both versions.
    const char* f1_tokens[] = {"x", "y", "z"};
    const std::vector<std::string> identifying = {next() % 2 ? "a" : "b",
                                                  f1_tokens[next() % 3]};
    const double m0 = double(next() % 50);  // inside both bounds
    std::vector<RawValue> old_params = {
        RawValue(m0), RawValue(std::string(next() % 2 ? "p" : "q")),
        RawValue(std::string("l2"))};
    std::vector<RawValue> new_params = old_params;
    if (new_schema.entry_types[0].categories[0].params.size() == 4) {
      new_params.push_back(RawValue(0.5));
    }

    const EncodedEvent old_event =
        encode_event(old_schema, "t", "c", identifying, old_params);
    const EncodedEvent new_event =
        encode_event(new_schema, "t", "c", identifying, new_params);

    AiLogRecord record;
    record.schema_fp = map.from_fp;
    record.writer_id = "w0";
    record.link_id = std::string(32, '2');
    record.encoded = old_event.encoded;
    record.raw = old_event.raw;
    const AiLogRecord migrated = migrate_record(record, map);

    // Segment-wise byte equality wherever the old record carried data.
    const auto& plan = map.categories[0];
    for (const auto& segment : plan.segments) {
      if (segment.source_offset < 0 && segment.source_raw_index < 0) continue;
      for (std::size_t i = 0; i < segment.target.width; ++i) {
        if (segment.rule.kind == RuleKind::zero_pad &&
            i >= segment.source_width) {
          continue;  // positions that never existed in the old layout
        }
        const std::size_t col = segment.target.offset + i;
        CHECK(format_encoded(migrated.encoded[col]) ==
              format_encoded(new_event.encoded[col]));
      }
    }
  }
}
