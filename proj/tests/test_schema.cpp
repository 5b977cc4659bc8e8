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

#include "mlog/schema.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "mlog/util.hpp"
#include "test_schemas.hpp"

using namespace mlog;

namespace {

bool has_violation(const ValidationReport& report, ErrorCode code) {
  return std::any_of(report.violations.begin(), report.violations.end(),
                     [code](const Violation& v) { return v.code == code; });
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("smallest legal schema validates cleanly") {
  LogSchema schema;
  schema.version = 1;
  schema.identifying_fields = {{"src", {"a"}}};
  EntryCategoryDef category;
  category.name = "boot";
  schema.entry_types = {{"info", {category}}};
  CHECK(validate_schema(schema).valid());
}

TEST_CASE("duplicate category names within a type are flagged") {
  LogSchema schema;
  schema.identifying_fields = {{"src", {"a"}}};
  EntryCategoryDef c1, c2;
  c1.name = "connectivity";
  c2.name = "connectivity";
  schema.entry_types = {{"warning", {c1, c2}}};
  const auto report = validate_schema(schema);
  CHECK(has_violation(report, ErrorCode::DUPLICATE_CATEGORY));
}

TEST_CASE("level/encoding pairings follow the measurement table") {
  LogSchema schema = test_schemas::hdfs_job_schema();
  auto& param = schema.entry_types[0].categories[0].params[0];
  param.level = Level::nominal;  // nominal + minmax is forbidden
  const auto report = validate_schema(schema);
  CHECK(has_violation(report, ErrorCode::LEVEL_ENCODING_MISMATCH));
}

TEST_CASE("validation is pure and exhaustive") {
  LogSchema schema;
  schema.version = 0;
  schema.identifying_fields = {{"src", {}}, {"src", {"a", "a"}}};
  schema.labels = {"ok", "ok"};
  EntryCategoryDef category;
  category.name = "c";
  category.intrinsic_label = "missing";
  category.params = {test_schemas::minmax_param("p", 5.0, 5.0)};
  schema.entry_types = {{"t", {category}}, {"t", {}}};

  const auto once = validate_schema(schema);
  const auto twice = validate_schema(schema);
  CHECK(once.violations.size() == twice.violations.size());
  CHECK(has_violation(once, ErrorCode::NONPOSITIVE_VERSION));
  CHECK(has_violation(once, ErrorCode::EMPTY_VOCABULARY));
  CHECK(has_violation(once, ErrorCode::DUPLICATE_FIELD));
  CHECK(has_violation(once, ErrorCode::DUPLICATE_TOKEN));
  CHECK(has_violation(once, ErrorCode::DUPLICATE_TYPE));
  CHECK(has_violation(once, ErrorCode::NO_CATEGORIES));
  CHECK(has_violation(once, ErrorCode::LABEL_NOT_IN_VOCAB));
  CHECK(has_violation(once, ErrorCode::BOUNDS_ORDER));
}

TEST_CASE("constant kinds must match the encoding") {
  LogSchema schema = test_schemas::hdfs_job_schema();
  auto& category = schema.entry_types[0].categories[0];

  SUBCASE("minmax without bounds") {
    category.params[0].bounds.reset();
    CHECK(has_violation(validate_schema(schema), ErrorCode::MISSING_BOUNDS));
  }
  SUBCASE("categorical with bounds") {
    category.params[0] = test_schemas::one_hot_param("p", {"x", "y"});
    category.params[0].bounds = Bounds{0, 1};
    CHECK(has_violation(validate_schema(schema),
                        ErrorCode::SUPERFLUOUS_CONSTANT));
  }
  SUBCASE("bit needs exactly two tokens") {
    ParameterSpec p;
    p.name = "flag";
    p.level = Level::ordinal_dichotomous;
    p.encoding = Encoding::bit;
    p.vocabulary = {"a", "b", "c"};
    category.params[0] = p;
    CHECK(has_violation(validate_schema(schema), ErrorCode::VOCAB_SIZE));
  }
  SUBCASE("sigmoid needs positive scale") {
    ParameterSpec p;
    p.name = "lat";
    p.level = Level::interval;
    p.encoding = Encoding::sigmoid;
    p.center_scale = CenterScale{0.0, 0.0};
    category.params[0] = p;
    CHECK(has_violation(validate_schema(schema),
                        ErrorCode::NONPOSITIVE_SCALE));
  }
  SUBCASE("quantile_gaussian carries no constants") {
    ParameterSpec p;
    p.name = "wait";
    p.level = Level::ratio;
    p.encoding = Encoding::quantile_gaussian;
    p.bounds = Bounds{0, 1};
    category.params[0] = p;
    CHECK(has_violation(validate_schema(schema),
                        ErrorCode::SUPERFLUOUS_CONSTANT));
  }
}

TEST_CASE("vector_layout sums one-hot and parameter widths") {
  LogSchema schema = test_schemas::hdfs_job_schema();
  schema.entry_types[0].categories[0].params.clear();

  // identifying one-hots alone: 4 + 2 + 3
  Layout layout = vector_layout(schema, "info", "job_submit");
  CHECK(layout.total_width == 9);
  REQUIRE(layout.segments.size() == 3);
  CHECK(layout.segments[0].offset == 0);
  CHECK(layout.segments[1].offset == 4);
  CHECK(layout.segments[2].offset == 6);

  // ordinal backward_difference with 3 levels contributes k-1 = 2
  schema.entry_types[0].categories[0].params.push_back(
      test_schemas::ordinal_param("sev", Encoding::backward_difference,
                                  {"low", "mid", "high"}));
  layout = vector_layout(schema, "info", "job_submit");
  CHECK(layout.total_width == 11);

  // scalar minmax contributes 1
  schema.entry_types[0].categories[0].params.push_back(
      test_schemas::minmax_param("size", 0.0, 1.0));
  layout = vector_layout(schema, "info", "job_submit");
  CHECK(layout.total_width == 12);
  CHECK(layout.find(SegmentKind::parameter, "size")->offset == 11);

  CHECK_THROWS_WITH_AS(vector_layout(schema, "info", "nope"),
                       doctest::Contains("info.nope"), Error);
}

TEST_CASE("fingerprint is deterministic and order-sensitive") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const std::string fp = schema_fingerprint(schema);
  CHECK(fp == schema_fingerprint(schema));
  CHECK(fp.size() == 16);

  LogSchema appended = schema;
  appended.identifying_fields[2].vocabulary.push_back("srv4");
  CHECK(schema_fingerprint(appended) != fp);

  LogSchema reordered = schema;
  std::swap(reordered.identifying_fields[0], reordered.identifying_fields[1]);
  CHECK(schema_fingerprint(reordered) != fp);
}

TEST_CASE("bundled example schema fingerprint is pinned") {
  // Regression constant computed once from the canonical serialization.
  CHECK(schema_fingerprint(bundled_example_schema()) == "d7e1c96d9bf8c792");
}

TEST_CASE("save/load round-trips structure and fingerprint") {
  const LogSchema schema = bundled_example_schema();
  const std::string path = temp_path("mlog_schema_roundtrip.json");
  save_schema(schema, path);
  const LogSchema loaded = load_schema(path);
  CHECK(loaded == schema);
  CHECK(schema_fingerprint(loaded) == schema_fingerprint(schema));
  std::remove(path.c_str());
}

TEST_CASE("parse failures name the offending token") {
  const char* zscore = R"({
    "version": 1,
    "identifying_fields": [{"name": "f", "vocabulary": ["a"]}],
    "entry_types": [{"name": "t", "categories": [{"name": "c", "params": [
      {"name": "p", "level": "ratio", "encoding": "zscore"}
    ]}]}]
  })";
  CHECK_THROWS_WITH_AS(parse_schema(zscore), doctest::Contains("zscore"),
                       Error);

  CHECK_THROWS_AS(parse_schema("not json"), Error);
  CHECK_THROWS_AS(parse_schema(R"({"version": 1})"), Error);
  CHECK_THROWS_WITH_AS(
      parse_schema(R"({"version": 1, "identifying_fields": [],
                       "entry_types": [], "surprise": 1})"),
      doctest::Contains("surprise"), Error);
}

TEST_CASE("min >= max parses but fails validation as BOUNDS_ORDER") {
  const char* bad_bounds = R"({
    "version": 1,
    "identifying_fields": [{"name": "f", "vocabulary": ["a"]}],
    "entry_types": [{"name": "t", "categories": [{"name": "c", "params": [
      {"name": "p", "level": "ratio", "encoding": "minmax",
       "bounds": {"min": 10.0, "max": 10.0}}
    ]}]}]
  })";
  const LogSchema schema = parse_schema(bad_bounds);
  CHECK(has_violation(validate_schema(schema), ErrorCode::BOUNDS_ORDER));
  CHECK_THROWS_AS(schema_fingerprint(schema), Error);
}

TEST_CASE("bundled example file matches the embedded schema") {
  const auto file = std::filesystem::path(__FILE__)
                        .parent_path()
                        .parent_path() /
                    "schemas" / "example.json";
  REQUIRE(std::filesystem::exists(file));
  const LogSchema from_file = load_schema(file.string());
  CHECK(schema_fingerprint(from_file) ==
        schema_fingerprint(bundled_example_schema()));
}
