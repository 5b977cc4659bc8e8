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

#include "mlog/emitter.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <thread>

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

WriterOptions deterministic_options(const std::string& writer_id,
                                    std::uint64_t seed) {
  WriterOptions options;
  options.writer_id = writer_id;
  options.link_seed = seed;
  options.clock = fixed_step_clock(1700000000000000, 1000);
  return options;
}

std::vector<std::string> file_lines(const std::string& path) {
  std::vector<std::string> lines;
  for (const auto line : split(read_file(path), '\n')) {
    if (!line.empty()) lines.emplace_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("reduce_dynamic collapses variable payloads to fixed arity") {
  const std::vector<std::string> names = {"p1", "p2", "p3"};
  CHECK(reduce_dynamic(names, Reducer::count) == 3.0);
  CHECK(reduce_dynamic(std::vector<std::string>{}, Reducer::count) == 0.0);
  CHECK(reduce_dynamic(std::vector<double>{2.0, 4.0}, Reducer::mean) == 3.0);
  CHECK(reduce_dynamic(std::vector<double>{1.0, 5.0, 2.0}, Reducer::max) ==
        5.0);
  CHECK(reduce_dynamic(std::vector<double>{1.5, 2.5}, Reducer::sum) == 4.0);
  CHECK(reduce_dynamic(std::vector<double>{}, Reducer::sum) == 0.0);
  CHECK(reduce_dynamic(std::vector<double>{}, Reducer::max) == 0.0);
  CHECK_THROWS_AS(reduce_dynamic(std::vector<double>{}, Reducer::mean), Error);
  CHECK_THROWS_AS(reduce_dynamic(names, Reducer::sum), Error);
}

TEST_CASE("writer stamps a header on empty sinks and guards fingerprints") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const std::string path = temp_path("mlog_header.log");

  {
    Writer writer(schema, path, "", deterministic_options("w0", 3));
    const auto lines = file_lines(path);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0] == ai_header(schema_fingerprint(schema)));
  }
  {
    // Reopening with a matching fingerprint adds no second header.
    Writer writer(schema, path, "", deterministic_options("w0", 3));
    CHECK(file_lines(path).size() == 1);
  }
  {
    LogSchema other = schema;
    other.identifying_fields[0].vocabulary.push_back("TRACE");
    CHECK_THROWS_AS(
        Writer(other, path, "", deterministic_options("w0", 3)), Error);
  }
  std::remove(path.c_str());
}

TEST_CASE("log_event encodes the HDFS job-submission scenario") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const std::string path = temp_path("mlog_fig3.log");
  Writer writer(schema, path, "", deterministic_options("w0", 3));

  writer.log_event("info", "job_submit", {"INFO", "main", "srv2"},
                   {RawValue(1256521728.0), RawValue(10.0)});

  const auto lines = file_lines(path);
  REQUIRE(lines.size() == 2);
  const auto fields = split(lines[1], '|');
  REQUIRE(fields.size() == 9);
  // identifying head per the vocabularies, parameter tail per minmax
  CHECK(fields[6] ==
        "0.000000,1.000000,0.000000,0.000000,"
        "1.000000,0.000000,"
        "0.000000,1.000000,0.000000,"
        "0.837681,0.500000");
  CHECK(fields[7] == "INFO,main,srv2,1256521728,10");
  CHECK(fields[5] == "0.0");
  std::remove(path.c_str());
}

TEST_CASE("fixed arity and vocabularies are enforced before any write") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const std::string path = temp_path("mlog_arity.log");
  Writer writer(schema, path, "", deterministic_options("w0", 3));

  CHECK_THROWS_AS(writer.log_event("info", "job_submit",
                                   {"INFO", "main", "srv2"},
                                   {RawValue(1.0)}),
                  Error);  // one param where the spec demands two
  CHECK_THROWS_AS(writer.log_event("info", "job_submit", {"INFO", "main"},
                                   {RawValue(1.0), RawValue(2.0)}),
                  Error);  // missing identifying value
  CHECK_THROWS_AS(writer.log_event("info", "job_submit",
                                   {"INFO", "main", "srv9"},
                                   {RawValue(1.0), RawValue(2.0)}),
                  Error);  // unknown token
  CHECK_THROWS_AS(writer.log_event("info", "nope", {"INFO", "main", "srv2"},
                                   {}),
                  Error);
  CHECK_THROWS_AS(writer.log_event("info", "job_submit",
                                   {"INFO", "main", "srv2"},
                                   {RawValue(2e9), RawValue(2.0)}),
                  Error);  // out of range, no policy
  CHECK(file_lines(path).size() == 1);  // header only, nothing appended
  std::remove(path.c_str());
}

TEST_CASE("writer/reader round-trip matches byte for byte") {
  const LogSchema schema = bundled_example_schema();
  const std::string path = temp_path("mlog_roundtrip.log");
  {
    Writer writer(schema, path, "", deterministic_options("w0", 17));
    writer.log_event("info", "job_submit", {"INFO", "main", "srv2"},
                     {RawValue(1256521728.0), RawValue(10.0)});
    writer.log_event("info", "block_served", {"DEBUG", "worker", "srv1"},
                     {RawValue(1048576.0), RawValue(std::string("hit")),
                      RawValue(std::string("low"))});
    writer.log_event("warning", "connectivity", {"WARN", "main", "srv3"},
                     {RawValue(3.0), RawValue(std::string("degraded"))});
    writer.log_event("error", "job_failed", {"ERROR", "worker", "srv2"},
                     {RawValue(77.0)});
    writer.log_event("debug", "timing", {"DEBUG", "main", "srv1"},
                     {RawValue(120.0), RawValue(std::string("mild"))});
  }
  const RecordStream stream = read_ai_log(path, schema);
  REQUIRE(stream.records.size() == 5);
  const auto lines = file_lines(path);
  for (std::size_t i = 0; i < stream.records.size(); ++i) {
    CHECK(serialize_record(stream.records[i]) == lines[i + 1]);
  }
  // intrinsic label applied at emit time
  CHECK(stream.records[3].label == "failed");
  CHECK(stream.records[0].label.empty());
  std::remove(path.c_str());
}

TEST_CASE("writer output is deterministic under fixed seed and clock") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const std::string p1 = temp_path("mlog_det1.log");
  const std::string p2 = temp_path("mlog_det2.log");
  for (const auto& path : {p1, p2}) {
    Writer writer(schema, path, "", deterministic_options("w0", 99));
    for (int i = 0; i < 20; ++i) {
      writer.log_event("info", "job_submit", {"INFO", "main", "srv2"},
                       {RawValue(1e6 * i), RawValue(double(i % 20))});
    }
  }
  CHECK(read_file(p1) == read_file(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("link ids are unique within a run") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const std::string path = temp_path("mlog_links.log");
  std::set<std::string> links;
  {
    Writer writer(schema, path, "", deterministic_options("w0", 1234));
    for (int i = 0; i < 500; ++i) {
      links.insert(writer.log_event("info", "job_submit",
                                    {"INFO", "main", "srv1"},
                                    {RawValue(1.0), RawValue(2.0)}));
    }
  }
  CHECK(links.size() == 500);
  std::remove(path.c_str());
}

TEST_CASE("seq resumes after reopening the same writer id") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const std::string path = temp_path("mlog_seq.log");
  {
    Writer writer(schema, path, "", deterministic_options("w0", 1));
    writer.log_event("info", "job_submit", {"INFO", "main", "srv1"},
                     {RawValue(1.0), RawValue(2.0)});
    writer.log_event("info", "job_submit", {"INFO", "main", "srv1"},
                     {RawValue(1.0), RawValue(2.0)});
  }
  {
    Writer writer(schema, path, "", deterministic_options("w0", 2));
    CHECK(writer.next_seq() == 2);
    writer.log_event("info", "job_submit", {"INFO", "main", "srv1"},
                     {RawValue(1.0), RawValue(2.0)});
  }
  const RecordStream stream = read_ai_log(path, schema);
  REQUIRE(stream.records.size() == 3);
  CHECK(stream.records[2].seq == 2);
  std::remove(path.c_str());
}

TEST_CASE("human log lines share the record's link id") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const std::string ai_path = temp_path("mlog_dual_ai.log");
  const std::string human_path = temp_path("mlog_dual_human.log");
  std::string link;
  {
    Writer writer(schema, ai_path, human_path,
                  deterministic_options("w0", 5));
    link = writer.log_event("info", "job_submit", {"INFO", "main", "srv2"},
                            {RawValue(5.0), RawValue(6.0)},
                            "submitting job\nwith newline");
  }
  const auto lines = file_lines(human_path);
  REQUIRE(lines.size() == 1);
  const HumanLogRecord human = parse_human(lines[0]);
  CHECK(human.link_id == link);
  CHECK(human.text == "submitting job with newline");
  CHECK(human.timestamp_us == 1700000000000000);
  std::remove(ai_path.c_str());
  std::remove(human_path.c_str());
}

TEST_CASE("robust policy switches the encoder and logs a marker") {
  LogSchema schema;
  schema.identifying_fields = {{"src", {"a"}}};
  EntryCategoryDef category;
  category.name = "c";
  category.params = {test_schemas::minmax_param("size", 0.0, 10.0)};
  schema.entry_types = {{"m", {category}}};

  const std::string path = temp_path("mlog_robust.log");
  {
    auto options = deterministic_options("w0", 7);
    options.range_policy = {RangeStrategy::robust, 0.0};
    Writer writer(schema, path, "", options);
    for (int v = 1; v <= 10; ++v) {
      writer.log_event("m", "c", {"a"}, {RawValue(double(v))});
    }
    writer.log_event("m", "c", {"a"}, {RawValue(42.0)});   // switch here
    writer.log_event("m", "c", {"a"}, {RawValue(5.5)});    // tanh(0) = 0
  }
  const RecordStream stream = read_ai_log(path, schema);
  REQUIRE(stream.records.size() == 13);  // 10 + marker + 2
  const auto& marker = stream.records[10];
  CHECK(marker.is_meta());
  CHECK(raw_token(marker.raw[0]) == "m.c.size");
  CHECK(raw_token(marker.raw[1]) == "tanh");
  CHECK(raw_number(marker.raw[2]) == doctest::Approx(5.5));
  CHECK(raw_number(marker.raw[3]) == doctest::Approx(2.5));
  CHECK(stream.records[11].encoded[1] ==
        doctest::Approx(std::tanh((42.0 - 5.5) / 2.5)));
  CHECK(stream.records[12].encoded[1] == doctest::Approx(0.0));
  std::remove(path.c_str());
}

TEST_CASE("quantile_gaussian parameters stream through the reservoir") {
  LogSchema schema;
  schema.identifying_fields = {{"src", {"a"}}};
  EntryCategoryDef category;
  category.name = "c";
  ParameterSpec wait;
  wait.name = "wait";
  wait.level = Level::ratio;
  wait.encoding = Encoding::quantile_gaussian;
  category.params = {wait};
  schema.entry_types = {{"m", {category}}};

  const std::string path = temp_path("mlog_quantile.log");
  {
    Writer writer(schema, path, "", deterministic_options("w0", 7));
    for (int v = 1; v <= 21; ++v) {
      writer.log_event("m", "c", {"a"}, {RawValue(double(v))});
    }
  }
  const RecordStream stream = read_ai_log(path, schema);
  CHECK(stream.records[0].encoded[1] == 0.0);  // cold start
  // value 21 against reservoir {1..21}: above the median, clamp keeps finite
  CHECK(stream.records[20].encoded[1] > 0.0);
  CHECK(std::isfinite(stream.records[20].encoded[1]));
  std::remove(path.c_str());
}

TEST_CASE("concurrent writers interleave without torn lines") {
  const LogSchema schema = test_schemas::hdfs_job_schema();
  const std::string path = temp_path("mlog_concurrent.log");
  constexpr int kWriters = 4;
  constexpr int kEvents = 200;

  std::vector<std::thread> threads;
  for (int w = 0; w < kWriters; ++w) {
    threads.emplace_back([&, w] {
      WriterOptions options;
      options.writer_id = "w" + std::to_string(w);
      options.link_seed = 100 + w;
      Writer writer(schema, path, "", options);
      for (int e = 0; e < kEvents; ++e) {
        writer.log_event("info", "job_submit", {"INFO", "main", "srv1"},
                         {RawValue(double(e)), RawValue(double(e % 20))});
      }
    });
  }
  for (auto& thread : threads) thread.join();

  const RecordStream stream = read_ai_log(path, schema);
  CHECK(stream.records.size() == kWriters * kEvents);
  std::map<std::string, std::vector<std::uint64_t>> seqs;
  for (const auto& record : stream.records) {
    seqs[record.writer_id].push_back(record.seq);
  }
  REQUIRE(seqs.size() == kWriters);
  for (auto& [writer_id, values] : seqs) {
    std::sort(values.begin(), values.end());
    REQUIRE(values.size() == kEvents);
    for (std::size_t i = 0; i < values.size(); ++i) {
      CHECK(values[i] == i);
    }
  }
  std::remove(path.c_str());
}
