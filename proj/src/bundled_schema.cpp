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

namespace mlog {

namespace {

// Mirrors an HDFS-style deployment; also shipped as schemas/example.json.
constexpr std::string_view kBundledSchema = R"json({
  "version": 1,
  "labels": ["ok", "failed", "no_connection"],
  "identifying_fields": [
    { "name": "level", "vocabulary": ["DEBUG", "INFO", "WARN", "ERROR"] },
    { "name": "process", "vocabulary": ["main", "worker"] },
    { "name": "server", "vocabulary": ["srv1", "srv2", "srv3"] }
  ],
  "entry_types": [
    {
      "name": "info",
      "categories": [
        {
          "name": "job_submit",
          "params": [
            { "name": "job_size", "level": "ratio", "encoding": "minmax",
              "bounds": { "min": 0.0, "max": 1500000000.0 } },
            { "name": "splits", "level": "ratio", "encoding": "minmax",
              "bounds": { "min": 0.0, "max": 20.0 } }
          ]
        },
        {
          "name": "block_served",
          "params": [
            { "name": "bytes", "level": "ratio", "encoding": "minmax",
              "bounds": { "min": 0.0, "max": 67108864.0 } },
            { "name": "cache", "level": "nominal", "encoding": "one_hot",
              "vocabulary": ["hit", "miss"] },
            { "name": "readahead", "level": "ordinal",
              "encoding": "orthogonal_polynomial",
              "vocabulary": ["off", "low", "high"] }
          ]
        }
      ]
    },
    {
      "name": "debug",
      "categories": [
        {
          "name": "timing",
          "params": [
            { "name": "io_wait_us", "level": "ratio",
              "encoding": "quantile_gaussian" },
            { "name": "congestion", "level": "ordinal", "encoding": "helmert",
              "vocabulary": ["none", "mild", "severe"] }
          ]
        }
      ]
    },
    {
      "name": "warning",
      "categories": [
        {
          "name": "storage",
          "params": [
            { "name": "disk_used_fraction", "level": "ratio",
              "encoding": "minmax", "bounds": { "min": 0.0, "max": 1.0 } },
            { "name": "severity", "level": "ordinal",
              "encoding": "backward_difference",
              "vocabulary": ["low", "medium", "high"] }
          ]
        },
        {
          "name": "connectivity",
          "params": [
            { "name": "retry_count", "level": "ratio", "encoding": "minmax",
              "bounds": { "min": 0.0, "max": 16.0 } },
            { "name": "link_state", "level": "ordinal_dichotomous",
              "encoding": "bit", "vocabulary": ["up", "degraded"] }
          ]
        }
      ]
    },
    {
      "name": "error",
      "categories": [
        {
          "name": "no_connection",
          "params": [
            { "name": "latency_ms", "level": "ratio", "encoding": "sigmoid",
              "center_scale": { "center": 200.0, "scale": 50.0 } }
          ],
          "intrinsic_label": "no_connection"
        },
        {
          "name": "job_failed",
          "params": [
            { "name": "exit_code", "level": "ratio", "encoding": "minmax",
              "bounds": { "min": 0.0, "max": 255.0 } }
          ],
          "intrinsic_label": "failed"
        }
      ]
    }
  ]
})json";

}  // namespace

std::string_view bundled_example_schema_json() { return kBundledSchema; }

LogSchema bundled_example_schema() {
  static const LogSchema schema = parse_schema(kBundledSchema);
  return schema;
}

}  // namespace mlog
