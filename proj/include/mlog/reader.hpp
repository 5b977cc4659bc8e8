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
// Read side: parse AI logs, merge multi-writer streams into a total order,
// apply labeling strategies, and materialize training matrices and windows
// with zero further preprocessing.

#ifndef MLOG_READER_HPP
#define MLOG_READER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlog/record.hpp"
#include "mlog/schema.hpp"

namespace mlog {

// Records ordered by (timestamp, writer_id, seq); all share one fingerprint.
struct RecordStream {
  std::string fingerprint;
  std::vector<AiLogRecord> records;
};

// Stable comparison used everywhere a total order over records is needed.
bool record_order_less(const AiLogRecord& a, const AiLogRecord& b);

RecordStream read_ai_log(const std::string& path, const LogSchema& schema);

// Deterministic total order over equal-fingerprint streams.
RecordStream merge_streams(const std::vector<RecordStream>& streams);

struct LabelReport {
  std::size_t applied = 0;
  std::vector<std::string> unknown_link_ids;  // reported, never fatal
};

using LabelTable = std::vector<std::pair<std::string, std::string>>;

// Intrinsic: the schema's per-category intrinsic_label.
LabelReport attach_intrinsic_labels(RecordStream& stream,
                                    const LogSchema& schema);
// Delayed outcomes and manual tables share mechanics: link_id -> label.
LabelReport attach_table_labels(RecordStream& stream, const LogSchema& schema,
                                const LabelTable& table);

LabelTable parse_label_table(std::string_view csv_text);  // `link_id,label`

struct Selector {
  bool union_mode = false;
  std::string type;
  std::string category;

  static Selector parse(std::string_view text);  // "type.category" | "union"
};

struct DatasetMatrix {
  std::vector<std::string> column_names;
  std::size_t rows = 0;
  std::vector<double> values;  // row-major, rows x column_names.size()
  std::optional<std::vector<std::int64_t>> labels;  // index, -1 = unlabeled
  std::vector<std::string> row_links;

  std::size_t cols() const { return column_names.size(); }
  double at(std::size_t row, std::size_t col) const {
    return values[row * cols() + col];
  }
};

// Per-category: rows are the encoded vectors of matching records in stream
// order. Union: leading (type,category) one-hot, then disjoint per-category
// blocks, non-applicable blocks zero-filled. Labels column captures indices
// into the schema's label vocabulary when requested.
DatasetMatrix to_matrix(const RecordStream& stream, const LogSchema& schema,
                        const Selector& selector, bool with_labels);

std::string matrix_to_csv(const DatasetMatrix& matrix);

struct WindowSpec {
  enum class Mode { count, duration };
  Mode mode = Mode::count;
  std::int64_t size = 1;    // records, or microseconds
  std::int64_t stride = 1;  // overlap allowed

  static WindowSpec parse(std::string_view text);  // "count:SIZE:STRIDE"
};

// Count mode: exact-size slices stepping by stride, trailing partial slice
// dropped. Duration mode: half-open intervals [t0+i*stride, t0+i*stride+size).
std::vector<RecordStream> window(const RecordStream& stream,
                                 const WindowSpec& spec);

}  // namespace mlog

#endif  // MLOG_READER_HPP
