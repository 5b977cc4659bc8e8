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

#include "mlog/reader.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "mlog/util.hpp"

namespace mlog {

bool record_order_less(const AiLogRecord& a, const AiLogRecord& b) {
  if (a.timestamp_us != b.timestamp_us) return a.timestamp_us < b.timestamp_us;
  if (a.writer_id != b.writer_id) return a.writer_id < b.writer_id;
  return a.seq < b.seq;
}

RecordStream read_ai_log(const std::string& path, const LogSchema& schema) {
  const std::string expected_fp = schema_fingerprint(schema);
  const std::string content = read_file(path);

  RecordStream stream;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (const auto line : split(content, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      const auto fp = parse_ai_header(line);
      if (!fp) {
        throw Error(ErrorCode::MALFORMED_LINE,
                    path + ":1: missing mlog header");
      }
      if (*fp != expected_fp) {
        throw Error(ErrorCode::SCHEMA_MISMATCH,
                    path + " carries fingerprint " + *fp +
                        ", schema fingerprints to " + expected_fp);
      }
      stream.fingerprint = *fp;
      header_seen = true;
      continue;
    }
    if (line.front() == '#') continue;
    try {
      AiLogRecord record = parse_record(line, schema);
      if (record.schema_fp != expected_fp) {
        throw Error(ErrorCode::SCHEMA_MISMATCH,
                    "record fingerprint " + record.schema_fp);
      }
      stream.records.push_back(std::move(record));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MALFORMED_LINE ||
          e.code() == ErrorCode::PARSE_FAILURE) {
        throw Error(ErrorCode::MALFORMED_LINE,
                    path + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (e.code() == ErrorCode::WIDTH_MISMATCH) {
        throw Error(ErrorCode::WIDTH_MISMATCH,
                    path + ":" + std::to_string(line_no) + ": " + e.what());
      }
      throw;
    }
  }
  if (!header_seen) {
    throw Error(ErrorCode::MALFORMED_LINE, path + ": empty file, no header");
  }
  std::stable_sort(stream.records.begin(), stream.records.end(),
                   record_order_less);
  return stream;
}

RecordStream merge_streams(const std::vector<RecordStream>& streams) {
  RecordStream merged;
  for (const auto& stream : streams) {
    if (merged.fingerprint.empty()) {
      merged.fingerprint = stream.fingerprint;
    } else if (!stream.fingerprint.empty() &&
               stream.fingerprint != merged.fingerprint) {
      throw Error(ErrorCode::FINGERPRINT_MIX,
                  stream.fingerprint + " vs " + merged.fingerprint);
    }
    merged.records.insert(merged.records.end(), stream.records.begin(),
                          stream.records.end());
  }
  std::stable_sort(merged.records.begin(), merged.records.end(),
                   record_order_less);
  return merged;
}

namespace {

void check_label_in_vocab(const LogSchema& schema, const std::string& label) {
  if (!schema.label_index(label)) {
    throw Error(ErrorCode::LABEL_NOT_IN_VOCAB, "'" + label + "'");
  }
}

}  // namespace

LabelReport attach_intrinsic_labels(RecordStream& stream,
                                    const LogSchema& schema) {
  LabelReport report;
  for (auto& record : stream.records) {
    if (record.is_meta()) continue;
    const auto& category = schema.entry_types[record.type_index]
                               .categories[record.category_index];
    if (category.intrinsic_label) {
      record.label = *category.intrinsic_label;
      ++report.applied;
    }
  }
  return report;
}

LabelReport attach_table_labels(RecordStream& stream, const LogSchema& schema,
                                const LabelTable& table) {
  std::unordered_map<std::string_view, std::string_view> by_link;
  for (const auto& [link, label] : table) {
    check_label_in_vocab(schema, label);
    by_link[link] = label;
  }
  std::set<std::string_view> seen;
  LabelReport report;
  for (auto& record : stream.records) {
    auto it = by_link.find(record.link_id);
    if (it == by_link.end()) continue;
    record.label = std::string(it->second);
    seen.insert(it->first);
    ++report.applied;
  }
  for (const auto& [link, label] : table) {
    if (seen.find(link) == seen.end()) {
      report.unknown_link_ids.push_back(link);
    }
  }
  return report;
}

LabelTable parse_label_table(std::string_view csv_text) {
  LabelTable table;
  std::size_t line_no = 0;
  for (const auto line : split(csv_text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) {
      throw Error(ErrorCode::PARSE_FAILURE,
                  "label table line " + std::to_string(line_no) +
                      ": expected link_id,label");
    }
    if (line_no == 1 && cells[0] == "link_id") continue;  // optional header
    table.emplace_back(std::string(cells[0]), std::string(cells[1]));
  }
  return table;
}

Selector Selector::parse(std::string_view text) {
  if (text == "union") return Selector{true, "", ""};
  const auto parts = split(text, '.');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
    throw Error(ErrorCode::PARSE_FAILURE,
                "selector must be 'union' or 'type.category', got '" +
                    std::string(text) + "'");
  }
  return Selector{false, std::string(parts[0]), std::string(parts[1])};
}

namespace {

// Expanded column names of one category layout: one column per position.
std::vector<std::string> layout_columns(const LogSchema& schema,
                                        const EntryCategoryDef& category) {
  std::vector<std::string> names;
  for (const auto& field : schema.identifying_fields) {
    for (const auto& token : field.vocabulary) {
      names.push_back(field.name + "=" + token);
    }
  }
  for (const auto& param : category.params) {
    switch (param.encoding) {
      case Encoding::one_hot:
        for (const auto& token : param.vocabulary) {
          names.push_back(param.name + "=" + token);
        }
        break;
      case Encoding::helmert:
      case Encoding::backward_difference:
      case Encoding::orthogonal_polynomial:
        for (std::size_t j = 1; j < param.vocabulary.size(); ++j) {
          names.push_back(param.name + ".c" + std::to_string(j));
        }
        break;
      default:
        names.push_back(param.name);
        break;
    }
  }
  return names;
}

std::int64_t label_index_of(const LogSchema& schema,
                            const std::string& label) {
  if (label.empty()) return -1;
  const auto index = schema.label_index(label);
  if (!index) {
    throw Error(ErrorCode::LABEL_NOT_IN_VOCAB, "'" + label + "'");
  }
  return static_cast<std::int64_t>(*index);
}

}  // namespace

DatasetMatrix to_matrix(const RecordStream& stream, const LogSchema& schema,
                        const Selector& selector, bool with_labels) {
  DatasetMatrix matrix;

  if (!selector.union_mode) {
    const auto type_index = schema.type_index(selector.type);
    const auto category_index =
        schema.category_index(selector.type, selector.category);
    if (!type_index || !category_index) {
      throw Error(ErrorCode::UNKNOWN_TYPE_OR_CATEGORY,
                  selector.type + "." + selector.category);
    }
    matrix.column_names = layout_columns(
        schema,
        schema.entry_types[*type_index].categories[*category_index]);
    if (with_labels) matrix.labels.emplace();
    for (const auto& record : stream.records) {
      if (record.is_meta() || record.type_index != *type_index ||
          record.category_index != *category_index) {
        continue;
      }
      matrix.values.insert(matrix.values.end(), record.encoded.begin(),
                           record.encoded.end());
      matrix.row_links.push_back(record.link_id);
      if (with_labels) {
        matrix.labels->push_back(label_index_of(schema, record.label));
      }
      ++matrix.rows;
    }
    if (matrix.rows == 0) {
      throw Error(ErrorCode::EMPTY_SELECTION,
                  selector.type + "." + selector.category +
                      " selects no records");
    }
    return matrix;
  }

  // Union layout: leading category one-hot, then per-category blocks in
  // schema order; absent blocks stay zero.
  struct Block {
    std::size_t column_offset;
    std::size_t width;
  };
  std::vector<std::vector<Block>> blocks(schema.entry_types.size());
  std::size_t category_count = 0;
  for (const auto& type : schema.entry_types) {
    category_count += type.categories.size();
  }
  for (const auto& type : schema.entry_types) {
    for (const auto& category : type.categories) {
      matrix.column_names.push_back("category=" + type.name + "." +
                                    category.name);
    }
  }
  std::size_t offset = category_count;
  for (std::size_t t = 0; t < schema.entry_types.size(); ++t) {
    const auto& type = schema.entry_types[t];
    blocks[t].resize(type.categories.size());
    for (std::size_t c = 0; c < type.categories.size(); ++c) {
      const auto columns = layout_columns(schema, type.categories[c]);
      blocks[t][c] = Block{offset, columns.size()};
      for (const auto& name : columns) {
        matrix.column_names.push_back(type.name + "." +
                                      type.categories[c].name + ":" + name);
      }
      offset += columns.size();
    }
  }
  const std::size_t total = offset;
  if (with_labels) matrix.labels.emplace();

  for (const auto& record : stream.records) {
    if (record.is_meta()) continue;
    std::size_t pair_index = 0;
    for (std::size_t t = 0; t < record.type_index; ++t) {
      pair_index += schema.entry_types[t].categories.size();
    }
    pair_index += record.category_index;
    std::vector<double> row(total, 0.0);
    row[pair_index] = 1.0;
    const Block& block = blocks[record.type_index][record.category_index];
    std::copy(record.encoded.begin(), record.encoded.end(),
              row.begin() + static_cast<std::ptrdiff_t>(block.column_offset));
    matrix.values.insert(matrix.values.end(), row.begin(), row.end());
    matrix.row_links.push_back(record.link_id);
    if (with_labels) {
      matrix.labels->push_back(label_index_of(schema, record.label));
    }
    ++matrix.rows;
  }
  if (matrix.rows == 0) {
    throw Error(ErrorCode::EMPTY_SELECTION, "stream has no records");
  }
  return matrix;
}

namespace {

std::string csv_cell(const std::string& name) {
  if (name.find_first_of(",\"\n") == std::string::npos) return name;
  std::string quoted = "\"";
  for (char c : name) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string matrix_to_csv(const DatasetMatrix& matrix) {
  std::ostringstream out;
  for (std::size_t c = 0; c < matrix.column_names.size(); ++c) {
    if (c > 0) out << ',';
    out << csv_cell(matrix.column_names[c]);
  }
  if (matrix.labels) out << (matrix.column_names.empty() ? "" : ",") << "label";
  out << '\n';
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_encoded(matrix.at(r, c));
    }
    if (matrix.labels) out << ',' << (*matrix.labels)[r];
    out << '\n';
  }
  return out.str();
}

WindowSpec WindowSpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) {
    throw Error(ErrorCode::PARSE_FAILURE,
                "window spec must be mode:SIZE:STRIDE, got '" +
                    std::string(text) + "'");
  }
  WindowSpec spec;
  if (parts[0] == "count") {
    spec.mode = Mode::count;
  } else if (parts[0] == "duration") {
    spec.mode = Mode::duration;
  } else {
    throw Error(ErrorCode::PARSE_FAILURE,
                "window mode must be count or duration");
  }
  spec.size = static_cast<std::int64_t>(parse_number(parts[1]));
  spec.stride = static_cast<std::int64_t>(parse_number(parts[2]));
  if (spec.size <= 0 || spec.stride <= 0) {
    throw Error(ErrorCode::PARSE_FAILURE,
                "window size and stride must be positive");
  }
  return spec;
}

std::vector<RecordStream> window(const RecordStream& stream,
                                 const WindowSpec& spec) {
  if (spec.size <= 0 || spec.stride <= 0) {
    throw Error(ErrorCode::PARSE_FAILURE,
                "window size and stride must be positive");
  }
  std::vector<RecordStream> slices;
  const auto& records = stream.records;
  if (spec.mode == WindowSpec::Mode::count) {
    const std::size_t size = static_cast<std::size_t>(spec.size);
    const std::size_t stride = static_cast<std::size_t>(spec.stride);
    for (std::size_t start = 0; start + size <= records.size();
         start += stride) {
      RecordStream slice;
      slice.fingerprint = stream.fingerprint;
      slice.records.assign(records.begin() + static_cast<std::ptrdiff_t>(start),
                           records.begin() +
                               static_cast<std::ptrdiff_t>(start + size));
      slices.push_back(std::move(slice));
    }
    return slices;
  }
  if (records.empty()) return slices;
  const std::int64_t t0 = records.front().timestamp_us;
  const std::int64_t t_last = records.back().timestamp_us;
  // Every record falls in at least one window; the count follows from the
  // stride coverage of [t0, t_last].
  const std::int64_t span = t_last - t0;
  std::int64_t count = span == 0 ? 1 : (span + spec.stride - 1) / spec.stride;
  if (count < 1) count = 1;
  for (std::int64_t i = 0; i < count; ++i) {
    const std::int64_t begin = t0 + i * spec.stride;
    const std::int64_t end = begin + spec.size;
    RecordStream slice;
    slice.fingerprint = stream.fingerprint;
    for (const auto& record : records) {
      if (record.timestamp_us >= begin && record.timestamp_us < end) {
        slice.records.push_back(record);
      }
    }
    slices.push_back(std::move(slice));
  }
  return slices;
}

}  // namespace mlog
