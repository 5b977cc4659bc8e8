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

#include "mlog/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>

#include "mlog/emitter.hpp"
#include "mlog/evolution.hpp"
#include "mlog/legacy.hpp"
#include "mlog/norm_state.hpp"
#include "mlog/reader.hpp"
#include "mlog/schema.hpp"
#include "mlog/util.hpp"

namespace mlog::cli {

namespace {

std::string error_prefix(std::ostream& err) {
  const char* color = std::getenv("MLOG_COLOR");
  const bool want_color = (&err == &std::cerr) && ::isatty(2) &&
                          (color == nullptr || std::string_view(color) != "0");
  return want_color ? "\x1b[31merror:\x1b[0m " : "error: ";
}

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::IO_FAILURE ? 3 : 1;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return (z ^ (z >> 31)) | 1;
}

double unit_uniform(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::uint64_t next_u64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct CategoryRef {
  const EntryTypeDef* type;
  const EntryCategoryDef* category;
};

std::vector<CategoryRef> all_categories(const LogSchema& schema) {
  std::vector<CategoryRef> pairs;
  for (const auto& type : schema.entry_types) {
    for (const auto& category : type.categories) {
      pairs.push_back({&type, &category});
    }
  }
  return pairs;
}

// One deterministic synthetic event per call; everything derives from the
// caller's rng state so runs with the same seed are byte-identical.
void demo_emit(Writer& writer, const std::vector<CategoryRef>& pairs,
               std::uint64_t& rng, std::size_t event_index) {
  const LogSchema& schema = writer.schema();
  const CategoryRef pair = pairs[next_u64(rng) % pairs.size()];
  std::vector<std::string> identifying;
  identifying.reserve(schema.identifying_fields.size());
  for (const auto& field : schema.identifying_fields) {
    identifying.push_back(
        field.vocabulary[next_u64(rng) % field.vocabulary.size()]);
  }
  std::vector<RawValue> params;
  params.reserve(pair.category->params.size());
  for (const auto& spec : pair.category->params) {
    if (spec.categorical()) {
      params.emplace_back(
          spec.vocabulary[next_u64(rng) % spec.vocabulary.size()]);
      continue;
    }
    double value = 0.0;
    switch (spec.encoding) {
      case Encoding::minmax:
        value = spec.bounds->min +
                unit_uniform(rng) * (spec.bounds->max - spec.bounds->min);
        break;
      case Encoding::sigmoid:
      case Encoding::tanh:
        value = spec.center_scale->center +
                spec.center_scale->scale * (unit_uniform(rng) * 6.0 - 3.0);
        break;
      case Encoding::quantile_gaussian:
        value = unit_uniform(rng) * 1.0e6;
        break;
      default:
        break;
    }
    // Two decimals keep raw serialization short and round-trip exact.
    value = std::floor(value * 100.0) / 100.0;
    params.emplace_back(value);
  }
  writer.log_event(pair.type->name, pair.category->name, identifying, params,
                   "demo " + pair.type->name + "." + pair.category->name +
                       " #" + std::to_string(event_index));
}

void canonicalize_ai_log(const std::string& path, const LogSchema& schema) {
  const RecordStream stream = read_ai_log(path, schema);
  std::ostringstream out;
  out << ai_header(stream.fingerprint) << '\n';
  for (const auto& record : stream.records) {
    out << serialize_record(record) << '\n';
  }
  write_file_atomic(path, out.str());
}

void canonicalize_human_log(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<std::string> lines;
  for (const auto line : split(content, '\n')) {
    if (!line.empty()) lines.emplace_back(line);
  }
  std::sort(lines.begin(), lines.end());  // ISO timestamps sort temporally
  std::ostringstream out;
  for (const auto& line : lines) out << line << '\n';
  write_file_atomic(path, out.str());
}

int run_demo(const LogSchema& schema, const std::string& out_dir,
             std::uint64_t seed, unsigned writers, unsigned events,
             bool quiet, std::ostream& out) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string ai_path = out_dir + "/ai.log";
  const std::string human_path = out_dir + "/human.log";
  fs::remove(ai_path);
  fs::remove(human_path);

  const auto pairs = all_categories(schema);
  constexpr std::int64_t kBaseTimestamp = 1700000000000000;

  std::vector<std::thread> threads;
  std::vector<std::string> failures(writers);
  for (unsigned w = 0; w < writers; ++w) {
    threads.emplace_back([&, w] {
      try {
        WriterOptions options;
        options.writer_id = "w" + std::to_string(w);
        options.link_seed = mix_seed(seed, 0xA0 + w);
        options.reservoir_seed = mix_seed(seed, 0xB0 + w);
        // Unique deterministic timestamps: event cadence per writer with a
        // writer offset, so the merged order is seed-stable.
        options.clock = [w, next = std::make_shared<std::int64_t>(0)]() {
          const std::int64_t tick = (*next)++;
          return kBaseTimestamp + tick * 1000 + w;
        };
        Writer writer(schema, ai_path, human_path, options);
        std::uint64_t rng = mix_seed(seed, 0xE0 + w);
        for (unsigned e = 0; e < events; ++e) {
          demo_emit(writer, pairs, rng, e);
        }
      } catch (const std::exception& e) {
        failures[w] = e.what();
      }
    });
  }
  for (auto& thread : threads) thread.join();
  for (const auto& failure : failures) {
    if (!failure.empty()) throw Error(ErrorCode::IO_FAILURE, failure);
  }

  canonicalize_ai_log(ai_path, schema);
  canonicalize_human_log(human_path);

  const RecordStream stream = read_ai_log(ai_path, schema);
  std::map<std::string, std::uint64_t> per_writer;
  for (const auto& record : stream.records) {
    ++per_writer[record.writer_id];
  }
  if (!quiet) {
    out << "ai log:    " << ai_path << " (" << stream.records.size()
        << " records)\n";
    out << "human log: " << human_path << "\n";
    for (const auto& [writer_id, count] : per_writer) {
      out << "  " << writer_id << ": " << count << " records\n";
    }
  }
  return 0;
}

void print_inspect(const RecordStream& stream, const LogSchema& schema,
                   std::ostream& out) {
  for (const auto& record : stream.records) {
    if (record.is_meta()) {
      out << iso8601_utc_us(record.timestamp_us) << " " << record.writer_id
          << "#" << record.seq << " meta encoding-change "
          << raw_token(record.raw[0]) << " -> " << raw_token(record.raw[1])
          << " center=" << format_raw_number(raw_number(record.raw[2]))
          << " scale=" << format_raw_number(raw_number(record.raw[3]))
          << "\n";
      continue;
    }
    const auto& type = schema.entry_types[record.type_index];
    const auto& category = type.categories[record.category_index];
    out << iso8601_utc_us(record.timestamp_us) << " " << record.writer_id
        << "#" << record.seq << " " << type.name << "." << category.name
        << " link=" << record.link_id;
    if (!record.label.empty()) out << " label=" << record.label;
    out << "\n";
    const Layout layout = vector_layout(schema, type.name, category.name);
    std::size_t raw_index = 0;
    for (const auto& segment : layout.segments) {
      const std::span<const double> block(
          record.encoded.data() + segment.offset, segment.width);
      out << "  " << segment.name << " = ";
      if (segment.kind == SegmentKind::identifying) {
        const auto& field = schema.identifying_fields[raw_index];
        out << one_hot_decode(block, field.vocabulary);
      } else {
        const RawValue& raw = record.raw[raw_index];
        if (raw_is_number(raw)) {
          out << format_raw_number(raw_number(raw));
        } else {
          out << raw_token(raw);
        }
      }
      out << " [";
      for (std::size_t i = 0; i < block.size(); ++i) {
        if (i > 0) out << ", ";
        out << format_encoded(block[i]);
      }
      out << "]\n";
      ++raw_index;
    }
  }
}

struct ExportArgs {
  std::string schema_path;
  std::vector<std::string> inputs;
  std::string select = "union";
  std::string labels_path;
  std::string window_spec;
  std::string out_path;
  bool provenance = false;
};

int run_export(const ExportArgs& args, bool quiet, std::ostream& out) {
  const LogSchema schema = load_schema(args.schema_path);
  std::vector<RecordStream> streams;
  std::unordered_map<std::string, std::size_t> source_of_link;
  for (std::size_t i = 0; i < args.inputs.size(); ++i) {
    RecordStream stream = read_ai_log(args.inputs[i], schema);
    for (const auto& record : stream.records) {
      source_of_link.emplace(record.link_id, i);
    }
    streams.push_back(std::move(stream));
  }
  RecordStream merged = merge_streams(streams);

  attach_intrinsic_labels(merged, schema);
  if (!args.labels_path.empty()) {
    const LabelTable table = parse_label_table(read_file(args.labels_path));
    const LabelReport report = attach_table_labels(merged, schema, table);
    if (!report.unknown_link_ids.empty() && !quiet) {
      out << "# " << report.unknown_link_ids.size()
          << " label(s) referenced unknown link ids\n";
    }
  }
  const Selector selector = Selector::parse(args.select);

  bool any_label = false;
  for (const auto& record : merged.records) {
    if (record.is_meta() || record.label.empty()) continue;
    if (selector.union_mode) {
      any_label = true;
      break;
    }
    const auto& type = schema.entry_types[record.type_index];
    if (type.name == selector.type &&
        type.categories[record.category_index].name == selector.category) {
      any_label = true;
      break;
    }
  }

  std::vector<RecordStream> slices;
  if (!args.window_spec.empty()) {
    slices = window(merged, WindowSpec::parse(args.window_spec));
  } else {
    slices.push_back(merged);
  }

  std::ostringstream csv;
  bool header_done = false;
  std::size_t total_rows = 0;
  for (std::size_t wi = 0; wi < slices.size(); ++wi) {
    DatasetMatrix matrix;
    try {
      matrix = to_matrix(slices[wi], schema, selector, any_label);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EMPTY_SELECTION &&
          !args.window_spec.empty()) {
        continue;  // empty windows contribute no rows
      }
      throw;
    }
    if (!header_done) {
      if (!args.window_spec.empty()) csv << "window,";
      if (args.provenance) csv << "source,";
      for (std::size_t c = 0; c < matrix.column_names.size(); ++c) {
        if (c > 0) csv << ',';
        csv << matrix.column_names[c];
      }
      if (matrix.labels) csv << ",label";
      csv << '\n';
      header_done = true;
    }
    for (std::size_t r = 0; r < matrix.rows; ++r) {
      if (!args.window_spec.empty()) csv << wi << ',';
      if (args.provenance) {
        csv << source_of_link[matrix.row_links[r]] << ',';
      }
      for (std::size_t c = 0; c < matrix.cols(); ++c) {
        if (c > 0) csv << ',';
        csv << format_encoded(matrix.at(r, c));
      }
      if (matrix.labels) csv << ',' << (*matrix.labels)[r];
      csv << '\n';
      ++total_rows;
    }
  }
  if (!header_done) {
    throw Error(ErrorCode::EMPTY_SELECTION, "no records matched the export");
  }
  write_file(args.out_path, csv.str());
  if (!quiet) {
    out << args.out_path << ": " << total_rows << " rows\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"ML-ready structured logging toolchain"};
  app.name("mlog");
  app.fallthrough();
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress informational output");

  // schema validate / fingerprint
  auto* schema_cmd = app.add_subcommand("schema", "schema governance");
  schema_cmd->require_subcommand(1);
  std::string schema_file;
  auto* validate_cmd =
      schema_cmd->add_subcommand("validate", "check schema invariants");
  validate_cmd->add_option("file", schema_file, "schema JSON file")
      ->required();
  auto* fingerprint_cmd = schema_cmd->add_subcommand(
      "fingerprint", "print the canonical 16-hex-digit digest");
  fingerprint_cmd->add_option("file", schema_file, "schema JSON file")
      ->required();

  // diff
  auto* diff_cmd =
      app.add_subcommand("diff", "classify changes between two schemas");
  std::string diff_old, diff_new;
  diff_cmd->add_option("old", diff_old, "old schema")->required();
  diff_cmd->add_option("new", diff_new, "new schema")->required();

  // migrate
  auto* migrate_cmd =
      app.add_subcommand("migrate", "rewrite a log into a new schema layout");
  std::string mig_from, mig_to, mig_in, mig_out;
  std::vector<std::string> mig_rules;
  migrate_cmd->add_option("--from", mig_from, "old schema")->required();
  migrate_cmd->add_option("--to", mig_to, "new schema")->required();
  migrate_cmd->add_option("--in", mig_in, "input AI log")->required();
  migrate_cmd->add_option("--out", mig_out, "output AI log")->required();
  migrate_cmd->add_option("--rule", mig_rules,
                          "segment override, e.g. info.job.size=drop");

  // convert
  auto* convert_cmd =
      app.add_subcommand("convert", "convert a legacy log via templates");
  std::string conv_schema, conv_templates, conv_in, conv_ai, conv_human,
      conv_skips;
  convert_cmd->add_option("--schema", conv_schema, "schema JSON")->required();
  convert_cmd->add_option("--templates", conv_templates, "template file")
      ->required();
  convert_cmd->add_option("--in", conv_in, "legacy log")->required();
  convert_cmd->add_option("--ai-out", conv_ai, "AI log output")->required();
  convert_cmd->add_option("--human-out", conv_human, "human log output")
      ->required();
  convert_cmd->add_option("--skips", conv_skips, "skip report output")
      ->required();

  // renormalize
  auto* renorm_cmd = app.add_subcommand(
      "renormalize", "re-encode one parameter under new bounds");
  std::string renorm_log, renorm_schema, renorm_param;
  double renorm_min = 0.0, renorm_max = 0.0;
  renorm_cmd->add_option("ai-log", renorm_log, "AI log file")->required();
  renorm_cmd->add_option("--schema", renorm_schema, "schema JSON")->required();
  renorm_cmd->add_option("--param", renorm_param, "type.category.name")
      ->required();
  renorm_cmd->add_option("--min", renorm_min, "new minimum")->required();
  renorm_cmd->add_option("--max", renorm_max, "new maximum")->required();

  // export
  auto* export_cmd =
      app.add_subcommand("export", "materialize a training matrix CSV");
  ExportArgs export_args;
  export_cmd->add_option("--schema", export_args.schema_path, "schema JSON")
      ->required();
  export_cmd->add_option("--in", export_args.inputs, "AI log(s)")->required();
  export_cmd->add_option("--select", export_args.select,
                         "type.category or union");
  export_cmd->add_option("--labels", export_args.labels_path,
                         "label table CSV (link_id,label)");
  export_cmd->add_option("--window", export_args.window_spec,
                         "count:SIZE:STRIDE or duration:SIZE:STRIDE");
  export_cmd->add_flag("--provenance", export_args.provenance,
                       "add a source column (input file index)");
  export_cmd->add_option("--out", export_args.out_path, "output CSV")
      ->required();

  // inspect
  auto* inspect_cmd =
      app.add_subcommand("inspect", "pretty-print AI records");
  std::string inspect_log, inspect_schema;
  inspect_cmd->add_option("ai-log", inspect_log, "AI log file")->required();
  inspect_cmd->add_option("--schema", inspect_schema, "schema JSON")
      ->required();

  // demo
  auto* demo_cmd = app.add_subcommand(
      "demo", "seeded multi-writer simulation with deterministic output");
  std::string demo_schema, demo_out_dir = "mlog-demo";
  std::uint64_t demo_seed = 1;
  unsigned demo_writers = 2, demo_events = 50;
  demo_cmd->add_option("--schema", demo_schema,
                       "schema JSON (default: bundled example)");
  demo_cmd->add_option("--seed", demo_seed, "simulation seed");
  demo_cmd->add_option("--writers", demo_writers, "concurrent writers")
      ->check(CLI::Range(1u, 64u));
  demo_cmd->add_option("--events", demo_events, "events per writer")
      ->check(CLI::Range(1u, 1000000u));
  demo_cmd->add_option("--out-dir", demo_out_dir, "output directory");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_prefix(err) << e.what() << "\n";
    return 2;
  }

  try {
    if (schema_cmd->parsed()) {
      const LogSchema schema = load_schema(schema_file);
      const ValidationReport report = validate_schema(schema);
      if (validate_cmd->parsed()) {
        if (!report.valid()) {
          err << report.to_text();
          return 1;
        }
        out << "OK\n";
        return 0;
      }
      // fingerprint
      if (!report.valid()) {
        err << error_prefix(err) << "schema is invalid\n" << report.to_text();
        return 1;
      }
      out << schema_fingerprint(schema) << "\n";
      return 0;
    }

    if (diff_cmd->parsed()) {
      const SchemaDiff diff =
          diff_schemas(load_schema(diff_old), load_schema(diff_new));
      out << diff.to_text();
      return 0;
    }

    if (migrate_cmd->parsed()) {
      MigrationOverrides overrides;
      for (const auto& rule : mig_rules) {
        const std::size_t eq = rule.find('=');
        if (eq == std::string::npos) {
          err << error_prefix(err) << "--rule must be <segment>=<rule>\n";
          return 2;
        }
        overrides[rule.substr(0, eq)] = rule.substr(eq + 1);
      }
      const MigrationMap map = build_migration(
          load_schema(mig_from), load_schema(mig_to), overrides);
      const MigrateSummary summary = migrate_log(mig_in, mig_out, map);
      if (!quiet) {
        out << map.to_text();
        out << "records in " << summary.records_in << ", out "
            << summary.records_out << ", dropped " << summary.records_dropped
            << "\n";
      }
      return 0;
    }

    if (convert_cmd->parsed()) {
      const LogSchema schema = load_schema(conv_schema);
      const auto templates = parse_templates(read_file(conv_templates));
      WriterOptions options;
      options.writer_id = "ingest";
      Writer writer(schema, conv_ai, conv_human, options);
      const ConvertSummary summary =
          convert_file(conv_in, templates, writer, conv_skips);
      if (!quiet) out << summary.to_text();
      return 0;
    }

    if (renorm_cmd->parsed()) {
      const LogSchema schema = load_schema(renorm_schema);
      const ParamId param = ParamId::parse(renorm_param);
      const RenormalizeSummary summary = renormalize_log(
          renorm_log, schema, param, Bounds{renorm_min, renorm_max});
      if (!quiet) {
        out << renorm_log << ": " << summary.records_rewritten << " of "
            << summary.records_total << " records re-encoded for "
            << param.to_text() << "\n";
      }
      return 0;
    }

    if (export_cmd->parsed()) {
      return run_export(export_args, quiet, out);
    }

    if (inspect_cmd->parsed()) {
      const LogSchema schema = load_schema(inspect_schema);
      print_inspect(read_ai_log(inspect_log, schema), schema, out);
      return 0;
    }

    if (demo_cmd->parsed()) {
      const LogSchema schema = demo_schema.empty()
                                   ? bundled_example_schema()
                                   : load_schema(demo_schema);
      return run_demo(schema, demo_out_dir, demo_seed, demo_writers,
                      demo_events, quiet, out);
    }
  } catch (const Error& e) {
    err << error_prefix(err) << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << error_prefix(err) << e.what() << "\n";
    return 1;
  }
  err << error_prefix(err) << "no subcommand\n";
  return 2;
}

}  // namespace mlog::cli
