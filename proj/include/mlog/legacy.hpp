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
// Legacy log conversion via explicit templates: exact literal text with
// typed capture slots, no regular expressions. Unmatched lines fail loudly
// into a skip report, never silently.

#ifndef MLOG_LEGACY_HPP
#define MLOG_LEGACY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlog/emitter.hpp"
#include "mlog/schema.hpp"

namespace mlog {

enum class SlotKind { token, number };

struct TemplateSlot {
  std::string name;
  SlotKind kind = SlotKind::token;
};

// A pattern alternates literal runs and slots, e.g.
//   INFO <prog:token> <srv:token>: input size <sz:number> splits <n:number>
// token slots lex [A-Za-z0-9_./-]+, number slots an optional sign, digits
// and an optional fraction (no exponent).
struct PatternPiece {
  bool is_slot = false;
  std::string literal;
  TemplateSlot slot;
};

// Binds one identifying field or parameter of the target category to a
// captured slot or to a constant.
struct SlotBinding {
  std::string target;  // field or parameter name
  bool from_slot = false;
  std::string slot_name;
  std::string constant;
};

struct LogTemplate {
  std::string id;
  std::string pattern_text;
  std::vector<PatternPiece> pieces;
  std::string target_type;
  std::string target_category;
  std::vector<SlotBinding> bindings;
};

// Template file: blocks of `id:`, `pattern:`, `target:` and `bind:` lines
// separated by blank lines; `#` starts a comment line.
std::vector<LogTemplate> parse_templates(std::string_view text);

// Every identifying field and parameter of the target bound exactly once,
// slot references resolvable, kinds consistent. Throws PARSE_FAILURE.
void validate_templates(const std::vector<LogTemplate>& templates,
                        const LogSchema& schema);

struct MatchResult {
  const LogTemplate* tmpl = nullptr;
  std::map<std::string, std::string> captures;
};

// First template in list order whose literals match exactly and whose slots
// lex as declared wins; no match is a value, not an error.
std::optional<MatchResult> match_template(
    std::string_view line, const std::vector<LogTemplate>& templates);

struct SkipEntry {
  std::size_t line_no = 0;
  std::string reason;
  std::string line;
};

struct ConvertSummary {
  std::size_t converted = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> per_template;
  std::vector<SkipEntry> skips;

  std::string to_text() const;
};

// Emits one AI record (and a linked human line carrying the original text)
// per matched line; returns the link id or records the skip reason.
std::optional<std::string> convert_line(
    const std::string& line, std::size_t line_no,
    const std::vector<LogTemplate>& templates, Writer& writer,
    ConvertSummary& summary);

// One pass over the source, line order preserved. converted + skipped
// always equals the input line count.
ConvertSummary convert_file(const std::string& source_path,
                            const std::vector<LogTemplate>& templates,
                            Writer& writer,
                            const std::string& skip_report_path);

}  // namespace mlog

#endif  // MLOG_LEGACY_HPP
