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

#include "mlog/legacy.hpp"

#include <algorithm>
#include <sstream>

#include "mlog/util.hpp"

namespace mlog {

namespace {

bool is_token_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '/' ||
         c == '-';
}

// <name:token> or <name:number>
std::vector<PatternPiece> lex_pattern(std::string_view pattern,
                                      const std::string& context) {
  std::vector<PatternPiece> pieces;
  std::string literal;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] != '<') {
      literal += pattern[i++];
      continue;
    }
    const std::size_t close = pattern.find('>', i);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::PARSE_FAILURE, context + ": unterminated slot");
    }
    const std::string_view body = pattern.substr(i + 1, close - i - 1);
    const std::size_t colon = body.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::PARSE_FAILURE,
                  context + ": slot must be <name:token|number>");
    }
    const std::string name(body.substr(0, colon));
    const std::string_view kind_text = body.substr(colon + 1);
    SlotKind kind;
    if (kind_text == "token") {
      kind = SlotKind::token;
    } else if (kind_text == "number") {
      kind = SlotKind::number;
    } else {
      throw Error(ErrorCode::PARSE_FAILURE,
                  context + ": unknown slot kind '" + std::string(kind_text) +
                      "'");
    }
    if (!is_valid_name(name)) {
      throw Error(ErrorCode::PARSE_FAILURE,
                  context + ": bad slot name '" + name + "'");
    }
    if (!literal.empty()) {
      pieces.push_back({false, literal, {}});
      literal.clear();
    }
    pieces.push_back({true, "", {name, kind}});
    i = close + 1;
  }
  if (!literal.empty()) pieces.push_back({false, literal, {}});
  return pieces;
}

// Longest run of token characters / a number with optional sign and
// fraction, no exponent.
std::size_t lex_slot(std::string_view text, SlotKind kind) {
  if (kind == SlotKind::token) {
    std::size_t n = 0;
    while (n < text.size() && is_token_char(text[n])) ++n;
    return n;
  }
  std::size_t n = 0;
  if (n < text.size() && (text[n] == '+' || text[n] == '-')) ++n;
  const std::size_t digits_start = n;
  while (n < text.size() && text[n] >= '0' && text[n] <= '9') ++n;
  if (n == digits_start) return 0;  // no digits, no number
  if (n < text.size() && text[n] == '.') {
    const std::size_t frac_start = n + 1;
    std::size_t f = frac_start;
    while (f < text.size() && text[f] >= '0' && text[f] <= '9') ++f;
    if (f > frac_start) n = f;
  }
  return n;
}

}  // namespace

std::vector<LogTemplate> parse_templates(std::string_view text) {
  std::vector<LogTemplate> templates;
  LogTemplate current;
  bool in_block = false;

  auto flush = [&] {
    if (!in_block) return;
    if (current.id.empty() || current.pieces.empty() ||
        current.target_type.empty()) {
      throw Error(ErrorCode::PARSE_FAILURE,
                  "template block needs id:, pattern: and target: lines");
    }
    templates.push_back(std::move(current));
    current = LogTemplate{};
    in_block = false;
  };

  std::size_t line_no = 0;
  for (const auto raw_line : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw_line;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.remove_suffix(1);
    }
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    const std::string context = "templates:" + std::to_string(line_no);
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::PARSE_FAILURE,
                  context + ": expected 'key: value'");
    }
    const std::string_view key = line.substr(0, colon);
    std::string_view value = line.substr(colon + 1);
    while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    in_block = true;
    if (key == "id") {
      if (!is_valid_name(value)) {
        throw Error(ErrorCode::PARSE_FAILURE,
                    context + ": bad template id '" + std::string(value) +
                        "'");
      }
      current.id = std::string(value);
    } else if (key == "pattern") {
      current.pattern_text = std::string(value);
      current.pieces = lex_pattern(value, context);
    } else if (key == "target") {
      const auto parts = split(value, '.');
      if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
        throw Error(ErrorCode::PARSE_FAILURE,
                    context + ": target must be type.category");
      }
      current.target_type = std::string(parts[0]);
      current.target_category = std::string(parts[1]);
    } else if (key == "bind") {
      const std::size_t eq = value.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::PARSE_FAILURE,
                    context + ": bind must be 'bind: target = value'");
      }
      std::string_view target = value.substr(0, eq);
      std::string_view bound = value.substr(eq + 1);
      while (!target.empty() && target.back() == ' ') target.remove_suffix(1);
      while (!bound.empty() && bound.front() == ' ') bound.remove_prefix(1);
      while (!bound.empty() && bound.back() == ' ') bound.remove_suffix(1);
      SlotBinding binding;
      binding.target = std::string(target);
      if (bound.size() >= 2 && bound.front() == '<' && bound.back() == '>') {
        binding.from_slot = true;
        binding.slot_name = std::string(bound.substr(1, bound.size() - 2));
      } else {
        binding.constant = std::string(bound);
      }
      current.bindings.push_back(std::move(binding));
    } else {
      throw Error(ErrorCode::PARSE_FAILURE,
                  context + ": unknown key '" + std::string(key) + "'");
    }
  }
  flush();
  return templates;
}

void validate_templates(const std::vector<LogTemplate>& templates,
                        const LogSchema& schema) {
  for (const auto& tmpl : templates) {
    const std::string context = "template " + tmpl.id;
    const EntryCategoryDef* category =
        schema.find_category(tmpl.target_type, tmpl.target_category);
    if (category == nullptr) {
      throw Error(ErrorCode::UNKNOWN_TYPE_OR_CATEGORY,
                  context + ": target " + tmpl.target_type + "." +
                      tmpl.target_category);
    }
    std::map<std::string, SlotKind> slots;
    for (const auto& piece : tmpl.pieces) {
      if (!piece.is_slot) continue;
      if (!slots.emplace(piece.slot.name, piece.slot.kind).second) {
        throw Error(ErrorCode::PARSE_FAILURE,
                    context + ": duplicate slot '" + piece.slot.name + "'");
      }
    }
    std::map<std::string, std::size_t> bound_counts;
    for (const auto& binding : tmpl.bindings) {
      ++bound_counts[binding.target];
      if (binding.from_slot && slots.find(binding.slot_name) == slots.end()) {
        throw Error(ErrorCode::PARSE_FAILURE,
                    context + ": bind references unknown slot <" +
                        binding.slot_name + ">");
      }
    }
    auto require_bound = [&](const std::string& name) {
      const auto it = bound_counts.find(name);
      if (it == bound_counts.end()) {
        throw Error(ErrorCode::PARSE_FAILURE,
                    context + ": '" + name + "' is not bound");
      }
      if (it->second != 1) {
        throw Error(ErrorCode::PARSE_FAILURE,
                    context + ": '" + name + "' bound more than once");
      }
    };
    for (const auto& field : schema.identifying_fields) {
      require_bound(field.name);
    }
    for (const auto& param : category->params) {
      require_bound(param.name);
    }
    if (bound_counts.size() !=
        schema.identifying_fields.size() + category->params.size()) {
      throw Error(ErrorCode::PARSE_FAILURE,
                  context + ": bindings name unknown fields or parameters");
    }
  }
}

std::optional<MatchResult> match_template(
    std::string_view line, const std::vector<LogTemplate>& templates) {
  for (const auto& tmpl : templates) {
    std::map<std::string, std::string> captures;
    std::string_view rest = line;
    bool ok = true;
    for (const auto& piece : tmpl.pieces) {
      if (!piece.is_slot) {
        if (rest.substr(0, piece.literal.size()) != piece.literal) {
          ok = false;
          break;
        }
        rest.remove_prefix(piece.literal.size());
        continue;
      }
      const std::size_t n = lex_slot(rest, piece.slot.kind);
      if (n == 0) {
        ok = false;
        break;
      }
      captures[piece.slot.name] = std::string(rest.substr(0, n));
      rest.remove_prefix(n);
    }
    if (ok && rest.empty()) {
      return MatchResult{&tmpl, std::move(captures)};
    }
  }
  return std::nullopt;
}

std::string ConvertSummary::to_text() const {
  std::ostringstream out;
  out << "converted " << converted << ", skipped " << skipped << "\n";
  for (const auto& [id, hits] : per_template) {
    out << "  " << id << ": " << hits << "\n";
  }
  return out.str();
}

std::optional<std::string> convert_line(
    const std::string& line, std::size_t line_no,
    const std::vector<LogTemplate>& templates, Writer& writer,
    ConvertSummary& summary) {
  const auto match = match_template(line, templates);
  if (!match) {
    summary.skips.push_back({line_no, "no matching template", line});
    ++summary.skipped;
    return std::nullopt;
  }
  const LogTemplate& tmpl = *match->tmpl;
  const LogSchema& schema = writer.schema();
  const EntryCategoryDef* category =
      schema.find_category(tmpl.target_type, tmpl.target_category);

  auto bound_text = [&](const std::string& target) -> const std::string& {
    for (const auto& binding : tmpl.bindings) {
      if (binding.target != target) continue;
      if (binding.from_slot) return match->captures.at(binding.slot_name);
      return binding.constant;
    }
    throw Error(ErrorCode::PARSE_FAILURE,
                tmpl.id + ": '" + target + "' is not bound");
  };

  try {
    std::vector<std::string> identifying;
    identifying.reserve(schema.identifying_fields.size());
    for (const auto& field : schema.identifying_fields) {
      identifying.push_back(bound_text(field.name));
    }
    std::vector<RawValue> params;
    params.reserve(category->params.size());
    for (const auto& param : category->params) {
      const std::string& text = bound_text(param.name);
      if (param.categorical()) {
        params.push_back(RawValue(text));
      } else {
        params.push_back(RawValue(parse_number(text)));
      }
    }
    const std::string link =
        writer.log_event(tmpl.target_type, tmpl.target_category, identifying,
                         params, line);
    ++summary.converted;
    ++summary.per_template[tmpl.id];
    return link;
  } catch (const Error& e) {
    summary.skips.push_back({line_no, e.what(), line});
    ++summary.skipped;
    return std::nullopt;
  }
}

ConvertSummary convert_file(const std::string& source_path,
                            const std::vector<LogTemplate>& templates,
                            Writer& writer,
                            const std::string& skip_report_path) {
  validate_templates(templates, writer.schema());
  const std::string content = read_file(source_path);

  ConvertSummary summary;
  std::size_t line_no = 0;
  auto lines = split(content, '\n');
  // A trailing newline yields one empty trailing piece, not an input line.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (const auto line : lines) {
    ++line_no;
    convert_line(std::string(line), line_no, templates, writer, summary);
  }

  if (!skip_report_path.empty()) {
    std::ostringstream report;
    for (const auto& skip : summary.skips) {
      report << skip.line_no << "\t" << skip.reason << "\t" << skip.line
             << "\n";
    }
    write_file(skip_report_path, report.str());
  }
  return summary;
}

}  // namespace mlog
