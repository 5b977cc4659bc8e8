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

#include <algorithm>
#include <set>
#include <sstream>

#include "mlog/encoders.hpp"
#include "mlog/util.hpp"

namespace mlog {

std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::vocab_append: return "vocab_append";
    case ChangeKind::vocab_remove: return "vocab_remove";
    case ChangeKind::vocab_reorder: return "vocab_reorder";
    case ChangeKind::param_add: return "param_add";
    case ChangeKind::param_remove: return "param_remove";
    case ChangeKind::bounds_change: return "bounds_change";
    case ChangeKind::encoding_change: return "encoding_change";
    case ChangeKind::category_add: return "category_add";
    case ChangeKind::category_remove: return "category_remove";
  }
  return "?";
}

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::copy: return "copy";
    case RuleKind::zero_pad: return "zero_pad";
    case RuleKind::re_encode_from_raw: return "re_encode_from_raw";
    case RuleKind::default_fill: return "default_fill";
  }
  return "?";
}

std::string SchemaDiff::to_text() const {
  std::ostringstream out;
  for (const auto& change : changes) {
    out << to_string(change.kind) << " " << change.path;
    if (!change.detail.empty()) out << " (" << change.detail << ")";
    out << "\n";
  }
  out << (classification == Compatibility::compatible ? "compatible"
                                                      : "breaking")
      << "\n";
  return out.str();
}

namespace {

enum class VocabRelation { identical, appended, reordered, removed };

VocabRelation vocab_relation(const std::vector<std::string>& old_vocab,
                             const std::vector<std::string>& new_vocab) {
  if (old_vocab == new_vocab) return VocabRelation::identical;
  if (old_vocab.size() < new_vocab.size() &&
      std::equal(old_vocab.begin(), old_vocab.end(), new_vocab.begin())) {
    return VocabRelation::appended;
  }
  const std::set<std::string> old_set(old_vocab.begin(), old_vocab.end());
  const std::set<std::string> new_set(new_vocab.begin(), new_vocab.end());
  if (old_set == new_set) return VocabRelation::reordered;
  if (std::includes(new_set.begin(), new_set.end(), old_set.begin(),
                    old_set.end())) {
    // Every old token survives but the order broke.
    return VocabRelation::reordered;
  }
  return VocabRelation::removed;
}

void diff_vocab(const std::vector<std::string>& old_vocab,
                const std::vector<std::string>& new_vocab,
                const std::string& path, std::vector<SchemaChange>& out) {
  switch (vocab_relation(old_vocab, new_vocab)) {
    case VocabRelation::identical:
      return;
    case VocabRelation::appended:
      out.push_back({ChangeKind::vocab_append, path,
                     std::to_string(new_vocab.size() - old_vocab.size()) +
                         " token(s) appended"});
      return;
    case VocabRelation::reordered:
      out.push_back({ChangeKind::vocab_reorder, path,
                     "token order changed"});
      return;
    case VocabRelation::removed:
      out.push_back({ChangeKind::vocab_remove, path,
                     "token(s) removed or replaced"});
      return;
  }
}

template <typename T>
bool common_order_changed(const std::vector<T>& old_items,
                          const std::vector<T>& new_items,
                          std::string (*name_of)(const T&)) {
  std::vector<std::string> old_names, new_names;
  std::set<std::string> old_set, new_set;
  for (const auto& item : old_items) old_set.insert(name_of(item));
  for (const auto& item : new_items) new_set.insert(name_of(item));
  for (const auto& item : old_items) {
    const std::string name = name_of(item);
    if (new_set.count(name)) old_names.push_back(name);
  }
  for (const auto& item : new_items) {
    const std::string name = name_of(item);
    if (old_set.count(name)) new_names.push_back(name);
  }
  return old_names != new_names;
}

void diff_param(const ParameterSpec& old_param, const ParameterSpec& new_param,
                const std::string& path, std::vector<SchemaChange>& out) {
  if (old_param.encoding != new_param.encoding) {
    out.push_back({ChangeKind::encoding_change, path,
                   std::string(to_string(old_param.encoding)) + " -> " +
                       std::string(to_string(new_param.encoding))});
    return;  // finer-grained diffs are moot once the encoding changed
  }
  if (old_param.level != new_param.level) {
    out.push_back({ChangeKind::encoding_change, path,
                   "measurement level " +
                       std::string(to_string(old_param.level)) + " -> " +
                       std::string(to_string(new_param.level))});
  }
  diff_vocab(old_param.vocabulary, new_param.vocabulary, path, out);
  if (old_param.bounds != new_param.bounds) {
    out.push_back({ChangeKind::bounds_change, path, "bounds changed"});
  }
  if (old_param.center_scale != new_param.center_scale) {
    out.push_back({ChangeKind::bounds_change, path, "center_scale changed"});
  }
}

}  // namespace

SchemaDiff diff_schemas(const LogSchema& old_schema,
                        const LogSchema& new_schema) {
  SchemaDiff diff;
  auto& out = diff.changes;

  // Identifying fields (layout-wise these behave like parameters shared by
  // every category, so additions/removals reuse the param change kinds).
  for (const auto& old_field : old_schema.identifying_fields) {
    const std::string path = "identifying_fields." + old_field.name;
    const auto* match = [&]() -> const IdentifyingFieldDef* {
      for (const auto& f : new_schema.identifying_fields) {
        if (f.name == old_field.name) return &f;
      }
      return nullptr;
    }();
    if (match == nullptr) {
      out.push_back({ChangeKind::param_remove, path,
                     "identifying field removed"});
      continue;
    }
    diff_vocab(old_field.vocabulary, match->vocabulary, path, out);
  }
  for (const auto& new_field : new_schema.identifying_fields) {
    bool in_old = false;
    for (const auto& f : old_schema.identifying_fields) {
      if (f.name == new_field.name) in_old = true;
    }
    if (!in_old) {
      out.push_back({ChangeKind::param_add,
                     "identifying_fields." + new_field.name,
                     "identifying field added"});
    }
  }
  if (common_order_changed<IdentifyingFieldDef>(
          old_schema.identifying_fields, new_schema.identifying_fields,
          [](const IdentifyingFieldDef& f) { return f.name; })) {
    out.push_back({ChangeKind::vocab_reorder, "identifying_fields",
                   "field order changed"});
  }

  diff_vocab(old_schema.labels, new_schema.labels, "labels", out);

  for (const auto& old_type : old_schema.entry_types) {
    const EntryTypeDef* new_type = new_schema.find_type(old_type.name);
    if (new_type == nullptr) {
      for (const auto& category : old_type.categories) {
        out.push_back({ChangeKind::category_remove,
                       old_type.name + "." + category.name,
                       "entry type removed"});
      }
      continue;
    }
    for (const auto& old_category : old_type.categories) {
      const std::string cpath = old_type.name + "." + old_category.name;
      const EntryCategoryDef* new_category =
          new_schema.find_category(old_type.name, old_category.name);
      if (new_category == nullptr) {
        out.push_back({ChangeKind::category_remove, cpath, ""});
        continue;
      }
      for (const auto& old_param : old_category.params) {
        const std::string ppath = cpath + "." + old_param.name;
        const ParameterSpec* match = nullptr;
        for (const auto& p : new_category->params) {
          if (p.name == old_param.name) match = &p;
        }
        if (match == nullptr) {
          out.push_back({ChangeKind::param_remove, ppath, ""});
          continue;
        }
        diff_param(old_param, *match, ppath, out);
      }
      for (const auto& new_param : new_category->params) {
        bool in_old = false;
        for (const auto& p : old_category.params) {
          if (p.name == new_param.name) in_old = true;
        }
        if (!in_old) {
          out.push_back({ChangeKind::param_add,
                         cpath + "." + new_param.name, ""});
        }
      }
      if (common_order_changed<ParameterSpec>(
              old_category.params, new_category->params,
              [](const ParameterSpec& p) { return p.name; })) {
        out.push_back({ChangeKind::vocab_reorder, cpath + ".params",
                       "parameter order changed"});
      }
      if (old_category.intrinsic_label != new_category->intrinsic_label) {
        out.push_back({ChangeKind::encoding_change, cpath,
                       "intrinsic_label changed"});
      }
    }
    if (common_order_changed<EntryCategoryDef>(
            old_type.categories, new_type->categories,
            [](const EntryCategoryDef& c) { return c.name; })) {
      out.push_back({ChangeKind::vocab_reorder,
                     old_type.name + ".categories",
                     "category order changed"});
    }
  }
  for (const auto& new_type : new_schema.entry_types) {
    const EntryTypeDef* old_type = old_schema.find_type(new_type.name);
    for (const auto& category : new_type.categories) {
      if (old_type == nullptr ||
          old_schema.find_category(new_type.name, category.name) == nullptr) {
        out.push_back({ChangeKind::category_add,
                       new_type.name + "." + category.name, ""});
      }
    }
  }
  if (common_order_changed<EntryTypeDef>(
          old_schema.entry_types, new_schema.entry_types,
          [](const EntryTypeDef& t) { return t.name; })) {
    out.push_back({ChangeKind::vocab_reorder, "entry_types",
                   "type order changed"});
  }

  diff.classification = Compatibility::compatible;
  for (const auto& change : diff.changes) {
    const bool compatible = change.kind == ChangeKind::vocab_append ||
                            change.kind == ChangeKind::category_add ||
                            change.kind == ChangeKind::param_add;
    if (!compatible) {
      diff.classification = Compatibility::breaking;
      break;
    }
  }
  return diff;
}

const CategoryPlan* MigrationMap::plan_for(
    std::size_t old_type_index, std::size_t old_category_index) const {
  for (const auto& plan : categories) {
    if (plan.old_type_index == old_type_index &&
        plan.old_category_index == old_category_index) {
      return &plan;
    }
  }
  return nullptr;
}

bool MigrationMap::is_dropped(std::string_view type,
                              std::string_view category) const {
  const std::string key = std::string(type) + "." + std::string(category);
  return std::find(dropped_categories.begin(), dropped_categories.end(),
                   key) != dropped_categories.end();
}

std::string MigrationMap::to_text() const {
  std::ostringstream out;
  out << "migration " << from_fp << " -> " << to_fp << "\n";
  for (const auto& plan : categories) {
    out << "  " << plan.type << "." << plan.category << " (width "
        << plan.target_width << ")\n";
    for (const auto& segment : plan.segments) {
      out << "    " << segment.target.name << " @" << segment.target.offset
          << "+" << segment.target.width << ": "
          << to_string(segment.rule.kind);
      if (segment.rule.kind == RuleKind::default_fill) {
        out << "(" << format_raw_number(segment.rule.fill_value) << ")";
      }
      out << "\n";
    }
    for (const auto& dropped : plan.dropped_segments) {
      out << "    " << dropped << ": drop\n";
    }
  }
  for (const auto& dropped : dropped_categories) {
    out << "  " << dropped << ": drop (records discarded)\n";
  }
  return out.str();
}

namespace {

std::optional<SegmentRule> parse_rule_text(std::string_view text) {
  if (text == "copy") return SegmentRule{RuleKind::copy, 0.0};
  if (text == "zero_pad") return SegmentRule{RuleKind::zero_pad, 0.0};
  if (text == "re_encode_from_raw") {
    return SegmentRule{RuleKind::re_encode_from_raw, 0.0};
  }
  if (text.rfind("default_fill:", 0) == 0) {
    return SegmentRule{RuleKind::default_fill,
                       parse_number(text.substr(13))};
  }
  return std::nullopt;
}

struct SourceInfo {
  std::ptrdiff_t offset = -1;
  std::size_t width = 0;
  std::ptrdiff_t raw_index = -1;
};

SourceInfo source_of(const LogSchema& old_schema, const Layout& old_layout,
                     const EntryCategoryDef* old_category, SegmentKind kind,
                     const std::string& name) {
  SourceInfo info;
  const LayoutSegment* segment = old_layout.find(kind, name);
  if (segment == nullptr) return info;
  info.offset = static_cast<std::ptrdiff_t>(segment->offset);
  info.width = segment->width;
  if (kind == SegmentKind::identifying) {
    for (std::size_t i = 0; i < old_schema.identifying_fields.size(); ++i) {
      if (old_schema.identifying_fields[i].name == name) {
        info.raw_index = static_cast<std::ptrdiff_t>(i);
      }
    }
  } else {
    for (std::size_t i = 0; i < old_category->params.size(); ++i) {
      if (old_category->params[i].name == name) {
        info.raw_index = static_cast<std::ptrdiff_t>(
            old_schema.identifying_fields.size() + i);
      }
    }
  }
  return info;
}

}  // namespace

MigrationMap build_migration(const LogSchema& old_schema,
                             const LogSchema& new_schema,
                             const MigrationOverrides& overrides) {
  for (const auto* schema : {&old_schema, &new_schema}) {
    const ValidationReport report = validate_schema(*schema);
    if (!report.valid()) {
      throw Error(ErrorCode::INVALID_SCHEMA, "\n" + report.to_text());
    }
  }

  MigrationMap map;
  map.from_fp = schema_fingerprint(old_schema);
  map.to_fp = schema_fingerprint(new_schema);
  map.from_schema = old_schema;
  map.to_schema = new_schema;

  std::set<std::string> used_overrides;
  auto override_for = [&](const std::string& path)
      -> std::optional<std::string> {
    auto it = overrides.find(path);
    if (it == overrides.end()) return std::nullopt;
    used_overrides.insert(path);
    return it->second;
  };

  for (std::size_t ot = 0; ot < old_schema.entry_types.size(); ++ot) {
    const EntryTypeDef& old_type = old_schema.entry_types[ot];
    for (std::size_t oc = 0; oc < old_type.categories.size(); ++oc) {
      const EntryCategoryDef& old_category = old_type.categories[oc];
      const std::string cpath = old_type.name + "." + old_category.name;
      const EntryCategoryDef* new_category =
          new_schema.find_category(old_type.name, old_category.name);
      if (new_category == nullptr) {
        const auto rule = override_for(cpath);
        if (rule && *rule == "drop") {
          map.dropped_categories.push_back(cpath);
          continue;
        }
        throw Error(ErrorCode::UNRESOLVABLE_SEGMENT,
                    cpath + " was removed; pass '" + cpath +
                        "=drop' to discard its records");
      }

      CategoryPlan plan;
      plan.type = old_type.name;
      plan.category = old_category.name;
      plan.old_type_index = ot;
      plan.old_category_index = oc;
      plan.new_type_index = *new_schema.type_index(old_type.name);
      plan.new_category_index =
          *new_schema.category_index(old_type.name, old_category.name);

      const Layout old_layout =
          vector_layout(old_schema, old_type.name, old_category.name);
      const Layout new_layout =
          vector_layout(new_schema, old_type.name, old_category.name);
      plan.target_width = new_layout.total_width;

      for (const auto& target : new_layout.segments) {
        SegmentPlan segment;
        segment.target = target;
        const bool identifying = target.kind == SegmentKind::identifying;
        const std::string path = identifying
                                     ? "identifying_fields." + target.name
                                     : cpath + "." + target.name;
        const SourceInfo source = source_of(old_schema, old_layout,
                                            &old_category, target.kind,
                                            target.name);
        segment.source_offset = source.offset;
        segment.source_width = source.width;
        segment.source_raw_index = source.raw_index;

        const auto requested = override_for(path);
        if (requested) {
          if (*requested == "drop") {
            throw Error(ErrorCode::OVERRIDE_INVALID,
                        path + " exists in the target layout and cannot be "
                               "dropped");
          }
          const auto rule = parse_rule_text(*requested);
          if (!rule) {
            throw Error(ErrorCode::OVERRIDE_INVALID,
                        path + ": unknown rule '" + *requested + "'");
          }
          if (rule->kind == RuleKind::copy &&
              (source.offset < 0 || source.width != target.width)) {
            throw Error(ErrorCode::OVERRIDE_INVALID,
                        path + ": copy needs an equal-width source segment");
          }
          if (rule->kind == RuleKind::re_encode_from_raw &&
              source.raw_index < 0) {
            throw Error(ErrorCode::OVERRIDE_INVALID,
                        path + ": no source raw value to re-encode");
          }
          segment.rule = *rule;
          plan.segments.push_back(std::move(segment));
          continue;
        }

        // Automatic resolution.
        if (identifying) {
          const IdentifyingFieldDef* new_field = nullptr;
          const IdentifyingFieldDef* old_field = nullptr;
          for (const auto& f : new_schema.identifying_fields) {
            if (f.name == target.name) new_field = &f;
          }
          for (const auto& f : old_schema.identifying_fields) {
            if (f.name == target.name) old_field = &f;
          }
          if (old_field == nullptr) {
            segment.rule = {RuleKind::zero_pad, 0.0};  // brand-new field
            segment.source_width = 0;
          } else {
            switch (vocab_relation(old_field->vocabulary,
                                   new_field->vocabulary)) {
              case VocabRelation::identical:
                segment.rule = {RuleKind::copy, 0.0};
                break;
              case VocabRelation::appended:
                segment.rule = {RuleKind::zero_pad, 0.0};
                break;
              default:
                throw Error(ErrorCode::UNRESOLVABLE_SEGMENT,
                            path + ": vocabulary reordered or shrunk; "
                                   "override required");
            }
          }
          plan.segments.push_back(std::move(segment));
          continue;
        }

        const ParameterSpec* new_param = nullptr;
        for (const auto& p : new_category->params) {
          if (p.name == target.name) new_param = &p;
        }
        const ParameterSpec* old_param = nullptr;
        for (const auto& p : old_category.params) {
          if (p.name == target.name) old_param = &p;
        }
        if (old_param == nullptr) {
          segment.rule = {RuleKind::zero_pad, 0.0};  // param_add
          segment.source_width = 0;
          plan.segments.push_back(std::move(segment));
          continue;
        }
        if (*old_param == *new_param ||
            (old_param->encoding == new_param->encoding &&
             old_param->vocabulary == new_param->vocabulary &&
             old_param->bounds == new_param->bounds &&
             old_param->center_scale == new_param->center_scale)) {
          // Identical wire behaviour (a measurement-level relabel at most).
          segment.rule = {RuleKind::copy, 0.0};
          plan.segments.push_back(std::move(segment));
          continue;
        }
        if (old_param->encoding != new_param->encoding) {
          throw Error(ErrorCode::UNRESOLVABLE_SEGMENT,
                      path + ": encoding changed (" +
                          std::string(to_string(old_param->encoding)) +
                          " -> " +
                          std::string(to_string(new_param->encoding)) +
                          "); override required");
        }
        if (new_param->encoding == Encoding::quantile_gaussian) {
          throw Error(ErrorCode::UNRESOLVABLE_SEGMENT,
                      path + ": quantile_gaussian cannot be re-encoded "
                             "offline; override required");
        }
        if (old_param->vocabulary != new_param->vocabulary) {
          switch (vocab_relation(old_param->vocabulary,
                                 new_param->vocabulary)) {
            case VocabRelation::appended:
              if (new_param->encoding == Encoding::one_hot) {
                segment.rule = {RuleKind::zero_pad, 0.0};
              } else {
                // Contrast codes change value with k; raw tokens re-encode.
                segment.rule = {RuleKind::re_encode_from_raw, 0.0};
              }
              plan.segments.push_back(std::move(segment));
              continue;
            default:
              throw Error(ErrorCode::UNRESOLVABLE_SEGMENT,
                          path + ": vocabulary reordered or shrunk; "
                                 "override required");
          }
        }
        // bounds_change / center_scale change: raw retention makes this
        // total.
        segment.rule = {RuleKind::re_encode_from_raw, 0.0};
        plan.segments.push_back(std::move(segment));
      }

      for (const auto& old_param : old_category.params) {
        bool kept = false;
        for (const auto& p : new_category->params) {
          if (p.name == old_param.name) kept = true;
        }
        if (!kept) plan.dropped_segments.push_back(old_param.name);
      }

      plan.raw_map.reserve(new_schema.identifying_fields.size() +
                           new_category->params.size());
      for (const auto& field : new_schema.identifying_fields) {
        std::ptrdiff_t source = -1;
        for (std::size_t i = 0; i < old_schema.identifying_fields.size();
             ++i) {
          if (old_schema.identifying_fields[i].name == field.name) {
            source = static_cast<std::ptrdiff_t>(i);
          }
        }
        plan.raw_map.push_back(source);
      }
      for (const auto& param : new_category->params) {
        std::ptrdiff_t source = -1;
        for (std::size_t i = 0; i < old_category.params.size(); ++i) {
          if (old_category.params[i].name == param.name) {
            source = static_cast<std::ptrdiff_t>(
                old_schema.identifying_fields.size() + i);
          }
        }
        plan.raw_map.push_back(source);
      }

      map.categories.push_back(std::move(plan));
    }
  }

  for (const auto& [path, rule] : overrides) {
    if (used_overrides.find(path) == used_overrides.end()) {
      throw Error(ErrorCode::OVERRIDE_INVALID,
                  path + " does not name a segment of this migration");
    }
    (void)rule;
  }
  return map;
}

namespace {

void re_encode_segment(const MigrationMap& map, const CategoryPlan& plan,
                       const SegmentPlan& segment, const AiLogRecord& record,
                       std::vector<double>& out) {
  if (segment.source_raw_index < 0 ||
      static_cast<std::size_t>(segment.source_raw_index) >=
          record.raw.size()) {
    throw Error(ErrorCode::RAW_VALUE_MISSING, segment.target.name);
  }
  const RawValue& raw = record.raw[static_cast<std::size_t>(
      segment.source_raw_index)];
  const auto splice = [&](const std::vector<double>& values) {
    std::copy(values.begin(), values.end(),
              out.begin() + static_cast<std::ptrdiff_t>(segment.target.offset));
  };

  if (segment.target.kind == SegmentKind::identifying) {
    const std::string& token = raw_token(raw);
    if (token.empty()) {
      throw Error(ErrorCode::RAW_VALUE_MISSING, segment.target.name);
    }
    for (const auto& field : map.to_schema.identifying_fields) {
      if (field.name == segment.target.name) {
        splice(one_hot_encode(token, field.vocabulary));
        return;
      }
    }
    throw Error(ErrorCode::UNRESOLVABLE_SEGMENT, segment.target.name);
  }

  const EntryCategoryDef* category =
      map.to_schema.find_category(plan.type, plan.category);
  const ParameterSpec* spec = nullptr;
  for (const auto& p : category->params) {
    if (p.name == segment.target.name) spec = &p;
  }
  if (spec == nullptr) {
    throw Error(ErrorCode::UNRESOLVABLE_SEGMENT, segment.target.name);
  }
  if (spec->categorical()) {
    const std::string& token = raw_token(raw);
    if (token.empty()) {
      throw Error(ErrorCode::RAW_VALUE_MISSING, segment.target.name);
    }
    switch (spec->encoding) {
      case Encoding::one_hot:
        splice(one_hot_encode(token, spec->vocabulary));
        return;
      case Encoding::bit:
        out[segment.target.offset] = bit_encode(token, spec->vocabulary);
        return;
      default: {
        const auto matrix =
            contrast_matrix(spec->encoding, spec->vocabulary.size());
        std::size_t level = spec->vocabulary.size();
        for (std::size_t v = 0; v < spec->vocabulary.size(); ++v) {
          if (spec->vocabulary[v] == token) level = v;
        }
        if (level == spec->vocabulary.size()) {
          throw Error(ErrorCode::UNKNOWN_TOKEN,
                      "'" + token + "' cannot be re-encoded for " +
                          segment.target.name);
        }
        splice(contrast_encode(level, matrix));
        return;
      }
    }
  }
  const double x = raw_number(raw);
  switch (spec->encoding) {
    case Encoding::minmax:
      out[segment.target.offset] =
          minmax_normalize(x, spec->bounds->min, spec->bounds->max);
      return;
    case Encoding::sigmoid:
      out[segment.target.offset] = sigmoid_normalize(
          x, spec->center_scale->center, spec->center_scale->scale);
      return;
    case Encoding::tanh:
      out[segment.target.offset] = tanh_normalize(
          x, spec->center_scale->center, spec->center_scale->scale);
      return;
    default:
      throw Error(ErrorCode::UNRESOLVABLE_SEGMENT, segment.target.name);
  }
}

}  // namespace

AiLogRecord migrate_record(const AiLogRecord& record,
                           const MigrationMap& map) {
  if (record.schema_fp != map.from_fp) {
    throw Error(ErrorCode::FINGERPRINT_MISMATCH,
                "record carries " + record.schema_fp + ", map expects " +
                    map.from_fp);
  }
  AiLogRecord migrated = record;
  migrated.schema_fp = map.to_fp;
  if (record.is_meta()) return migrated;  // markers pass through

  const CategoryPlan* plan =
      map.plan_for(record.type_index, record.category_index);
  if (plan == nullptr) {
    throw Error(ErrorCode::UNKNOWN_TYPE_OR_CATEGORY,
                "record's category was dropped by this migration");
  }
  migrated.type_index = plan->new_type_index;
  migrated.category_index = plan->new_category_index;

  std::vector<double> encoded(plan->target_width, 0.0);
  for (const auto& segment : plan->segments) {
    switch (segment.rule.kind) {
      case RuleKind::copy:
        for (std::size_t i = 0; i < segment.target.width; ++i) {
          encoded[segment.target.offset + i] =
              record.encoded[static_cast<std::size_t>(segment.source_offset) +
                             i];
        }
        break;
      case RuleKind::zero_pad:
        for (std::size_t i = 0; i < segment.source_width; ++i) {
          encoded[segment.target.offset + i] =
              record.encoded[static_cast<std::size_t>(segment.source_offset) +
                             i];
        }
        break;
      case RuleKind::default_fill:
        for (std::size_t i = 0; i < segment.target.width; ++i) {
          encoded[segment.target.offset + i] = segment.rule.fill_value;
        }
        break;
      case RuleKind::re_encode_from_raw:
        re_encode_segment(map, *plan, segment, record, encoded);
        break;
    }
  }
  migrated.encoded = std::move(encoded);

  std::vector<RawValue> raw;
  raw.reserve(plan->raw_map.size());
  for (const std::ptrdiff_t source : plan->raw_map) {
    if (source < 0 || static_cast<std::size_t>(source) >= record.raw.size()) {
      raw.push_back(RawValue(std::string()));
    } else {
      raw.push_back(record.raw[static_cast<std::size_t>(source)]);
    }
  }
  migrated.raw = std::move(raw);
  return migrated;
}

MigrateSummary migrate_log(const std::string& in_path,
                           const std::string& out_path,
                           const MigrationMap& map) {
  const std::string content = read_file(in_path);
  std::ostringstream out;
  MigrateSummary summary;

  std::size_t line_no = 0;
  bool header_seen = false;
  for (const auto line : split(content, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      const auto fp = parse_ai_header(line);
      if (!fp) {
        throw Error(ErrorCode::MALFORMED_LINE,
                    in_path + ":1: missing mlog header");
      }
      if (*fp != map.from_fp) {
        throw Error(ErrorCode::SCHEMA_MISMATCH,
                    in_path + " carries fingerprint " + *fp +
                        ", map migrates from " + map.from_fp);
      }
      out << ai_header(map.to_fp) << '\n';
      header_seen = true;
      continue;
    }
    if (line.front() == '#') continue;
    AiLogRecord record;
    try {
      record = parse_record(line, map.from_schema);
    } catch (const Error& e) {
      throw Error(ErrorCode::MALFORMED_LINE,
                  in_path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    ++summary.records_in;
    if (!record.is_meta()) {
      const auto& type = map.from_schema.entry_types[record.type_index];
      const auto& category = type.categories[record.category_index];
      if (map.is_dropped(type.name, category.name)) {
        ++summary.records_dropped;
        continue;
      }
    }
    out << serialize_record(migrate_record(record, map)) << '\n';
    ++summary.records_out;
  }
  if (!header_seen) {
    throw Error(ErrorCode::MALFORMED_LINE, in_path + ": empty file, no header");
  }
  write_file(out_path, out.str());
  return summary;
}

}  // namespace mlog
