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

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "mlog/util.hpp"

namespace mlog {

using nlohmann::json;

std::string_view to_string(Level level) {
  switch (level) {
    case Level::nominal: return "nominal";
    case Level::ordinal_dichotomous: return "ordinal_dichotomous";
    case Level::ordinal: return "ordinal";
    case Level::interval: return "interval";
    case Level::ratio: return "ratio";
  }
  return "?";
}

std::string_view to_string(Encoding encoding) {
  switch (encoding) {
    case Encoding::one_hot: return "one_hot";
    case Encoding::bit: return "bit";
    case Encoding::helmert: return "helmert";
    case Encoding::backward_difference: return "backward_difference";
    case Encoding::orthogonal_polynomial: return "orthogonal_polynomial";
    case Encoding::minmax: return "minmax";
    case Encoding::sigmoid: return "sigmoid";
    case Encoding::tanh: return "tanh";
    case Encoding::quantile_gaussian: return "quantile_gaussian";
  }
  return "?";
}

std::optional<Level> parse_level(std::string_view token) {
  for (Level l : {Level::nominal, Level::ordinal_dichotomous, Level::ordinal,
                  Level::interval, Level::ratio}) {
    if (token == to_string(l)) return l;
  }
  return std::nullopt;
}

std::optional<Encoding> parse_encoding(std::string_view token) {
  for (Encoding e :
       {Encoding::one_hot, Encoding::bit, Encoding::helmert,
        Encoding::backward_difference, Encoding::orthogonal_polynomial,
        Encoding::minmax, Encoding::sigmoid, Encoding::tanh,
        Encoding::quantile_gaussian}) {
    if (token == to_string(e)) return e;
  }
  return std::nullopt;
}

bool is_categorical(Encoding encoding) {
  switch (encoding) {
    case Encoding::one_hot:
    case Encoding::bit:
    case Encoding::helmert:
    case Encoding::backward_difference:
    case Encoding::orthogonal_polynomial:
      return true;
    default:
      return false;
  }
}

bool is_contrast(Encoding encoding) {
  return encoding == Encoding::helmert ||
         encoding == Encoding::backward_difference ||
         encoding == Encoding::orthogonal_polynomial;
}

std::size_t ParameterSpec::encoded_width() const {
  switch (encoding) {
    case Encoding::one_hot:
      return vocabulary.size();
    case Encoding::bit:
      return 1;
    case Encoding::helmert:
    case Encoding::backward_difference:
    case Encoding::orthogonal_polynomial:
      return vocabulary.size() < 2 ? 0 : vocabulary.size() - 1;
    default:
      return 1;
  }
}

const EntryTypeDef* LogSchema::find_type(std::string_view name) const {
  for (const auto& t : entry_types) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const EntryCategoryDef* LogSchema::find_category(
    std::string_view type, std::string_view category) const {
  const EntryTypeDef* t = find_type(type);
  if (t == nullptr) return nullptr;
  for (const auto& c : t->categories) {
    if (c.name == category) return &c;
  }
  return nullptr;
}

std::optional<std::size_t> LogSchema::type_index(std::string_view name) const {
  for (std::size_t i = 0; i < entry_types.size(); ++i) {
    if (entry_types[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> LogSchema::category_index(
    std::string_view type, std::string_view category) const {
  const EntryTypeDef* t = find_type(type);
  if (t == nullptr) return std::nullopt;
  for (std::size_t i = 0; i < t->categories.size(); ++i) {
    if (t->categories[i].name == category) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> LogSchema::label_index(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return std::nullopt;
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  for (const auto& v : violations) {
    out << to_string(v.code) << " at " << v.path << ": " << v.message << "\n";
  }
  return out.str();
}

namespace {

void check_vocabulary(const std::vector<std::string>& vocab,
                      const std::string& path,
                      std::vector<Violation>& out) {
  if (vocab.empty()) {
    out.push_back({ErrorCode::EMPTY_VOCABULARY, path, "vocabulary is empty"});
    return;
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& token : vocab) {
    if (token.empty()) {
      out.push_back({ErrorCode::EMPTY_VOCABULARY, path, "empty token"});
    }
    if (!seen.insert(token).second) {
      out.push_back({ErrorCode::DUPLICATE_TOKEN, path,
                     "duplicate token '" + token + "'"});
    }
  }
}

bool level_allows(Level level, Encoding encoding) {
  switch (level) {
    case Level::nominal:
      return encoding == Encoding::one_hot;
    case Level::ordinal_dichotomous:
      return encoding == Encoding::bit;
    case Level::ordinal:
      return is_contrast(encoding);
    case Level::interval:
    case Level::ratio:
      return encoding == Encoding::minmax || encoding == Encoding::sigmoid ||
             encoding == Encoding::tanh ||
             encoding == Encoding::quantile_gaussian;
  }
  return false;
}

void check_param(const ParameterSpec& p, const std::string& path,
                 const LogSchema& schema, std::vector<Violation>& out) {
  if (!is_valid_name(p.name)) {
    out.push_back({ErrorCode::INVALID_NAME, path,
                   "parameter name must match [A-Za-z0-9_-]+"});
  }
  if (!level_allows(p.level, p.encoding)) {
    out.push_back({ErrorCode::LEVEL_ENCODING_MISMATCH, path,
                   std::string("level ") + std::string(to_string(p.level)) +
                       " does not admit encoding " +
                       std::string(to_string(p.encoding))});
  }
  if (p.categorical()) {
    if (p.vocabulary.empty()) {
      out.push_back({ErrorCode::MISSING_VOCABULARY, path,
                     "categorical encoding needs a vocabulary"});
    } else {
      check_vocabulary(p.vocabulary, path, out);
      if (p.encoding == Encoding::bit && p.vocabulary.size() != 2) {
        out.push_back({ErrorCode::VOCAB_SIZE, path,
                       "bit encoding needs exactly 2 tokens"});
      }
      if (is_contrast(p.encoding) && p.vocabulary.size() < 2) {
        out.push_back({ErrorCode::VOCAB_SIZE, path,
                       "contrast coding needs at least 2 tokens"});
      }
    }
    if (p.bounds || p.center_scale) {
      out.push_back({ErrorCode::SUPERFLUOUS_CONSTANT, path,
                     "categorical parameters carry only a vocabulary"});
    }
    return;
  }
  if (!p.vocabulary.empty()) {
    out.push_back({ErrorCode::SUPERFLUOUS_CONSTANT, path,
                   "numeric parameters carry no vocabulary"});
  }
  switch (p.encoding) {
    case Encoding::minmax:
      if (!p.bounds) {
        out.push_back({ErrorCode::MISSING_BOUNDS, path, "minmax needs bounds"});
      } else if (!(p.bounds->min < p.bounds->max)) {
        out.push_back({ErrorCode::BOUNDS_ORDER, path, "min must be < max"});
      }
      if (p.center_scale) {
        out.push_back({ErrorCode::SUPERFLUOUS_CONSTANT, path,
                       "minmax does not use center_scale"});
      }
      break;
    case Encoding::sigmoid:
    case Encoding::tanh:
      if (!p.center_scale) {
        out.push_back({ErrorCode::MISSING_CENTER_SCALE, path,
                       "sigmoid/tanh need center_scale"});
      } else if (!(p.center_scale->scale > 0.0)) {
        out.push_back({ErrorCode::NONPOSITIVE_SCALE, path,
                       "scale must be positive"});
      }
      if (p.bounds) {
        out.push_back({ErrorCode::SUPERFLUOUS_CONSTANT, path,
                       "sigmoid/tanh do not use bounds"});
      }
      break;
    case Encoding::quantile_gaussian:
      if (p.bounds || p.center_scale) {
        out.push_back({ErrorCode::SUPERFLUOUS_CONSTANT, path,
                       "quantile_gaussian carries no constants"});
      }
      break;
    default:
      break;
  }
  (void)schema;
}

}  // namespace

ValidationReport validate_schema(const LogSchema& schema) {
  ValidationReport report;
  auto& out = report.violations;

  if (schema.version == 0) {
    out.push_back({ErrorCode::NONPOSITIVE_VERSION, "version",
                   "version must be a positive integer"});
  }

  std::unordered_set<std::string_view> field_names;
  for (const auto& f : schema.identifying_fields) {
    std::string path = "identifying_fields." + f.name;
    if (!is_valid_name(f.name)) {
      out.push_back({ErrorCode::INVALID_NAME, path,
                     "field name must match [A-Za-z0-9_-]+"});
    }
    if (!field_names.insert(f.name).second) {
      out.push_back({ErrorCode::DUPLICATE_FIELD, path,
                     "duplicate identifying field '" + f.name + "'"});
    }
    check_vocabulary(f.vocabulary, path, out);
  }

  std::unordered_set<std::string_view> label_set;
  for (const auto& label : schema.labels) {
    if (!is_valid_name(label)) {
      out.push_back({ErrorCode::INVALID_NAME, "labels",
                     "label '" + label + "' must match [A-Za-z0-9_-]+"});
    }
    if (!label_set.insert(label).second) {
      out.push_back({ErrorCode::DUPLICATE_TOKEN, "labels",
                     "duplicate label '" + label + "'"});
    }
  }

  std::unordered_set<std::string_view> type_names;
  for (const auto& t : schema.entry_types) {
    if (!is_valid_name(t.name)) {
      out.push_back({ErrorCode::INVALID_NAME, t.name,
                     "type name must match [A-Za-z0-9_-]+"});
    }
    if (!type_names.insert(t.name).second) {
      out.push_back({ErrorCode::DUPLICATE_TYPE, t.name,
                     "duplicate entry type '" + t.name + "'"});
    }
    if (t.categories.empty()) {
      out.push_back({ErrorCode::NO_CATEGORIES, t.name,
                     "entry type needs at least one category"});
    }
    std::unordered_set<std::string_view> category_names;
    for (const auto& c : t.categories) {
      std::string cpath = t.name + "." + c.name;
      if (!is_valid_name(c.name)) {
        out.push_back({ErrorCode::INVALID_NAME, cpath,
                       "category name must match [A-Za-z0-9_-]+"});
      }
      if (!category_names.insert(c.name).second) {
        out.push_back({ErrorCode::DUPLICATE_CATEGORY, cpath,
                       "duplicate category '" + c.name + "' under type '" +
                           t.name + "'"});
      }
      if (c.intrinsic_label &&
          label_set.find(*c.intrinsic_label) == label_set.end()) {
        out.push_back({ErrorCode::LABEL_NOT_IN_VOCAB, cpath,
                       "intrinsic_label '" + *c.intrinsic_label +
                           "' is not in the schema's label vocabulary"});
      }
      std::unordered_set<std::string_view> param_names;
      for (const auto& p : c.params) {
        std::string ppath = cpath + "." + p.name;
        if (!param_names.insert(p.name).second) {
          out.push_back({ErrorCode::DUPLICATE_PARAM, ppath,
                         "duplicate parameter '" + p.name + "'"});
        }
        check_param(p, ppath, schema, out);
      }
    }
  }
  return report;
}

const LayoutSegment* Layout::find(SegmentKind kind,
                                  std::string_view name) const {
  for (const auto& s : segments) {
    if (s.kind == kind && s.name == name) return &s;
  }
  return nullptr;
}

Layout vector_layout(const LogSchema& schema, std::string_view type,
                     std::string_view category) {
  const EntryCategoryDef* cat = schema.find_category(type, category);
  if (cat == nullptr) {
    throw Error(ErrorCode::UNKNOWN_TYPE_OR_CATEGORY,
                std::string(type) + "." + std::string(category));
  }
  Layout layout;
  std::size_t offset = 0;
  for (const auto& f : schema.identifying_fields) {
    layout.segments.push_back(
        {SegmentKind::identifying, f.name, offset, f.vocabulary.size()});
    offset += f.vocabulary.size();
  }
  for (const auto& p : cat->params) {
    layout.segments.push_back(
        {SegmentKind::parameter, p.name, offset, p.encoded_width()});
    offset += p.encoded_width();
  }
  layout.total_width = offset;
  return layout;
}

namespace {

json param_to_json(const ParameterSpec& p) {
  json j;
  j["name"] = p.name;
  j["level"] = std::string(to_string(p.level));
  j["encoding"] = std::string(to_string(p.encoding));
  if (!p.vocabulary.empty()) j["vocabulary"] = p.vocabulary;
  if (p.bounds) j["bounds"] = {{"min", p.bounds->min}, {"max", p.bounds->max}};
  if (p.center_scale) {
    j["center_scale"] = {{"center", p.center_scale->center},
                         {"scale", p.center_scale->scale}};
  }
  return j;
}

json schema_to_json_value(const LogSchema& schema) {
  json j;
  j["version"] = schema.version;
  j["labels"] = schema.labels;
  j["identifying_fields"] = json::array();
  for (const auto& f : schema.identifying_fields) {
    j["identifying_fields"].push_back(
        {{"name", f.name}, {"vocabulary", f.vocabulary}});
  }
  j["entry_types"] = json::array();
  for (const auto& t : schema.entry_types) {
    json jt;
    jt["name"] = t.name;
    jt["categories"] = json::array();
    for (const auto& c : t.categories) {
      json jc;
      jc["name"] = c.name;
      jc["params"] = json::array();
      for (const auto& p : c.params) jc["params"].push_back(param_to_json(p));
      if (c.intrinsic_label) jc["intrinsic_label"] = *c.intrinsic_label;
      jt["categories"].push_back(std::move(jc));
    }
    j["entry_types"].push_back(std::move(jt));
  }
  return j;
}

[[noreturn]] void parse_fail(const std::string& context,
                             const std::string& what) {
  throw Error(ErrorCode::PARSE_FAILURE, context + ": " + what);
}

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      parse_fail(context, "unknown key '" + it.key() + "'");
    }
  }
}

std::string require_string(const json& obj, const char* key,
                           const std::string& context) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    parse_fail(context, std::string("missing string field '") + key + "'");
  }
  return obj[key].get<std::string>();
}

std::vector<std::string> require_string_array(const json& value,
                                              const std::string& context) {
  if (!value.is_array()) parse_fail(context, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) parse_fail(context, "expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

double require_number(const json& obj, const char* key,
                      const std::string& context) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    parse_fail(context, std::string("missing number field '") + key + "'");
  }
  return obj[key].get<double>();
}

ParameterSpec param_from_json(const json& jp, const std::string& context) {
  if (!jp.is_object()) parse_fail(context, "parameter must be an object");
  check_keys(jp, context,
             {"name", "level", "encoding", "vocabulary", "bounds",
              "center_scale"});
  ParameterSpec p;
  p.name = require_string(jp, "name", context);
  const std::string level_token = require_string(jp, "level", context);
  const std::string enc_token = require_string(jp, "encoding", context);
  auto level = parse_level(level_token);
  if (!level) parse_fail(context, "unknown level '" + level_token + "'");
  auto encoding = parse_encoding(enc_token);
  if (!encoding) parse_fail(context, "unknown encoding '" + enc_token + "'");
  p.level = *level;
  p.encoding = *encoding;
  if (jp.contains("vocabulary")) {
    p.vocabulary = require_string_array(jp["vocabulary"], context);
  }
  if (jp.contains("bounds")) {
    const auto& jb = jp["bounds"];
    if (!jb.is_object()) parse_fail(context, "bounds must be an object");
    check_keys(jb, context + ".bounds", {"min", "max"});
    p.bounds = Bounds{require_number(jb, "min", context),
                      require_number(jb, "max", context)};
  }
  if (jp.contains("center_scale")) {
    const auto& js = jp["center_scale"];
    if (!js.is_object()) parse_fail(context, "center_scale must be an object");
    check_keys(js, context + ".center_scale", {"center", "scale"});
    p.center_scale = CenterScale{require_number(js, "center", context),
                                 require_number(js, "scale", context)};
  }
  return p;
}

}  // namespace

std::string canonical_schema_json(const LogSchema& schema) {
  // nlohmann objects keep keys sorted, so dump() is already canonical.
  return schema_to_json_value(schema).dump();
}

std::string schema_fingerprint(const LogSchema& schema) {
  ValidationReport report = validate_schema(schema);
  if (!report.valid()) {
    throw Error(ErrorCode::INVALID_SCHEMA,
                "cannot fingerprint an invalid schema:\n" + report.to_text());
  }
  return to_hex16(fnv1a64(canonical_schema_json(schema)));
}

std::string schema_to_json(const LogSchema& schema) {
  return schema_to_json_value(schema).dump(2) + "\n";
}

LogSchema parse_schema(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::PARSE_FAILURE, "schema file is not valid JSON");
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::PARSE_FAILURE, "schema root must be an object");
  }
  check_keys(j, "schema",
             {"version", "identifying_fields", "entry_types", "labels"});
  LogSchema schema;
  if (!j.contains("version") || !j["version"].is_number_unsigned()) {
    parse_fail("schema", "missing positive integer 'version'");
  }
  schema.version = j["version"].get<std::uint32_t>();
  if (j.contains("labels")) {
    schema.labels = require_string_array(j["labels"], "labels");
  }
  if (!j.contains("identifying_fields") || !j["identifying_fields"].is_array()) {
    parse_fail("schema", "missing array 'identifying_fields'");
  }
  for (const auto& jf : j["identifying_fields"]) {
    const std::string context =
        "identifying_fields." +
        (jf.is_object() && jf.contains("name") && jf["name"].is_string()
             ? jf["name"].get<std::string>()
             : std::string("?"));
    if (!jf.is_object()) parse_fail(context, "field must be an object");
    check_keys(jf, context, {"name", "vocabulary", "encoding"});
    if (jf.contains("encoding")) {
      const std::string enc = require_string(jf, "encoding", context);
      if (enc != "one_hot") {
        parse_fail(context, "identifying fields are always one_hot, got '" +
                                enc + "'");
      }
    }
    IdentifyingFieldDef f;
    f.name = require_string(jf, "name", context);
    if (!jf.contains("vocabulary")) parse_fail(context, "missing vocabulary");
    f.vocabulary = require_string_array(jf["vocabulary"], context);
    schema.identifying_fields.push_back(std::move(f));
  }
  if (!j.contains("entry_types") || !j["entry_types"].is_array()) {
    parse_fail("schema", "missing array 'entry_types'");
  }
  for (const auto& jt : j["entry_types"]) {
    const std::string tname =
        jt.is_object() && jt.contains("name") && jt["name"].is_string()
            ? jt["name"].get<std::string>()
            : std::string("?");
    if (!jt.is_object()) parse_fail(tname, "entry type must be an object");
    check_keys(jt, tname, {"name", "categories"});
    EntryTypeDef t;
    t.name = require_string(jt, "name", tname);
    if (!jt.contains("categories") || !jt["categories"].is_array()) {
      parse_fail(tname, "missing array 'categories'");
    }
    for (const auto& jc : jt["categories"]) {
      const std::string cname =
          jc.is_object() && jc.contains("name") && jc["name"].is_string()
              ? jc["name"].get<std::string>()
              : std::string("?");
      const std::string context = tname + "." + cname;
      if (!jc.is_object()) parse_fail(context, "category must be an object");
      check_keys(jc, context, {"name", "params", "intrinsic_label"});
      EntryCategoryDef c;
      c.name = require_string(jc, "name", context);
      if (!jc.contains("params") || !jc["params"].is_array()) {
        parse_fail(context, "missing array 'params'");
      }
      for (const auto& jp : jc["params"]) {
        const std::string pname =
            jp.is_object() && jp.contains("name") && jp["name"].is_string()
                ? jp["name"].get<std::string>()
                : std::string("?");
        c.params.push_back(param_from_json(jp, context + "." + pname));
      }
      if (jc.contains("intrinsic_label") && !jc["intrinsic_label"].is_null()) {
        if (!jc["intrinsic_label"].is_string()) {
          parse_fail(context, "intrinsic_label must be a string");
        }
        c.intrinsic_label = jc["intrinsic_label"].get<std::string>();
      }
      t.categories.push_back(std::move(c));
    }
    schema.entry_types.push_back(std::move(t));
  }
  return schema;
}

void save_schema(const LogSchema& schema, const std::string& path) {
  write_file(path, schema_to_json(schema));
}

LogSchema load_schema(const std::string& path) {
  return parse_schema(read_file(path));
}

}  // namespace mlog
