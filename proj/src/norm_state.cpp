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

#include "mlog/norm_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlog/record.hpp"
#include "mlog/util.hpp"

namespace mlog {

ParamId ParamId::parse(std::string_view text) {
  const auto parts = split(text, '.');
  if (parts.size() != 3 || parts[0].empty() || parts[1].empty() ||
      parts[2].empty()) {
    throw Error(ErrorCode::PARSE_FAILURE,
                "parameter id must be type.category.name, got '" +
                    std::string(text) + "'");
  }
  return ParamId{std::string(parts[0]), std::string(parts[1]),
                 std::string(parts[2])};
}

RangeEvent observe(RunningStats& stats, double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::NONFINITE_VALUE, "cannot observe non-finite value");
  }
  stats.quantiles.observe(x);
  if (stats.count == 0) {
    stats.observed_min = stats.observed_max = x;
    stats.count = 1;
    return RangeEvent::expanded_max;
  }
  ++stats.count;
  if (x < stats.observed_min) {
    stats.observed_min = x;
    return RangeEvent::expanded_min;
  }
  if (x > stats.observed_max) {
    stats.observed_max = x;
    return RangeEvent::expanded_max;
  }
  return RangeEvent::none;
}

std::string_view to_string(RangeStrategy strategy) {
  switch (strategy) {
    case RangeStrategy::none: return "none";
    case RangeStrategy::traverse: return "traverse";
    case RangeStrategy::ignore: return "ignore";
    case RangeStrategy::robust: return "robust";
  }
  return "?";
}

std::optional<RangeStrategy> parse_range_strategy(std::string_view token) {
  for (RangeStrategy s : {RangeStrategy::none, RangeStrategy::traverse,
                          RangeStrategy::ignore, RangeStrategy::robust}) {
    if (token == to_string(s)) return s;
  }
  return std::nullopt;
}

namespace {

Bounds expand_bounds(const Bounds& current, double x, double margin) {
  Bounds expanded = current;
  if (x > current.max) {
    expanded.max = x + margin * (x - current.min);
  } else if (x < current.min) {
    expanded.min = x - margin * (current.max - x);
  }
  return expanded;
}

}  // namespace

PolicyOutcome apply_policy(const std::string& ai_log_path, RunningStats& stats,
                           const RangePolicy& policy, const ParameterSpec& spec,
                           const Bounds& current, double x) {
  if (spec.encoding != Encoding::minmax) {
    throw Error(ErrorCode::UNSUPPORTED_FOR_ENCODING,
                "range policies apply to minmax parameters only, " +
                    spec.name + " uses " + std::string(to_string(spec.encoding)));
  }
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::NONFINITE_VALUE, "out-of-range value not finite");
  }
  if (!(policy.expansion_margin >= 0.0) || policy.expansion_margin >= 10.0) {
    throw Error(ErrorCode::OUT_OF_RANGE,
                "expansion_margin must be in [0, 10)");
  }

  PolicyOutcome outcome;
  outcome.strategy = policy.strategy;
  switch (policy.strategy) {
    case RangeStrategy::none:
      throw Error(ErrorCode::OUT_OF_RANGE,
                  stats.param_id.to_text() + ": " + format_raw_number(x) +
                      " outside [" + format_raw_number(current.min) + ", " +
                      format_raw_number(current.max) + "] and no policy set");
    case RangeStrategy::traverse: {
      outcome.new_bounds = expand_bounds(current, x, policy.expansion_margin);
      outcome.job = RenormalizationJob{ai_log_path, stats.param_id,
                                       outcome.new_bounds};
      return outcome;
    }
    case RangeStrategy::ignore: {
      outcome.new_bounds = expand_bounds(current, x, 0.0);
      outcome.historical_inconsistency = true;
      return outcome;
    }
    case RangeStrategy::robust: {
      outcome.new_bounds = current;
      const double center = stats.quantiles.median();
      const double scale =
          std::max(stats.quantiles.interquartile_range() / 2.0, 1e-9);
      outcome.encoder_switch = EncoderSwitch{Encoding::tanh, center, scale};
      return outcome;
    }
  }
  throw Error(ErrorCode::OUT_OF_RANGE, "unreachable strategy");
}

RenormalizeSummary renormalize_log(const std::string& ai_log_path,
                                   const LogSchema& schema,
                                   const ParamId& param,
                                   const Bounds& new_bounds) {
  if (!(new_bounds.min < new_bounds.max)) {
    throw Error(ErrorCode::BOUNDS_ORDER, "min must be < max");
  }
  const EntryCategoryDef* category =
      schema.find_category(param.type, param.category);
  if (category == nullptr) {
    throw Error(ErrorCode::UNKNOWN_TYPE_OR_CATEGORY,
                param.type + "." + param.category);
  }
  std::size_t param_pos = category->params.size();
  for (std::size_t i = 0; i < category->params.size(); ++i) {
    if (category->params[i].name == param.name) param_pos = i;
  }
  if (param_pos == category->params.size()) {
    throw Error(ErrorCode::UNKNOWN_PARAMETER, param.to_text());
  }
  if (category->params[param_pos].encoding != Encoding::minmax) {
    throw Error(ErrorCode::UNSUPPORTED_FOR_ENCODING,
                param.to_text() + " is not minmax-encoded");
  }
  const Layout layout = vector_layout(schema, param.type, param.category);
  const LayoutSegment* segment =
      layout.find(SegmentKind::parameter, param.name);
  const std::size_t type_index = *schema.type_index(param.type);
  const std::size_t category_index =
      *schema.category_index(param.type, param.category);
  const std::size_t raw_index =
      schema.identifying_fields.size() + param_pos;

  const std::string content = read_file(ai_log_path);
  std::ostringstream rewritten;
  RenormalizeSummary summary;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    const bool had_newline = end != std::string::npos;
    if (!had_newline) end = content.size();
    const std::string_view line(content.data() + start, end - start);
    ++line_no;
    start = end + 1;

    auto passthrough = [&] {
      rewritten << line;
      if (had_newline) rewritten << '\n';
    };

    if (line.empty() || line.front() == '#') {
      passthrough();
      continue;
    }
    const auto fields = split(line, '|');
    if (fields.size() != 9) {
      throw Error(ErrorCode::MALFORMED_LINE,
                  ai_log_path + ":" + std::to_string(line_no));
    }
    const std::string index_tag =
        std::to_string(type_index) + "." + std::to_string(category_index);
    ++summary.records_total;
    if (fields[5] != index_tag) {
      passthrough();
      continue;
    }
    // Only the one encoded cell changes; every other byte is copied through.
    auto encoded_cells = split(fields[6], ',');
    auto raw_cells = split(fields[7], ',');
    if (encoded_cells.size() != layout.total_width ||
        segment->offset >= encoded_cells.size()) {
      throw Error(ErrorCode::WIDTH_MISMATCH,
                  ai_log_path + ":" + std::to_string(line_no));
    }
    if (raw_index >= raw_cells.size() || raw_cells[raw_index].empty()) {
      throw Error(ErrorCode::RAW_VALUE_MISSING,
                  param.to_text() + " at " + ai_log_path + ":" +
                      std::to_string(line_no));
    }
    const double raw = parse_number(raw_cells[raw_index]);
    if (raw < new_bounds.min || raw > new_bounds.max) {
      throw Error(ErrorCode::VALUE_OUTSIDE_NEW_BOUNDS,
                  format_raw_number(raw) + " at " + ai_log_path + ":" +
                      std::to_string(line_no) + " outside [" +
                      format_raw_number(new_bounds.min) + ", " +
                      format_raw_number(new_bounds.max) + "]");
    }
    const std::string re_encoded = format_encoded(
        (raw - new_bounds.min) / (new_bounds.max - new_bounds.min));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) rewritten << '|';
      if (i != 6) {
        rewritten << fields[i];
        continue;
      }
      for (std::size_t cell = 0; cell < encoded_cells.size(); ++cell) {
        if (cell > 0) rewritten << ',';
        if (cell == segment->offset) {
          rewritten << re_encoded;
        } else {
          rewritten << encoded_cells[cell];
        }
      }
    }
    if (had_newline) rewritten << '\n';
    ++summary.records_rewritten;
  }

  write_file_atomic(ai_log_path, rewritten.str());
  return summary;
}

}  // namespace mlog
