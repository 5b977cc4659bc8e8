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
// Runtime tracking of per-parameter bounds and the three strategies for
// values that escape the current normalization range: traverse (rewrite
// history), ignore (shift forward), robust (switch to tanh).

#ifndef MLOG_NORM_STATE_HPP
#define MLOG_NORM_STATE_HPP

#include <optional>
#include <string>
#include <vector>

#include "mlog/encoders.hpp"
#include "mlog/schema.hpp"

namespace mlog {

struct ParamId {
  std::string type;
  std::string category;
  std::string name;

  std::string to_text() const { return type + "." + category + "." + name; }
  static ParamId parse(std::string_view text);  // PARSE_FAILURE

  bool operator==(const ParamId&) const = default;
};

struct RunningStats {
  ParamId param_id;
  double observed_min = 0.0;
  double observed_max = 0.0;
  std::uint64_t count = 0;
  QuantileState quantiles;

  RunningStats() = default;
  RunningStats(ParamId id, std::size_t reservoir_capacity,
               std::uint64_t reservoir_seed)
      : param_id(std::move(id)),
        quantiles(reservoir_capacity, reservoir_seed) {}
};

enum class RangeEvent { none, expanded_min, expanded_max };

// Bounds only ever grow; the first observation defines both and reports
// expanded_max.
RangeEvent observe(RunningStats& stats, double x);  // NONFINITE_VALUE

enum class RangeStrategy { none, traverse, ignore, robust };

struct RangePolicy {
  RangeStrategy strategy = RangeStrategy::none;
  double expansion_margin = 0.0;  // traverse only; sanity-capped below 10
};

std::string_view to_string(RangeStrategy strategy);
std::optional<RangeStrategy> parse_range_strategy(std::string_view token);

struct RenormalizationJob {
  std::string ai_log_path;
  ParamId param;
  Bounds new_bounds;
};

struct EncoderSwitch {
  Encoding encoding = Encoding::tanh;
  double center = 0.0;
  double scale = 1.0;
};

struct PolicyOutcome {
  RangeStrategy strategy = RangeStrategy::none;
  Bounds new_bounds;                            // effective from now on
  std::optional<RenormalizationJob> job;        // traverse
  bool historical_inconsistency = false;        // ignore
  std::optional<EncoderSwitch> encoder_switch;  // robust
};

// Resolves one out-of-range observation of a minmax parameter under the
// given policy. `current` is the bounds the writer has been encoding with.
// Strategy none rejects with OUT_OF_RANGE; non-minmax specs are
// UNSUPPORTED_FOR_ENCODING.
PolicyOutcome apply_policy(const std::string& ai_log_path, RunningStats& stats,
                           const RangePolicy& policy, const ParameterSpec& spec,
                           const Bounds& current, double x);

struct RenormalizeSummary {
  std::size_t records_total = 0;
  std::size_t records_rewritten = 0;
};

// Re-encodes one parameter of every matching record from its stored raw
// value under the new bounds, leaving every other byte untouched. Rewrites
// to a sibling file and atomically swaps it in.
RenormalizeSummary renormalize_log(const std::string& ai_log_path,
                                   const LogSchema& schema,
                                   const ParamId& param,
                                   const Bounds& new_bounds);

}  // namespace mlog

#endif  // MLOG_NORM_STATE_HPP
