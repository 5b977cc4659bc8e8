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
// The developer-facing logging API: builds dual entries (human text plus
// numeric AI record) with shared link ids, enforces fixed arity, and appends
// atomically to one shared AI log from multiple concurrent writers.

#ifndef MLOG_EMITTER_HPP
#define MLOG_EMITTER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlog/norm_state.hpp"
#include "mlog/record.hpp"
#include "mlog/schema.hpp"

namespace mlog {

// Microseconds since the Unix epoch. Timestamps are the only
// non-deterministic field in normal operation; tests inject a fixed-step
// clock for reproducible fixtures.
using Clock = std::function<std::int64_t()>;

Clock system_clock_us();
Clock fixed_step_clock(std::int64_t start_us, std::int64_t step_us);

enum class Reducer { count, sum, mean, max };

// Collapses dynamic collections to a fixed-arity scalar. mean of an empty
// list is EMPTY_INPUT; sum/count/max of nothing are 0.
double reduce_dynamic(std::span<const double> values, Reducer reducer);
double reduce_dynamic(std::span<const std::string> values, Reducer reducer);

struct EncodedEvent {
  std::size_t type_index = 0;
  std::size_t category_index = 0;
  std::vector<double> encoded;
  std::vector<RawValue> raw;
  std::string label;
};

// Lets a stateful caller take over scalar encoding of numeric parameters
// (effective bounds after a policy decision, robust tanh switches, quantile
// reservoirs). nullopt falls back to the spec constants.
using NumericEncodeHook = std::function<std::optional<double>(
    const ParameterSpec& spec, double x)>;

// Pure event encoding: identifying one-hots in field order, then parameter
// blocks in spec order; raw values retained verbatim; label from the
// category's intrinsic_label. The stateless core shared by the writer,
// migration commutation checks and tests.
EncodedEvent encode_event(const LogSchema& schema, std::string_view type,
                          std::string_view category,
                          std::span<const std::string> identifying,
                          std::span<const RawValue> params,
                          const NumericEncodeHook& hook = {});

struct WriterOptions {
  std::string writer_id = "w0";
  RangePolicy range_policy{};
  std::uint64_t link_seed = 0;  // 0 draws a nondeterministic seed
  Clock clock{};                // empty -> system clock
  std::size_t reservoir_capacity = 1024;
  std::uint64_t reservoir_seed = 1;
};

// A Writer is used from one thread at a time; any number of writers (same
// or different processes) may append to the same file concurrently. Each
// record goes out as one O_APPEND write; lines beyond the conservative
// single-write guarantee are serialized under an exclusive flock instead.
class Writer {
 public:
  Writer(const LogSchema& schema, const std::string& ai_path,
         const std::string& human_path, WriterOptions options);
  Writer(Writer&& other) noexcept;
  Writer& operator=(Writer&& other) noexcept;
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;
  ~Writer();

  // Appends exactly one AI record (plus a linked human line when text is
  // given) and returns the shared link id. Fixed arity: value counts must
  // equal the schema's field and parameter counts.
  std::string log_event(std::string_view type, std::string_view category,
                        const std::vector<std::string>& identifying,
                        const std::vector<RawValue>& params,
                        const std::optional<std::string>& human_text =
                            std::nullopt);

  const LogSchema& schema() const { return schema_; }
  const std::string& fingerprint() const { return fingerprint_; }
  const std::string& ai_path() const { return ai_path_; }
  std::uint64_t next_seq() const { return seq_; }

  // Latest traverse-expansion per parameter, to be executed offline via
  // renormalize_log once this writer is done with the file.
  std::vector<RenormalizationJob> pending_renormalizations() const;

 private:
  struct ParamRuntime {
    RunningStats stats;
    std::optional<Bounds> effective_bounds;
    std::optional<EncoderSwitch> switched;
  };

  ParamRuntime& runtime_for(std::string_view type, std::string_view category,
                            const ParameterSpec& spec);
  std::string generate_link_id();
  void append_ai_line(const std::string& line);
  void append_marker(const ParamId& param, const EncoderSwitch& sw);
  std::optional<double> encode_numeric(std::string_view type,
                                       std::string_view category,
                                       const ParameterSpec& spec, double x);

  LogSchema schema_;
  std::string fingerprint_;
  std::string ai_path_;
  WriterOptions options_;
  int ai_fd_ = -1;
  int human_fd_ = -1;
  std::uint64_t seq_ = 0;
  std::uint64_t link_rng_state_ = 0;
  std::map<std::string, ParamRuntime> params_;
  std::map<std::string, RenormalizationJob> pending_;
};

}  // namespace mlog

#endif  // MLOG_EMITTER_HPP
