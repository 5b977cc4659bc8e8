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

#include "mlog/emitter.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <random>

#include "mlog/encoders.hpp"
#include "mlog/util.hpp"

namespace mlog {

Clock system_clock_us() {
  return [] {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

Clock fixed_step_clock(std::int64_t start_us, std::int64_t step_us) {
  auto next = std::make_shared<std::int64_t>(start_us);
  return [next, step_us] {
    const std::int64_t now = *next;
    *next += step_us;
    return now;
  };
}

double reduce_dynamic(std::span<const double> values, Reducer reducer) {
  switch (reducer) {
    case Reducer::count:
      return static_cast<double>(values.size());
    case Reducer::sum: {
      double sum = 0.0;
      for (double v : values) sum += v;
      return sum;
    }
    case Reducer::mean: {
      if (values.empty()) {
        throw Error(ErrorCode::EMPTY_INPUT, "mean of an empty list");
      }
      double sum = 0.0;
      for (double v : values) sum += v;
      return sum / static_cast<double>(values.size());
    }
    case Reducer::max:
      if (values.empty()) return 0.0;
      return *std::max_element(values.begin(), values.end());
  }
  throw Error(ErrorCode::UNSUPPORTED_REDUCER, "unknown reducer");
}

double reduce_dynamic(std::span<const std::string> values, Reducer reducer) {
  if (reducer != Reducer::count) {
    throw Error(ErrorCode::UNSUPPORTED_REDUCER,
                "token lists only support the count reducer");
  }
  return static_cast<double>(values.size());
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// A single write under O_APPEND is atomic against other appenders on local
// POSIX filesystems for sizes up to a page; beyond that we serialize with
// an exclusive flock.
constexpr std::size_t kLocklessAppendLimit = 4096;

void write_fully(int fd, const char* data, std::size_t size) {
  std::size_t done = 0;
  while (done < size) {
    const ssize_t n = ::write(fd, data + done, size - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::IO_FAILURE,
                  std::string("write: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

void append_line_atomic(int fd, const std::string& line_with_newline) {
  if (line_with_newline.size() <= kLocklessAppendLimit) {
    write_fully(fd, line_with_newline.data(), line_with_newline.size());
    return;
  }
  if (::flock(fd, LOCK_EX) != 0) {
    throw Error(ErrorCode::IO_FAILURE,
                std::string("flock: ") + std::strerror(errno));
  }
  write_fully(fd, line_with_newline.data(), line_with_newline.size());
  ::flock(fd, LOCK_UN);
}

int open_append(const std::string& path, bool read_write) {
  const int flags = (read_write ? O_RDWR : O_WRONLY) | O_CREAT | O_APPEND |
                    O_CLOEXEC;
  const int fd = ::open(path.c_str(), flags, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::IO_FAILURE,
                path + ": " + std::strerror(errno));
  }
  return fd;
}

}  // namespace

EncodedEvent encode_event(const LogSchema& schema, std::string_view type,
                          std::string_view category,
                          std::span<const std::string> identifying,
                          std::span<const RawValue> params,
                          const NumericEncodeHook& hook) {
  const EntryCategoryDef* cat = schema.find_category(type, category);
  if (cat == nullptr) {
    throw Error(ErrorCode::UNKNOWN_TYPE_OR_CATEGORY,
                std::string(type) + "." + std::string(category));
  }
  if (identifying.size() != schema.identifying_fields.size()) {
    throw Error(ErrorCode::ARITY_MISMATCH,
                std::to_string(identifying.size()) +
                    " identifying values, schema defines " +
                    std::to_string(schema.identifying_fields.size()));
  }
  if (params.size() != cat->params.size()) {
    throw Error(ErrorCode::ARITY_MISMATCH,
                std::string(type) + "." + std::string(category) + " takes " +
                    std::to_string(cat->params.size()) +
                    " parameters, got " + std::to_string(params.size()));
  }

  EncodedEvent event;
  event.type_index = *schema.type_index(type);
  event.category_index = *schema.category_index(type, category);
  event.raw.reserve(identifying.size() + params.size());

  for (std::size_t i = 0; i < identifying.size(); ++i) {
    const auto& field = schema.identifying_fields[i];
    const auto bits = one_hot_encode(identifying[i], field.vocabulary);
    event.encoded.insert(event.encoded.end(), bits.begin(), bits.end());
    event.raw.push_back(RawValue(identifying[i]));
  }

  for (std::size_t i = 0; i < params.size(); ++i) {
    const ParameterSpec& spec = cat->params[i];
    if (spec.categorical()) {
      if (raw_is_number(params[i])) {
        throw Error(ErrorCode::UNKNOWN_TOKEN,
                    spec.name + " is categorical and needs a token");
      }
      const std::string& token = raw_token(params[i]);
      switch (spec.encoding) {
        case Encoding::one_hot: {
          const auto bits = one_hot_encode(token, spec.vocabulary);
          event.encoded.insert(event.encoded.end(), bits.begin(), bits.end());
          break;
        }
        case Encoding::bit:
          event.encoded.push_back(bit_encode(token, spec.vocabulary));
          break;
        default: {
          const auto matrix =
              contrast_matrix(spec.encoding, spec.vocabulary.size());
          std::size_t level = spec.vocabulary.size();
          for (std::size_t v = 0; v < spec.vocabulary.size(); ++v) {
            if (spec.vocabulary[v] == token) level = v;
          }
          if (level == spec.vocabulary.size()) {
            throw Error(ErrorCode::UNKNOWN_TOKEN,
                        "'" + token + "' is not in the vocabulary of " +
                            spec.name);
          }
          const auto row = contrast_encode(level, matrix);
          event.encoded.insert(event.encoded.end(), row.begin(), row.end());
          break;
        }
      }
      event.raw.push_back(params[i]);
      continue;
    }

    const double x = raw_number(params[i]);
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::NONFINITE_VALUE, spec.name);
    }
    std::optional<double> hooked;
    if (hook) hooked = hook(spec, x);
    if (hooked) {
      event.encoded.push_back(*hooked);
    } else {
      switch (spec.encoding) {
        case Encoding::minmax:
          event.encoded.push_back(
              minmax_normalize(x, spec.bounds->min, spec.bounds->max));
          break;
        case Encoding::sigmoid:
          event.encoded.push_back(sigmoid_normalize(
              x, spec.center_scale->center, spec.center_scale->scale));
          break;
        case Encoding::tanh:
          event.encoded.push_back(tanh_normalize(
              x, spec.center_scale->center, spec.center_scale->scale));
          break;
        case Encoding::quantile_gaussian:
          throw Error(ErrorCode::INSUFFICIENT_STATE,
                      spec.name +
                          " needs a stateful writer for quantile_gaussian");
        default:
          throw Error(ErrorCode::LEVEL_ENCODING_MISMATCH, spec.name);
      }
    }
    event.raw.push_back(params[i]);
  }

  if (cat->intrinsic_label) event.label = *cat->intrinsic_label;
  return event;
}

Writer::Writer(const LogSchema& schema, const std::string& ai_path,
               const std::string& human_path, WriterOptions options)
    : schema_(schema), ai_path_(ai_path), options_(std::move(options)) {
  const ValidationReport report = validate_schema(schema_);
  if (!report.valid()) {
    throw Error(ErrorCode::INVALID_SCHEMA, "\n" + report.to_text());
  }
  if (!is_valid_name(options_.writer_id)) {
    throw Error(ErrorCode::INVALID_NAME,
                "writer_id must match [A-Za-z0-9_-]+");
  }
  fingerprint_ = schema_fingerprint(schema_);
  if (!options_.clock) options_.clock = system_clock_us();
  if (options_.link_seed == 0) {
    std::random_device rd;
    link_rng_state_ =
        (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ 0x9e3779b97f4a7c15ull;
  } else {
    link_rng_state_ = options_.link_seed;
  }

  ai_fd_ = open_append(ai_path_, /*read_write=*/true);
  if (::flock(ai_fd_, LOCK_EX) != 0) {
    throw Error(ErrorCode::IO_FAILURE,
                std::string("flock: ") + std::strerror(errno));
  }
  struct stat st{};
  if (::fstat(ai_fd_, &st) != 0) {
    ::flock(ai_fd_, LOCK_UN);
    throw Error(ErrorCode::IO_FAILURE,
                std::string("fstat: ") + std::strerror(errno));
  }
  try {
    if (st.st_size == 0) {
      const std::string header = ai_header(fingerprint_) + "\n";
      write_fully(ai_fd_, header.data(), header.size());
    } else {
      const std::string content = read_file(ai_path_);
      const std::size_t eol = content.find('\n');
      const auto fp = parse_ai_header(
          std::string_view(content).substr(0, eol == std::string::npos
                                                  ? content.size()
                                                  : eol));
      if (!fp) {
        throw Error(ErrorCode::MALFORMED_LINE,
                    ai_path_ + " does not start with an mlog header");
      }
      if (*fp != fingerprint_) {
        throw Error(ErrorCode::SCHEMA_MISMATCH,
                    ai_path_ + " was written under fingerprint " + *fp +
                        ", writer schema is " + fingerprint_);
      }
      // Resume the per-writer sequence so seq stays gap-free and strictly
      // increasing within the file.
      for (const auto line : split(content, '\n')) {
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line, '|');
        if (fields.size() != 9 || fields[1] != options_.writer_id) continue;
        std::uint64_t seq = 0;
        auto [ptr, ec] =
            std::from_chars(fields[2].data(),
                            fields[2].data() + fields[2].size(), seq);
        if (ec == std::errc() && ptr == fields[2].data() + fields[2].size()) {
          seq_ = std::max(seq_, seq + 1);
        }
      }
    }
  } catch (...) {
    ::flock(ai_fd_, LOCK_UN);
    ::close(ai_fd_);
    ai_fd_ = -1;
    throw;
  }
  ::flock(ai_fd_, LOCK_UN);

  if (!human_path.empty()) {
    human_fd_ = open_append(human_path, /*read_write=*/false);
  }
}

Writer::Writer(Writer&& other) noexcept
    : schema_(std::move(other.schema_)),
      fingerprint_(std::move(other.fingerprint_)),
      ai_path_(std::move(other.ai_path_)),
      options_(std::move(other.options_)),
      ai_fd_(std::exchange(other.ai_fd_, -1)),
      human_fd_(std::exchange(other.human_fd_, -1)),
      seq_(other.seq_),
      link_rng_state_(other.link_rng_state_),
      params_(std::move(other.params_)),
      pending_(std::move(other.pending_)) {}

Writer& Writer::operator=(Writer&& other) noexcept {
  if (this != &other) {
    if (ai_fd_ >= 0) ::close(ai_fd_);
    if (human_fd_ >= 0) ::close(human_fd_);
    schema_ = std::move(other.schema_);
    fingerprint_ = std::move(other.fingerprint_);
    ai_path_ = std::move(other.ai_path_);
    options_ = std::move(other.options_);
    ai_fd_ = std::exchange(other.ai_fd_, -1);
    human_fd_ = std::exchange(other.human_fd_, -1);
    seq_ = other.seq_;
    link_rng_state_ = other.link_rng_state_;
    params_ = std::move(other.params_);
    pending_ = std::move(other.pending_);
  }
  return *this;
}

Writer::~Writer() {
  if (ai_fd_ >= 0) ::close(ai_fd_);
  if (human_fd_ >= 0) ::close(human_fd_);
}

std::string Writer::generate_link_id() {
  return to_hex16(splitmix64(link_rng_state_)) +
         to_hex16(splitmix64(link_rng_state_));
}

void Writer::append_ai_line(const std::string& line) {
  append_line_atomic(ai_fd_, line + "\n");
}

Writer::ParamRuntime& Writer::runtime_for(std::string_view type,
                                          std::string_view category,
                                          const ParameterSpec& spec) {
  const std::string path = std::string(type) + "." + std::string(category) +
                           "." + spec.name;
  auto it = params_.find(path);
  if (it == params_.end()) {
    ParamId id{std::string(type), std::string(category), spec.name};
    const std::uint64_t seed =
        options_.reservoir_seed ^ fnv1a64(path) ^ 0x6d6c6f67ull;
    it = params_
             .emplace(path, ParamRuntime{RunningStats(
                                             std::move(id),
                                             options_.reservoir_capacity,
                                             seed),
                                         std::nullopt, std::nullopt})
             .first;
  }
  return it->second;
}

void Writer::append_marker(const ParamId& param, const EncoderSwitch& sw) {
  AiLogRecord marker;
  marker.schema_fp = fingerprint_;
  marker.writer_id = options_.writer_id;
  marker.seq = seq_++;
  marker.timestamp_us = options_.clock();
  marker.link_id = generate_link_id();
  marker.type_index = kMetaTypeIndex;
  marker.category_index = 0;
  marker.raw = {RawValue(param.to_text()),
                RawValue(std::string(to_string(sw.encoding))),
                RawValue(sw.center), RawValue(sw.scale)};
  append_ai_line(serialize_record(marker));
}

std::optional<double> Writer::encode_numeric(std::string_view type,
                                             std::string_view category,
                                             const ParameterSpec& spec,
                                             double x) {
  ParamRuntime& runtime = runtime_for(type, category, spec);
  observe(runtime.stats, x);
  if (runtime.switched) {
    return tanh_normalize(x, runtime.switched->center,
                          runtime.switched->scale);
  }
  switch (spec.encoding) {
    case Encoding::minmax: {
      Bounds bounds = runtime.effective_bounds.value_or(*spec.bounds);
      if (x < bounds.min || x > bounds.max) {
        const PolicyOutcome outcome =
            apply_policy(ai_path_, runtime.stats, options_.range_policy, spec,
                         bounds, x);
        if (outcome.encoder_switch) {
          runtime.switched = outcome.encoder_switch;
          append_marker(runtime.stats.param_id, *outcome.encoder_switch);
          return tanh_normalize(x, outcome.encoder_switch->center,
                                outcome.encoder_switch->scale);
        }
        runtime.effective_bounds = outcome.new_bounds;
        bounds = outcome.new_bounds;
        if (outcome.job) {
          pending_.insert_or_assign(runtime.stats.param_id.to_text(),
                                    *outcome.job);
        }
      }
      return minmax_normalize(x, bounds.min, bounds.max);
    }
    case Encoding::quantile_gaussian:
      // First observation has no distribution yet; the midpoint quantile
      // maps to 0, which is also what gaussian_map converges to.
      if (runtime.stats.quantiles.count() < 2) return 0.0;
      return gaussian_map(x, runtime.stats.quantiles);
    default:
      return std::nullopt;  // sigmoid/tanh use the spec constants
  }
}

std::string Writer::log_event(std::string_view type, std::string_view category,
                              const std::vector<std::string>& identifying,
                              const std::vector<RawValue>& params,
                              const std::optional<std::string>& human_text) {
  const NumericEncodeHook hook = [this, type, category](
                                     const ParameterSpec& spec, double x) {
    return encode_numeric(type, category, spec, x);
  };
  const EncodedEvent event =
      encode_event(schema_, type, category, identifying, params, hook);

  AiLogRecord record;
  record.schema_fp = fingerprint_;
  record.writer_id = options_.writer_id;
  record.seq = seq_++;
  record.timestamp_us = options_.clock();
  record.link_id = generate_link_id();
  record.type_index = event.type_index;
  record.category_index = event.category_index;
  record.encoded = std::move(event.encoded);
  record.raw = std::move(event.raw);
  record.label = std::move(event.label);
  append_ai_line(serialize_record(record));

  if (human_text && human_fd_ >= 0) {
    HumanLogRecord human{record.timestamp_us, record.link_id, *human_text};
    append_line_atomic(human_fd_, serialize_human(human) + "\n");
  }
  return record.link_id;
}

std::vector<RenormalizationJob> Writer::pending_renormalizations() const {
  std::vector<RenormalizationJob> jobs;
  jobs.reserve(pending_.size());
  for (const auto& [_, job] : pending_) jobs.push_back(job);
  return jobs;
}

}  // namespace mlog
