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

#include "mlog/encoders.hpp"

#include <algorithm>
#include <cmath>

#include "mlog/error.hpp"

namespace mlog {

namespace {

std::size_t vocabulary_index(std::string_view value,
                             std::span<const std::string> vocabulary) {
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    if (vocabulary[i] == value) return i;
  }
  throw Error(ErrorCode::UNKNOWN_TOKEN,
              "'" + std::string(value) + "' is not in the vocabulary");
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<double> one_hot_encode(std::string_view value,
                                   std::span<const std::string> vocabulary) {
  std::vector<double> bits(vocabulary.size(), 0.0);
  bits[vocabulary_index(value, vocabulary)] = 1.0;
  return bits;
}

std::string one_hot_decode(std::span<const double> bits,
                           std::span<const std::string> vocabulary) {
  if (bits.size() != vocabulary.size()) {
    throw Error(ErrorCode::MALFORMED_ONE_HOT,
                "bit vector length does not match the vocabulary");
  }
  std::size_t set_index = 0;
  std::size_t set_count = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == 1.0) {
      set_index = i;
      ++set_count;
    } else if (bits[i] != 0.0) {
      throw Error(ErrorCode::MALFORMED_ONE_HOT, "non-binary entry");
    }
  }
  if (set_count != 1) {
    throw Error(ErrorCode::MALFORMED_ONE_HOT,
                std::to_string(set_count) + " bits set");
  }
  return vocabulary[set_index];
}

double bit_encode(std::string_view value, std::span<const std::string> pair) {
  if (pair.size() != 2) {
    throw Error(ErrorCode::VOCAB_SIZE, "dichotomous pair must have 2 tokens");
  }
  return vocabulary_index(value, pair) == 0 ? 0.0 : 1.0;
}

namespace {

ContrastMatrix backward_difference_matrix(std::size_t k) {
  // Row i, column j (0-based): -(k-1-j)/k above the step, (j+1)/k below it.
  // This is the inverse of the intercept + adjacent-differences hypothesis
  // matrix, which the oracle in the test suite rebuilds from scratch.
  ContrastMatrix m{Encoding::backward_difference, k, {}};
  m.rows.assign(k, std::vector<double>(k - 1, 0.0));
  const double n = static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j + 1 < k; ++j) {
      m.rows[i][j] = i <= j ? -(n - 1.0 - static_cast<double>(j)) / n
                            : (static_cast<double>(j) + 1.0) / n;
    }
  }
  return m;
}

ContrastMatrix helmert_matrix(std::size_t k) {
  // Column j contrasts level j against the mean of levels j+1..k-1.
  ContrastMatrix m{Encoding::helmert, k, {}};
  m.rows.assign(k, std::vector<double>(k - 1, 0.0));
  for (std::size_t j = 0; j + 1 < k; ++j) {
    const double tail = static_cast<double>(k - j - 1);
    m.rows[j][j] = tail / (tail + 1.0);
    for (std::size_t i = j + 1; i < k; ++i) {
      m.rows[i][j] = -1.0 / (tail + 1.0);
    }
  }
  return m;
}

ContrastMatrix orthogonal_polynomial_matrix(std::size_t k) {
  // Powers 0..k-1 evaluated on levels 1..k, then two passes of modified
  // Gram-Schmidt for orthonormal columns; the constant column is dropped.
  std::vector<std::vector<double>> cols(k, std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < k; ++i) {
      cols[j][i] = std::pow(static_cast<double>(i + 1), static_cast<double>(j));
    }
  }
  auto dot = [k](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += a[i] * b[i];
    return s;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t prev = 0; prev < j; ++prev) {
        const double proj = dot(cols[j], cols[prev]);
        for (std::size_t i = 0; i < k; ++i) cols[j][i] -= proj * cols[prev][i];
      }
      const double norm = std::sqrt(dot(cols[j], cols[j]));
      for (std::size_t i = 0; i < k; ++i) cols[j][i] /= norm;
    }
  }
  ContrastMatrix m{Encoding::orthogonal_polynomial, k, {}};
  m.rows.assign(k, std::vector<double>(k - 1, 0.0));
  for (std::size_t j = 1; j < k; ++j) {
    const double sign = cols[j][k - 1] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < k; ++i) m.rows[i][j - 1] = sign * cols[j][i];
  }
  return m;
}

}  // namespace

ContrastMatrix contrast_matrix(Encoding kind, std::size_t k) {
  if (k < 2) {
    throw Error(ErrorCode::K_TOO_SMALL,
                "contrast coding needs k >= 2, got " + std::to_string(k));
  }
  switch (kind) {
    case Encoding::backward_difference: return backward_difference_matrix(k);
    case Encoding::helmert: return helmert_matrix(k);
    case Encoding::orthogonal_polynomial:
      return orthogonal_polynomial_matrix(k);
    default:
      throw Error(ErrorCode::LEVEL_ENCODING_MISMATCH,
                  std::string(to_string(kind)) + " is not a contrast coding");
  }
}

std::vector<double> contrast_encode(std::size_t level_index,
                                    const ContrastMatrix& matrix) {
  if (level_index >= matrix.k) {
    throw Error(ErrorCode::INDEX_OUT_OF_RANGE,
                "level " + std::to_string(level_index) + " of " +
                    std::to_string(matrix.k));
  }
  return matrix.rows[level_index];
}

double minmax_normalize(double x, double min, double max) {
  if (!(min < max)) {
    throw Error(ErrorCode::BOUNDS_ORDER, "min must be < max");
  }
  if (x < min || x > max) {
    throw Error(ErrorCode::OUT_OF_RANGE,
                std::to_string(x) + " outside [" + std::to_string(min) + ", " +
                    std::to_string(max) + "]");
  }
  return (x - min) / (max - min);
}

double minmax_denormalize(double y, double min, double max) {
  if (!(min < max)) {
    throw Error(ErrorCode::BOUNDS_ORDER, "min must be < max");
  }
  return min + y * (max - min);
}

double sigmoid_normalize(double x, double center, double scale) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::NONPOSITIVE_SCALE, "scale must be positive");
  }
  return 1.0 / (1.0 + std::exp(-(x - center) / scale));
}

double tanh_normalize(double x, double center, double scale) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::NONPOSITIVE_SCALE, "scale must be positive");
  }
  return std::tanh((x - center) / scale);
}

double inv_norm_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw Error(ErrorCode::OUT_OF_RANGE, "p must be inside (0,1)");
  }
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against Phi(x) = erfc(-x/sqrt(2))/2.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

QuantileState::QuantileState(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity == 0 ? 1 : capacity), rng_state_(seed) {}

void QuantileState::observe(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::NONFINITE_VALUE, "cannot observe non-finite value");
  }
  ++count_;
  if (sorted_.size() < capacity_) {
    sorted_.insert(std::lower_bound(sorted_.begin(), sorted_.end(), x), x);
    return;
  }
  // Algorithm R: keep with probability capacity/count, evicting a uniformly
  // chosen reservoir slot.
  const std::uint64_t pick = splitmix64(rng_state_) % count_;
  if (pick < capacity_) {
    sorted_.erase(sorted_.begin() +
                  static_cast<std::ptrdiff_t>(splitmix64(rng_state_) %
                                              sorted_.size()));
    sorted_.insert(std::lower_bound(sorted_.begin(), sorted_.end(), x), x);
  }
}

double QuantileState::quantile(double p) const {
  if (sorted_.empty()) {
    throw Error(ErrorCode::INSUFFICIENT_STATE, "no observations");
  }
  if (p <= 0.0) return sorted_.front();
  if (p >= 1.0) return sorted_.back();
  const double n = static_cast<double>(sorted_.size());
  const double np = p * n;
  const double rounded = std::round(np);
  if (std::abs(np - rounded) < 1e-9) {
    const std::size_t lo = static_cast<std::size_t>(rounded);  // 1-based
    if (lo >= sorted_.size()) return sorted_.back();
    return 0.5 * (sorted_[lo - 1] + sorted_[lo]);
  }
  const std::size_t idx = static_cast<std::size_t>(std::ceil(np));  // 1-based
  return sorted_[std::min(idx, sorted_.size()) - 1];
}

double gaussian_map(double x, const QuantileState& state) {
  const auto reservoir = state.reservoir();
  if (state.count() < 2 || reservoir.size() < 2) {
    throw Error(ErrorCode::INSUFFICIENT_STATE,
                "gaussian_map needs at least 2 observations");
  }
  const auto lower =
      std::lower_bound(reservoir.begin(), reservoir.end(), x) -
      reservoir.begin();
  const auto upper =
      std::upper_bound(reservoir.begin(), reservoir.end(), x) -
      reservoir.begin();
  const double n = static_cast<double>(reservoir.size());
  // Mid-rank: ties contribute half their mass, keeping the map monotone.
  double p = (static_cast<double>(lower) +
              0.5 * static_cast<double>(upper - lower)) /
             n;
  p = std::clamp(p, 1.0 / (2.0 * n), 1.0 - 1.0 / (2.0 * n));
  return inv_norm_cdf(p);
}

}  // namespace mlog
