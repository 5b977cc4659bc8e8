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
// Pure encoding and normalization primitives. Everything here is a function
// of its arguments only; QuantileState is a value owned by a single writer.

#ifndef MLOG_ENCODERS_HPP
#define MLOG_ENCODERS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlog/schema.hpp"

namespace mlog {

// Exactly one bit set, at the token's vocabulary index. UNKNOWN_TOKEN is a
// governance breach, never a soft skip.
std::vector<double> one_hot_encode(std::string_view value,
                                   std::span<const std::string> vocabulary);
// MALFORMED_ONE_HOT unless exactly one bit is set.
std::string one_hot_decode(std::span<const double> bits,
                           std::span<const std::string> vocabulary);

// Dichotomous data: first token of the pair -> 0, second -> 1.
double bit_encode(std::string_view value,
                  std::span<const std::string> pair);

// Row i is the code for level i. Columns sum to zero; the orthogonal
// polynomial columns are additionally orthonormal.
struct ContrastMatrix {
  Encoding kind = Encoding::helmert;
  std::size_t k = 0;
  std::vector<std::vector<double>> rows;  // k rows of k-1 reals
};

// Conventions:
//   backward_difference  regression on the coding recovers adjacent-level
//                        differences (built from the inverse of the
//                        intercept+differences hypothesis matrix)
//   helmert              level i contrasted with the mean of all subsequent
//                        levels
//   orthogonal_polynomial Gram-Schmidt orthonormalization of powers 0..k-1
//                        on levels 1..k, constant column dropped, sign fixed
//                        so the last level's entry is positive
ContrastMatrix contrast_matrix(Encoding kind, std::size_t k);  // K_TOO_SMALL

std::vector<double> contrast_encode(std::size_t level_index,
                                    const ContrastMatrix& matrix);

// (x - min) / (max - min); the denominator is the range so that max -> 1
// for every min. Out-of-range handling lives with the caller's RangePolicy.
double minmax_normalize(double x, double min, double max);
double minmax_denormalize(double y, double min, double max);

double sigmoid_normalize(double x, double center, double scale);  // (0,1)
double tanh_normalize(double x, double center, double scale);     // (-1,1)

// Standard normal inverse CDF via Acklam's rational approximation plus one
// Halley refinement against the erfc-based forward CDF; absolute error is
// far below the 1e-8 contract. Requires p in (0,1).
double inv_norm_cdf(double p);

// Bounded sorted sample reservoir (uniform reservoir sampling, seeded) plus
// the total observation count. Drives gaussian_map and the robust range
// strategy's location/scale estimates.
class QuantileState {
 public:
  explicit QuantileState(std::size_t capacity = 1024, std::uint64_t seed = 1);

  void observe(double x);  // NONFINITE_VALUE

  std::uint64_t count() const { return count_; }
  std::size_t capacity() const { return capacity_; }
  std::span<const double> reservoir() const { return sorted_; }

  // R-2 convention: at integral p*n the two neighbouring order statistics
  // are averaged, otherwise the next one up is taken.
  double quantile(double p) const;  // INSUFFICIENT_STATE when empty
  double median() const { return quantile(0.5); }
  double interquartile_range() const { return quantile(0.75) - quantile(0.25); }

 private:
  std::size_t capacity_;
  std::uint64_t count_ = 0;
  std::vector<double> sorted_;
  std::uint64_t rng_state_;
};

// Phi^-1 of the clamped empirical quantile of x in the reservoir; the clamp
// to [1/(2n), 1 - 1/(2n)] keeps the output finite. Needs >= 2 observations.
double gaussian_map(double x, const QuantileState& state);

}  // namespace mlog

#endif  // MLOG_ENCODERS_HPP
