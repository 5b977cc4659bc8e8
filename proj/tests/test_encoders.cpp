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

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace mlog;

namespace {

const std::vector<std::string> kLevels = {"DEBUG", "INFO", "WARN", "ERROR"};
const std::vector<std::string> kPrograms = {"main", "worker"};
const std::vector<std::string> kServers = {"srv1", "srv2", "srv3"};

}  // namespace

TEST_CASE("one-hot encoding puts the single bit at the vocabulary index") {
  CHECK(one_hot_encode("INFO", kLevels) ==
        std::vector<double>{0, 1, 0, 0});
  CHECK(one_hot_encode("main", kPrograms) == std::vector<double>{1, 0});
  CHECK(one_hot_encode("srv2", kServers) == std::vector<double>{0, 1, 0});
  CHECK_THROWS_AS(one_hot_encode("srv9", kServers), Error);
}

TEST_CASE("one-hot decode inverts encode and rejects malformed vectors") {
  CHECK(one_hot_decode(std::vector<double>{0, 1, 0, 0}, kLevels) == "INFO");
  for (const auto& token : kLevels) {
    CHECK(one_hot_decode(one_hot_encode(token, kLevels), kLevels) == token);
  }
  CHECK_THROWS_AS(one_hot_decode(std::vector<double>{0, 0, 0, 0}, kLevels),
                  Error);
  CHECK_THROWS_AS(one_hot_decode(std::vector<double>{1, 1, 0, 0}, kLevels),
                  Error);
  CHECK_THROWS_AS(one_hot_decode(std::vector<double>{1, 0}, kLevels), Error);
}

TEST_CASE("dichotomous bit encoding: first token 0, second 1") {
  const std::vector<std::string> pair = {"healthy", "sick"};
  CHECK(bit_encode("healthy", pair) == 0.0);
  CHECK(bit_encode("sick", pair) == 1.0);
  CHECK_THROWS_AS(bit_encode("dead", pair), Error);
}

TEST_CASE("backward difference k=3 matches the frozen derivation") {
  const auto m = contrast_matrix(Encoding::backward_difference, 3);
  REQUIRE(m.rows.size() == 3);
  CHECK(m.rows[0][0] == doctest::Approx(-2.0 / 3).epsilon(1e-12));
  CHECK(m.rows[0][1] == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(m.rows[1][0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(m.rows[1][1] == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(m.rows[2][0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(m.rows[2][1] == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("contrast codings match the hypothesis-matrix oracle for k=2..6") {
  for (std::size_t k = 2; k <= 6; ++k) {
    const auto bd = contrast_matrix(Encoding::backward_difference, k);
    const auto bd_oracle = oracles::backward_difference_coding(k);
    const auto helmert = contrast_matrix(Encoding::helmert, k);
    const auto helmert_oracle = oracles::helmert_coding(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j + 1 < k; ++j) {
        CHECK(bd.rows[i][j] ==
              doctest::Approx(bd_oracle[i][j]).epsilon(1e-10));
        CHECK(helmert.rows[i][j] ==
              doctest::Approx(helmert_oracle[i][j]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("helmert k=2 is a single opposite-sign column") {
  const auto m = contrast_matrix(Encoding::helmert, 2);
  // Frozen convention: level contrasted against the mean of later levels.
  CHECK(m.rows[0][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.rows[1][0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(m.rows[0][0] + m.rows[1][0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("orthogonal polynomial k=3 matches the Gram-Schmidt oracle") {
  const auto m = contrast_matrix(Encoding::orthogonal_polynomial, 3);
  const double s2 = 1.0 / std::sqrt(2.0);
  const double s6 = 1.0 / std::sqrt(6.0);
  CHECK(m.rows[0][0] == doctest::Approx(-s2).epsilon(1e-12));
  CHECK(m.rows[1][0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.rows[2][0] == doctest::Approx(s2).epsilon(1e-12));
  CHECK(m.rows[0][1] == doctest::Approx(s6).epsilon(1e-12));
  CHECK(m.rows[1][1] == doctest::Approx(-2 * s6).epsilon(1e-12));
  CHECK(m.rows[2][1] == doctest::Approx(s6).epsilon(1e-12));
}

TEST_CASE("contrast matrix invariants hold for k=2..6") {
  for (const Encoding kind :
       {Encoding::backward_difference, Encoding::helmert,
        Encoding::orthogonal_polynomial}) {
    for (std::size_t k = 2; k <= 6; ++k) {
      const auto m = contrast_matrix(kind, k);
      REQUIRE(m.rows.size() == k);
      for (std::size_t j = 0; j + 1 < k; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += m.rows[i][j];
        CHECK(std::abs(sum) < 1e-12);
      }
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
          CHECK(m.rows[a] != m.rows[b]);
        }
      }
      if (kind == Encoding::orthogonal_polynomial) {
        for (std::size_t j1 = 0; j1 + 1 < k; ++j1) {
          for (std::size_t j2 = j1; j2 + 1 < k; ++j2) {
            double dot = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
              dot += m.rows[i][j1] * m.rows[i][j2];
            }
            const double expected = j1 == j2 ? 1.0 : 0.0;
            CHECK(std::abs(dot - expected) < 1e-12);
          }
        }
      }
    }
  }
  CHECK_THROWS_AS(contrast_matrix(Encoding::helmert, 1), Error);
  CHECK_THROWS_AS(contrast_matrix(Encoding::minmax, 3), Error);
}

TEST_CASE("contrast_encode returns the level's row") {
  const auto m = contrast_matrix(Encoding::backward_difference, 3);
  CHECK(contrast_encode(0, m) ==
        std::vector<double>{m.rows[0][0], m.rows[0][1]});
  CHECK(contrast_encode(2, m) ==
        std::vector<double>{m.rows[2][0], m.rows[2][1]});
  CHECK_THROWS_AS(contrast_encode(3, m), Error);
}

TEST_CASE("minmax normalization uses the range denominator") {
  CHECK(minmax_normalize(5, 0, 10) == doctest::Approx(0.5));
  CHECK(minmax_normalize(0, 0, 10) == 0.0);
  CHECK(minmax_normalize(10, 0, 10) == 1.0);
  CHECK(minmax_normalize(3, 3, 7) == 0.0);
  CHECK(minmax_normalize(7, 3, 7) == 1.0);
  // Mirrors the HDFS job-size scenario.
  CHECK(minmax_normalize(1256521728, 0, 1.5e9) ==
        doctest::Approx(0.837681152).epsilon(1e-12));
  CHECK_THROWS_AS(minmax_normalize(5, 10, 0), Error);
  CHECK_THROWS_AS(minmax_normalize(11, 0, 10), Error);
}

TEST_CASE("minmax round-trips within 1e-12 relative tolerance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    double a = dist(rng), b = dist(rng);
    if (a == b) continue;
    const double lo = std::min(a, b), hi = std::max(a, b);
    std::uniform_real_distribution<double> inside(lo, hi);
    const double x = inside(rng);
    const double back = minmax_denormalize(minmax_normalize(x, lo, hi), lo, hi);
    CHECK(std::abs(back - x) <=
          1e-12 * std::max({std::abs(x), std::abs(lo), std::abs(hi)}));
  }
}

TEST_CASE("sigmoid and tanh squash to their open intervals") {
  CHECK(sigmoid_normalize(0, 0, 1) == doctest::Approx(0.5));
  CHECK(tanh_normalize(0, 0, 1) == 0.0);
  CHECK(sigmoid_normalize(100, 0, 1) > 1.0 - 1e-12);
  CHECK(sigmoid_normalize(-100, 0, 1) < 1e-12);
  CHECK_THROWS_AS(sigmoid_normalize(0, 0, 0), Error);
  CHECK_THROWS_AS(tanh_normalize(0, 0, -1), Error);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1e8, 1e8);
  double prev_s = sigmoid_normalize(-1e9, 3.0, 17.0);
  double prev_t = tanh_normalize(-1e9, 3.0, 17.0);
  std::vector<double> xs;
  for (int i = 0; i < 500; ++i) xs.push_back(dist(rng));
  std::sort(xs.begin(), xs.end());
  for (const double x : xs) {
    const double s = sigmoid_normalize(x, 3.0, 17.0);
    const double t = tanh_normalize(x, 3.0, 17.0);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    CHECK(t > -1.0);
    CHECK(t < 1.0);
    CHECK(s >= prev_s);
    CHECK(t >= prev_t);
    prev_s = s;
    prev_t = t;
  }
}

TEST_CASE("inverse normal CDF agrees with the bisection oracle") {
  for (double p : {1e-9, 1e-5, 0.02425, 0.1, 0.25, 0.5, 0.75, 0.9, 0.97575,
                   0.9999, 1.0 - 1e-9}) {
    CHECK(inv_norm_cdf(p) ==
          doctest::Approx(oracles::normal_quantile_bisect(p)).epsilon(1e-9));
  }
  CHECK(inv_norm_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(inv_norm_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK_THROWS_AS(inv_norm_cdf(0.0), Error);
  CHECK_THROWS_AS(inv_norm_cdf(1.0), Error);
}

TEST_CASE("quantile state follows the R-2 convention") {
  QuantileState state(64, 1);
  for (int v = 1; v <= 10; ++v) state.observe(v);
  CHECK(state.median() == doctest::Approx(5.5));
  CHECK(state.quantile(0.25) == doctest::Approx(3.0));
  CHECK(state.quantile(0.75) == doctest::Approx(8.0));
  CHECK(state.interquartile_range() == doctest::Approx(5.0));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-50, 50);
  QuantileState big(256, 9);
  std::vector<double> values;
  for (int i = 0; i < 200; ++i) {
    const double x = dist(rng);
    big.observe(x);
    values.push_back(x);
  }
  for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    CHECK(big.quantile(p) == doctest::Approx(oracles::quantile_r2(values, p)));
  }
  CHECK_THROWS_AS(QuantileState(8, 1).quantile(0.5), Error);
  CHECK_THROWS_AS(big.observe(std::nan("")), Error);
}

TEST_CASE("reservoir stays bounded and sorted") {
  QuantileState state(32, 5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(0, 1);
  for (int i = 0; i < 5000; ++i) state.observe(dist(rng));
  CHECK(state.count() == 5000);
  const auto reservoir = state.reservoir();
  CHECK(reservoir.size() == 32);
  CHECK(std::is_sorted(reservoir.begin(), reservoir.end()));
}

TEST_CASE("gaussian_map sends the reservoir median to zero") {
  QuantileState state(64, 1);
  for (int v = 1; v <= 9; ++v) state.observe(v);  // odd count, median 5
  CHECK(std::abs(gaussian_map(5.0, state)) < 1e-6);
}

TEST_CASE("gaussian_map is monotone and always finite") {
  QuantileState state(128, 2);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist(10.0, 4.0);
  for (int i = 0; i < 500; ++i) state.observe(dist(rng));

  double prev = gaussian_map(-1e9, state);
  CHECK(std::isfinite(prev));
  for (double x = -30.0; x <= 50.0; x += 0.25) {
    const double y = gaussian_map(x, state);
    CHECK(std::isfinite(y));
    CHECK(y >= prev);
    prev = y;
  }
  CHECK(std::isfinite(gaussian_map(1e300, state)));

  QuantileState tiny(8, 1);
  tiny.observe(1.0);
  CHECK_THROWS_AS(gaussian_map(1.0, tiny), Error);
}

TEST_CASE("gaussian_map output is approximately standard normal") {
  // Smaller sibling of the acceptance criterion: full-sample reservoir.
  QuantileState state(2000, 42);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(0, 1);
  std::vector<double> sample;
  for (int i = 0; i < 2000; ++i) {
    const double x = dist(rng);
    state.observe(x);
    sample.push_back(x);
  }
  std::vector<double> mapped;
  for (const double x : sample) mapped.push_back(gaussian_map(x, state));
  CHECK(oracles::ks_vs_normal(mapped) < 0.02);
}
