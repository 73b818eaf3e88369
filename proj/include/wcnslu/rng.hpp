/*
 * Copyright 2026 The wcnslu Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace wcnslu {

// Counter-based generator: the n-th draw is a pure function of (key, n), so
// streams derived with split() are reproducible no matter which thread or in
// which order they are consumed. All distributions are implemented here rather
// than through <random> so sampled values do not depend on the standard
// library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  double normal();
  // Normal(0, stddev) resampled until |x| <= bound * stddev.
  double truncated_normal(double stddev, double bound = 2.0);
  // Gamma(shape, 1), Marsaglia-Tsang.
  double gamma(double shape);
  std::vector<double> dirichlet(std::size_t n, double concentration);
  bool bernoulli(double p) { return uniform() < p; }

  Rng split(std::uint64_t key) const { return Rng(key_, key); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace wcnslu
