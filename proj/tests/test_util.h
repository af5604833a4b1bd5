/*
 * Copyright 2026 The copyalloc Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COPYALLOC_TESTS_TEST_UTIL_H_
#define COPYALLOC_TESTS_TEST_UTIL_H_

#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "copyalloc/config.h"
#include "copyalloc/rng.h"
#include "copyalloc/types.h"
#include "gtest/gtest.h"

namespace copyalloc::testing {

inline const absl::Status& StatusOf(const absl::Status& status) {
  return status;
}
template <typename T>
const absl::Status& StatusOf(const absl::StatusOr<T>& value) {
  return value.status();
}

#define ASSERT_OK(expr) \
  ASSERT_TRUE((expr).ok()) << ::copyalloc::testing::StatusOf(expr)
#define EXPECT_OK(expr) \
  EXPECT_TRUE((expr).ok()) << ::copyalloc::testing::StatusOf(expr)

// A fast configuration: four holders, three rounds, short training.
inline ExperimentConfig SmallConfig(uint64_t seed = 0) {
  ExperimentConfig cfg = DefaultConfig();
  cfg.seed = seed;
  cfg.rounds = 3;
  cfg.holders = {
      {"a", 20, QualityTier::kHigh, 24.0, 1},
      {"b", 30, QualityTier::kMedium, 18.0, 1},
      {"c", 40, QualityTier::kLow, 12.0, 2},
      {"d", 20, QualityTier::kHigh, 24.0, 3},
  };
  cfg.total_budget = 300.0;
  cfg.inner_iterations = 300;
  cfg.outer_episodes = 4;
  cfg.attribution.num_subsets = 4;
  cfg.world.reference_size = 200;
  cfg.world.evaluation_size = 50;
  cfg.world.generated_batch = 200;
  return cfg;
}

// Linear-regression instance: standard normal features, teacher w, Gaussian
// label noise.
inline std::vector<Sample> RegressionSamples(int n, const Eigen::VectorXd& w,
                                             double noise, RngStream& rng,
                                             int first_id = 0) {
  std::vector<Sample> out;
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.id = first_id + i;
    s.features.resize(w.size());
    for (int j = 0; j < w.size(); ++j) s.features[j] = rng.Normal();
    s.target = w.dot(s.features) + noise * rng.Normal();
    out.push_back(std::move(s));
  }
  return out;
}

inline Eigen::VectorXd RandomVector(int n, RngStream& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.Normal();
  return v;
}

}  // namespace copyalloc::testing

#endif  // COPYALLOC_TESTS_TEST_UTIL_H_
