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

// Domain types shared by every module.

#ifndef COPYALLOC_TYPES_H_
#define COPYALLOC_TYPES_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"

namespace copyalloc {

enum class QualityTier { kLow, kMedium, kHigh };

std::string_view QualityTierName(QualityTier tier);
absl::StatusOr<QualityTier> ParseQualityTier(std::string_view name);

// A data holder as declared in the experiment configuration. `sample_count`
// is the size of the batch the holder offers in every round it is available.
struct HolderSpec {
  std::string id;
  int sample_count = 0;
  QualityTier tier = QualityTier::kHigh;
  double asking_price = 0.0;
  // First round (1-based) in which the holder can be recruited.
  int join_round = 1;

  bool operator==(const HolderSpec&) const = default;
};

// One training datum of the simulated world. `holder` indexes the owning
// holder in the experiment's holder list. `target` is the scalar the
// attribution surrogate regresses on.
struct Sample {
  int id = 0;
  int holder = 0;
  Eigen::VectorXd features;
  double target = 0.0;
};

// Sums `values[i]` into the bucket `holder_of[i]`. Fails if a sample maps
// outside [0, num_holders) or the two spans disagree in length.
absl::StatusOr<std::vector<double>> SumByHolder(std::span<const double> values,
                                                std::span<const int> holder_of,
                                                int num_holders);

// Holder index of every sample, in order.
std::vector<int> HolderIndices(std::span<const Sample> samples);

}  // namespace copyalloc

#endif  // COPYALLOC_TYPES_H_
