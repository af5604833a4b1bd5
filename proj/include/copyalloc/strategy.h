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


// Allocation strategy interfaces and the episode loop that composes an outer
// (across rounds) and an inner (across holders) strategy.

#ifndef COPYALLOC_STRATEGY_H_
#define COPYALLOC_STRATEGY_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "copyalloc/environment.h"
#include "copyalloc/rng.h"

namespace copyalloc {

class OuterStrategy {
 public:
  virtual ~OuterStrategy() = default;
  // Round budget B^t in [0, B_lt].
  virtual absl::StatusOr<double> Budget(const EnvState& state, Environment& env,
                                        RngStream& rng) = 0;
};

class InnerStrategy {
 public:
  virtual ~InnerStrategy() = default;
  // Fraction vector over all holders, non-negative and summing to one.
  virtual absl::StatusOr<std::vector<double>> Fractions(const EnvState& state,
                                                        double budget,
                                                        Environment& env,
                                                        RngStream& rng) = 0;
};

struct EpisodeResult {
  std::vector<RoundRecord> ledger;
  QualityScore quality;
};

// Runs one T-round episode. The outer and inner strategies draw from
// separate children of `rng`.
absl::StatusOr<EpisodeResult> RunEpisode(Environment& env, OuterStrategy& outer,
                                         InnerStrategy& inner, RngStream& rng);

// Scatters fractions over `available` holders into a full-length vector.
std::vector<double> ExpandFractions(std::span<const double> local,
                                    std::span<const int> available,
                                    int num_holders);

}  // namespace copyalloc

#endif  // COPYALLOC_STRATEGY_H_
