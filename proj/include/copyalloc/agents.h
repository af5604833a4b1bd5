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


// Inner (across holders) and outer (across rounds) deep-Q agents.

#ifndef COPYALLOC_AGENTS_H_
#define COPYALLOC_AGENTS_H_

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "copyalloc/action_grid.h"
#include "copyalloc/config.h"
#include "copyalloc/qnetwork.h"
#include "copyalloc/strategy.h"

namespace copyalloc {

// The inner bandit of one round: the constant state B^t / B and the
// per-holder scores of the holders being allocated over.
struct InnerProblem {
  double state = 0.0;
  std::vector<double> contribution;
  std::vector<double> copyright;
};

struct InnerSolution {
  int action = 0;
  std::vector<double> fractions;
  double reward = 0.0;
};

// Exhaustive search over the grid; ties go to the lowest index.
absl::StatusOr<InnerSolution> EnumerateInner(const InnerProblem& problem,
                                             int parts, double lambda,
                                             double delta);

// Epsilon-greedy DQN over the inner grid for cfg.inner_iterations steps;
// returns the greedy action after training. Rewards are divided by
// max_k(lambda |beta_k| + delta |c_k|) while learning; the returned reward
// is unscaled.
absl::StatusOr<InnerSolution> TrainInner(const InnerProblem& problem,
                                         const ExperimentConfig& cfg,
                                         RngStream& rng);

// Inner allocation by a freshly trained DQN per (round, budget), scored on
// the round's probe context. Results are cached, so one instance can serve
// every strategy pair over the same world.
class RlInnerStrategy : public InnerStrategy {
 public:
  absl::StatusOr<std::vector<double>> Fractions(const EnvState& state,
                                                double budget, Environment& env,
                                                RngStream& rng) override;

  int cache_size() const { return static_cast<int>(cache_.size()); }

 private:
  std::map<std::pair<int, double>, std::vector<double>> cache_;
};

struct OuterTrainingResult {
  QNetwork policy;
  // Highest-quality episode seen, including the final greedy rollout.
  EpisodeResult best;
  int best_episode = 0;
  std::vector<double> episode_quality;
};

// Trains the outer agent for cfg.outer_episodes episodes with `inner`
// allocating within rounds, then rolls out the greedy policy once.
absl::StatusOr<OuterTrainingResult> TrainOuter(Environment& env,
                                               InnerStrategy& inner,
                                               const ExperimentConfig& cfg,
                                               RngStream& rng);

// Greedy outer policy of a trained network.
class RlOuterStrategy : public OuterStrategy {
 public:
  RlOuterStrategy(QNetwork policy, double total_budget, int bins)
      : policy_(std::move(policy)), grid_(total_budget, bins) {}

  absl::StatusOr<double> Budget(const EnvState& state, Environment& env,
                                RngStream& rng) override;

 private:
  QNetwork policy_;
  OuterActionGrid grid_;
};

}  // namespace copyalloc

#endif  // COPYALLOC_AGENTS_H_
