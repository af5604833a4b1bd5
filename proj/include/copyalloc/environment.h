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


// Multi-round budget allocation environment: the join rule, per-round
// training and evaluation of the surrogate generator, and the outer-state
// bookkeeping observed by allocation strategies.

#ifndef COPYALLOC_ENVIRONMENT_H_
#define COPYALLOC_ENVIRONMENT_H_

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "copyalloc/attribution.h"
#include "copyalloc/copyright.h"
#include "copyalloc/quality.h"
#include "copyalloc/world.h"

namespace copyalloc {

// One executed round of the ledger.
struct RoundRecord {
  int round = 0;
  double budget = 0.0;
  std::vector<double> fractions;
  std::vector<double> payments;
  std::vector<int> joined;
  int joined_samples = 0;
  double contribution = 0.0;
  double copyright = 0.0;
  std::vector<double> holder_contribution;
  std::vector<double> holder_copyright;
  // Cumulative totals and leftover budget after the round.
  double n = 0.0;
  double c = 0.0;
  double x = 0.0;
  double leftover = 0.0;
  bool has_quality = false;
  QualityScore quality;
};

// Outer observation S_t = (N_t, C_t, X_t, B_lt, t_l) plus the ledger.
struct EnvState {
  // Next round to execute, 1-based; rounds + 1 once the episode is over.
  int round = 1;
  int rounds = 0;
  double total_budget = 0.0;
  double n = 0.0;
  double c = 0.0;
  double x = 0.0;
  double leftover = 0.0;
  std::vector<RoundRecord> ledger;
  // Sorted joined holders of every executed round.
  std::vector<std::vector<int>> history;
  GaussianAccumulator trained;

  int rounds_left() const { return rounds - round + 1; }
  bool done() const { return round > rounds; }
};

// Payment test shared by the environment and the soundness checks.
bool MeetsAskingPrice(double payment, double asking_price);

struct JoinOutcome {
  std::vector<double> payments;
  std::vector<int> joined;
};

// Scores of every holder available in a round, computed on their round
// batches before any allocation. Depends only on (world, round).
struct RoundContext {
  int round = 0;
  std::vector<int> available;
  std::vector<double> holder_contribution;
  std::vector<double> holder_copyright;
  // Per-sample scores over the available batches, in holder order.
  std::vector<double> sample_contribution;
  std::vector<double> sample_copyright;
  std::vector<int> sample_holder;
};

// Increments produced by one round's training and evaluation.
struct RoundEvaluation {
  int joined_samples = 0;
  double contribution = 0.0;
  double copyright = 0.0;
  std::vector<double> holder_contribution;
  std::vector<double> holder_copyright;
};

double OuterReward(int rounds_left, const QualityScore& quality);

// lambda * sum_k p_k beta_k - delta * sum_k p_k c_k.
absl::StatusOr<double> InnerReward(std::span<const double> p,
                                   std::span<const double> beta,
                                   std::span<const double> copyright,
                                   double lambda, double delta);

// Outer observation scaled to order one: N, C and X over the total samples
// offered in T rounds, B_lt over B, t_l over T.
std::vector<double> OuterObservation(const EnvState& state, const World& world);

// Environment over one world. Round evaluations, probes and final quality
// are memoized by joined history, so repeated episodes over the same world
// are cheap. Not thread-safe.
class Environment {
 public:
  explicit Environment(std::shared_ptr<const World> world);

  const World& world() const { return *world_; }
  const ExperimentConfig& config() const { return world_->config; }

  EnvState Reset() const;

  // Validates and applies the join rule; decrements the leftover budget.
  absl::StatusOr<JoinOutcome> ApplyAllocation(EnvState* state, double budget,
                                              std::span<const double> p) const;

  // Trains on the joined batches and scores them; advances the round.
  absl::StatusOr<RoundEvaluation> RunRound(EnvState* state,
                                           std::span<const int> joined);

  // ApplyAllocation + RunRound + ledger entry; the final round also records
  // the model quality.
  absl::StatusOr<const RoundRecord*> Step(EnvState* state, double budget,
                                          std::span<const double> p);

  // FID of a fixed-size seeded batch from the current generator against the
  // reference set. With no training data the generator is the prior.
  absl::StatusOr<QualityScore> FinalQuality(const EnvState& state);

  SurrogateGenerator Generator(const GaussianAccumulator& data) const;

  absl::StatusOr<const RoundContext*> Probe(int round);

  // Attribution and copyright scores of `train` under `generator`.
  absl::StatusOr<std::pair<AttributionResult, CopyrightResult>> ScoreBatch(
      std::span<const Sample> train, const SurrogateGenerator& generator,
      int round) const;

 private:
  std::string HistoryKey(const EnvState& state,
                         std::span<const int> joined) const;

  std::shared_ptr<const World> world_;
  std::map<std::string, RoundEvaluation> round_cache_;
  std::map<std::string, QualityScore> quality_cache_;
  std::map<int, std::unique_ptr<RoundContext>> probe_cache_;
};

}  // namespace copyalloc

#endif  // COPYALLOC_ENVIRONMENT_H_
