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


// Baseline and ablation allocation strategies and strategy-pair parsing.

#ifndef COPYALLOC_ALLOCATORS_H_
#define COPYALLOC_ALLOCATORS_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "copyalloc/action_grid.h"
#include "copyalloc/strategy.h"

namespace copyalloc {

enum class OuterKind { kRl, kGreedy, kLinear, kRandom };
enum class InnerKind { kRl, kLinear, kRandom, kContribution, kCopyright };

struct StrategyPair {
  OuterKind outer = OuterKind::kRl;
  InnerKind inner = InnerKind::kRl;

  // Short form such as "RL+RL" or "G+L".
  std::string Name() const;
  bool operator==(const StrategyPair&) const = default;
};

std::string_view OuterKindName(OuterKind kind);
std::string_view InnerKindName(InnerKind kind);
// Accepts short codes (RL, G, L, R, C, CL) and long names (rl, greedy,
// linear, random, contribution, copyright), case-insensitively.
absl::StatusOr<OuterKind> ParseOuterKind(std::string_view text);
absl::StatusOr<InnerKind> ParseInnerKind(std::string_view text);
// "RL+RL", "G+L", ...
absl::StatusOr<StrategyPair> ParseStrategyPair(std::string_view text);
// The comparison and ablation arms, the hierarchical RL pair first.
std::vector<StrategyPair> AllStrategyPairs();
// Comma-separated pair list, or "all".
absl::StatusOr<std::vector<StrategyPair>> ParseStrategyPairs(std::string_view text);

// B / T clipped to the leftover budget.
double LinearOuterBudget(double total_budget, int rounds, double leftover);
// Uniform on [0, leftover] rounded down to the grid; the final round spends
// everything left.
double RandomOuterBudget(double leftover, int rounds_left,
                         const OuterActionGrid& grid, RngStream& rng);
// min(leftover, sum of asking prices of the holders available this round).
double GreedyOuterBudget(const EnvState& state, const World& world);

// Uniform fractions.
absl::StatusOr<std::vector<double>> LinearInner(int n);
// A uniformly drawn point of the inner grid.
absl::StatusOr<std::vector<double>> RandomInner(int n, int parts, RngStream& rng);
// Fractions proportional to non-negative scores; uniform if all are zero.
absl::StatusOr<std::vector<double>> ProportionalInner(std::span<const double> scores);

class LinearOuterStrategy : public OuterStrategy {
 public:
  absl::StatusOr<double> Budget(const EnvState& state, Environment& env,
                                RngStream& rng) override;
};

class RandomOuterStrategy : public OuterStrategy {
 public:
  absl::StatusOr<double> Budget(const EnvState& state, Environment& env,
                                RngStream& rng) override;
};

class GreedyOuterStrategy : public OuterStrategy {
 public:
  absl::StatusOr<double> Budget(const EnvState& state, Environment& env,
                                RngStream& rng) override;
};

// Inner baselines allocate over the holders available in the current round.
class LinearInnerStrategy : public InnerStrategy {
 public:
  absl::StatusOr<std::vector<double>> Fractions(const EnvState& state,
                                                double budget, Environment& env,
                                                RngStream& rng) override;
};

class RandomInnerStrategy : public InnerStrategy {
 public:
  absl::StatusOr<std::vector<double>> Fractions(const EnvState& state,
                                                double budget, Environment& env,
                                                RngStream& rng) override;
};

// Proportional to the holders' round-probe contribution or copyright loss.
class ScoreInnerStrategy : public InnerStrategy {
 public:
  explicit ScoreInnerStrategy(bool use_copyright) : use_copyright_(use_copyright) {}

  absl::StatusOr<std::vector<double>> Fractions(const EnvState& state,
                                                double budget, Environment& env,
                                                RngStream& rng) override;

 private:
  bool use_copyright_;
};

std::unique_ptr<OuterStrategy> MakeOuterStrategy(OuterKind kind);
// kRl is not constructed here; callers share one RlInnerStrategy per world.
std::unique_ptr<InnerStrategy> MakeBaselineInnerStrategy(InnerKind kind);

}  // namespace copyalloc

#endif  // COPYALLOC_ALLOCATORS_H_
