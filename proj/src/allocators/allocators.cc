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

#include "copyalloc/allocators.h"

#include <algorithm>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {
namespace {

std::string Lower(std::string_view text) {
  return absl::AsciiStrToLower(absl::string_view(text.data(), text.size()));
}

std::vector<double> UniformOver(int n) { return std::vector<double>(n, 1.0 / n); }

}  // namespace

std::string_view OuterKindName(OuterKind kind) {
  switch (kind) {
    case OuterKind::kRl: return "RL";
    case OuterKind::kGreedy: return "G";
    case OuterKind::kLinear: return "L";
    case OuterKind::kRandom: return "R";
  }
  return "?";
}

std::string_view InnerKindName(InnerKind kind) {
  switch (kind) {
    case InnerKind::kRl: return "RL";
    case InnerKind::kLinear: return "L";
    case InnerKind::kRandom: return "R";
    case InnerKind::kContribution: return "C";
    case InnerKind::kCopyright: return "CL";
  }
  return "?";
}

std::string StrategyPair::Name() const {
  return absl::StrCat(std::string(OuterKindName(outer)), "+",
                      std::string(InnerKindName(inner)));
}

absl::StatusOr<OuterKind> ParseOuterKind(std::string_view text) {
  const std::string s = Lower(text);
  if (s == "rl") return OuterKind::kRl;
  if (s == "g" || s == "greedy") return OuterKind::kGreedy;
  if (s == "l" || s == "linear") return OuterKind::kLinear;
  if (s == "r" || s == "random") return OuterKind::kRandom;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown outer strategy \"", std::string(text),
      "\" (expected rl, greedy, linear or random)"));
}

absl::StatusOr<InnerKind> ParseInnerKind(std::string_view text) {
  const std::string s = Lower(text);
  if (s == "rl") return InnerKind::kRl;
  if (s == "l" || s == "linear") return InnerKind::kLinear;
  if (s == "r" || s == "random") return InnerKind::kRandom;
  if (s == "c" || s == "contribution") return InnerKind::kContribution;
  if (s == "cl" || s == "copyright") return InnerKind::kCopyright;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown inner strategy \"", std::string(text),
      "\" (expected rl, linear, random, contribution or copyright)"));
}

absl::StatusOr<StrategyPair> ParseStrategyPair(std::string_view text) {
  const size_t plus = text.find('+');
  if (plus == std::string_view::npos) {
    return absl::InvalidArgumentError(absl::StrCat(
        "strategy pair \"", std::string(text), "\" must look like OUTER+INNER"));
  }
  StrategyPair pair;
  ASSIGN_OR_RETURN(pair.outer, ParseOuterKind(text.substr(0, plus)));
  ASSIGN_OR_RETURN(pair.inner, ParseInnerKind(text.substr(plus + 1)));
  return pair;
}

std::vector<StrategyPair> AllStrategyPairs() {
  using O = OuterKind;
  using I = InnerKind;
  return {{O::kRl, I::kRl},         {O::kGreedy, I::kLinear},
          {O::kLinear, I::kLinear}, {O::kRandom, I::kRandom},
          {O::kRl, I::kRandom},     {O::kRl, I::kLinear},
          {O::kRandom, I::kRl},     {O::kLinear, I::kRl},
          {O::kGreedy, I::kRl},     {O::kRl, I::kContribution},
          {O::kRl, I::kCopyright}};
}

absl::StatusOr<std::vector<StrategyPair>> ParseStrategyPairs(
    std::string_view text) {
  if (Lower(text) == "all") return AllStrategyPairs();
  std::vector<StrategyPair> pairs;
  for (absl::string_view part :
       absl::StrSplit(absl::string_view(text.data(), text.size()), ',',
                      absl::SkipWhitespace())) {
    ASSIGN_OR_RETURN(StrategyPair pair,
                     ParseStrategyPair(std::string_view(part.data(), part.size())));
    if (std::find(pairs.begin(), pairs.end(), pair) == pairs.end()) {
      pairs.push_back(pair);
    }
  }
  if (pairs.empty()) return absl::InvalidArgumentError("no strategy pairs given");
  return pairs;
}

double LinearOuterBudget(double total_budget, int rounds, double leftover) {
  return std::min(total_budget / rounds, leftover);
}

double RandomOuterBudget(double leftover, int rounds_left,
                         const OuterActionGrid& grid, RngStream& rng) {
  if (rounds_left <= 1) return leftover;
  const double draw = rng.Uniform() * leftover;
  return std::min(grid.Level(grid.FloorIndex(draw)), leftover);
}

double GreedyOuterBudget(const EnvState& state, const World& world) {
  double prices = 0.0;
  for (int k : world.Available(state.round)) {
    prices += world.holders[k].spec.asking_price;
  }
  return std::min(state.leftover, prices);
}

absl::StatusOr<std::vector<double>> LinearInner(int n) {
  if (n < 1) return absl::InvalidArgumentError("no holders to allocate over");
  return UniformOver(n);
}

absl::StatusOr<std::vector<double>> RandomInner(int n, int parts, RngStream& rng) {
  ASSIGN_OR_RETURN(InnerActionGrid grid, InnerActionGrid::Create(n, parts));
  return grid.Fractions(static_cast<int>(rng.UniformIndex(grid.size())));
}

absl::StatusOr<std::vector<double>> ProportionalInner(
    std::span<const double> scores) {
  if (scores.empty()) return absl::InvalidArgumentError("no holders to allocate over");
  double total = 0.0;
  for (double s : scores) {
    if (!(s >= 0)) {
      return absl::InvalidArgumentError(absl::StrCat("negative score ", s));
    }
    total += s;
  }
  const int n = static_cast<int>(scores.size());
  if (!(total > 0)) return UniformOver(n);
  std::vector<double> p(n);
  for (int k = 0; k < n; ++k) p[k] = scores[k] / total;
  return p;
}

absl::StatusOr<double> LinearOuterStrategy::Budget(const EnvState& state,
                                                   Environment& env, RngStream&) {
  return LinearOuterBudget(env.config().total_budget, env.config().rounds,
                           state.leftover);
}

absl::StatusOr<double> RandomOuterStrategy::Budget(const EnvState& state,
                                                   Environment& env,
                                                   RngStream& rng) {
  const OuterActionGrid grid(env.config().total_budget,
                             env.config().outer_budget_bins);
  return RandomOuterBudget(state.leftover, state.rounds_left(), grid, rng);
}

absl::StatusOr<double> GreedyOuterStrategy::Budget(const EnvState& state,
                                                   Environment& env, RngStream&) {
  return GreedyOuterBudget(state, env.world());
}

absl::StatusOr<std::vector<double>> LinearInnerStrategy::Fractions(
    const EnvState& state, double, Environment& env, RngStream&) {
  const int n = env.world().num_holders();
  const std::vector<int> available = env.world().Available(state.round);
  if (available.empty()) return UniformOver(n);
  ASSIGN_OR_RETURN(std::vector<double> local,
                   LinearInner(static_cast<int>(available.size())));
  return ExpandFractions(local, available, n);
}

absl::StatusOr<std::vector<double>> RandomInnerStrategy::Fractions(
    const EnvState& state, double, Environment& env, RngStream& rng) {
  const int n = env.world().num_holders();
  const std::vector<int> available = env.world().Available(state.round);
  if (available.empty()) return UniformOver(n);
  ASSIGN_OR_RETURN(std::vector<double> local,
                   RandomInner(static_cast<int>(available.size()),
                               env.config().inner_simplex_parts, rng));
  return ExpandFractions(local, available, n);
}

absl::StatusOr<std::vector<double>> ScoreInnerStrategy::Fractions(
    const EnvState& state, double, Environment& env, RngStream&) {
  const int n = env.world().num_holders();
  ASSIGN_OR_RETURN(const RoundContext* context, env.Probe(state.round));
  if (context->available.empty()) return UniformOver(n);
  std::vector<double> scores;
  for (int k : context->available) {
    scores.push_back(use_copyright_ ? context->holder_copyright[k]
                                    : context->holder_contribution[k]);
  }
  ASSIGN_OR_RETURN(std::vector<double> local, ProportionalInner(scores));
  return ExpandFractions(local, context->available, n);
}

std::unique_ptr<OuterStrategy> MakeOuterStrategy(OuterKind kind) {
  switch (kind) {
    case OuterKind::kGreedy: return std::make_unique<GreedyOuterStrategy>();
    case OuterKind::kLinear: return std::make_unique<LinearOuterStrategy>();
    case OuterKind::kRandom: return std::make_unique<RandomOuterStrategy>();
    case OuterKind::kRl: return nullptr;
  }
  return nullptr;
}

std::unique_ptr<InnerStrategy> MakeBaselineInnerStrategy(InnerKind kind) {
  switch (kind) {
    case InnerKind::kLinear: return std::make_unique<LinearInnerStrategy>();
    case InnerKind::kRandom: return std::make_unique<RandomInnerStrategy>();
    case InnerKind::kContribution: return std::make_unique<ScoreInnerStrategy>(false);
    case InnerKind::kCopyright: return std::make_unique<ScoreInnerStrategy>(true);
    case InnerKind::kRl: return nullptr;
  }
  return nullptr;
}

}  // namespace copyalloc
