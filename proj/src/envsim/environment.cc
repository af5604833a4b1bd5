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

#include "copyalloc/environment.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {

bool MeetsAskingPrice(double payment, double asking_price) {
  return payment >= asking_price - 1e-9 * std::max(1.0, std::abs(asking_price));
}

double OuterReward(int rounds_left, const QualityScore& quality) {
  return rounds_left > 1 ? 0.01 : quality.q;
}

absl::StatusOr<double> InnerReward(std::span<const double> p,
                                   std::span<const double> beta,
                                   std::span<const double> copyright,
                                   double lambda, double delta) {
  if (p.size() != beta.size() || p.size() != copyright.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "inner reward length mismatch: p ", p.size(), ", contribution ",
        beta.size(), ", copyright ", copyright.size()));
  }
  double contribution = 0.0;
  double loss = 0.0;
  for (size_t k = 0; k < p.size(); ++k) {
    contribution += p[k] * beta[k];
    loss += p[k] * copyright[k];
  }
  return lambda * contribution - delta * loss;
}

std::vector<double> OuterObservation(const EnvState& state, const World& world) {
  const double samples =
      std::max(1.0, world.TotalOfferedPerRound() * state.rounds);
  return {state.n / samples, state.c / samples, state.x / samples,
          state.leftover / state.total_budget,
          static_cast<double>(state.rounds_left()) / state.rounds};
}

Environment::Environment(std::shared_ptr<const World> world)
    : world_(std::move(world)) {}

EnvState Environment::Reset() const {
  EnvState state;
  state.round = 1;
  state.rounds = config().rounds;
  state.total_budget = config().total_budget;
  state.leftover = config().total_budget;
  state.trained = GaussianAccumulator(world_->dim());
  return state;
}

absl::StatusOr<JoinOutcome> Environment::ApplyAllocation(
    EnvState* state, double budget, std::span<const double> p) const {
  if (state->done()) {
    return absl::FailedPreconditionError("episode already finished");
  }
  const int n = world_->num_holders();
  if (static_cast<int>(p.size()) != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "fraction vector has ", p.size(), " entries for ", n, " holders"));
  }
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0) {
      return absl::InvalidArgumentError("fractions must be finite and >= 0");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("fractions sum to ", total, ", expected 1"));
  }
  if (!std::isfinite(budget) || budget < 0) {
    return absl::InvalidArgumentError("round budget must be >= 0");
  }
  const double tolerance = 1e-9 * std::max(1.0, state->total_budget);
  if (budget > state->leftover + tolerance) {
    return absl::InvalidArgumentError(absl::StrCat(
        "overdraft: round budget ", budget, " exceeds leftover ",
        state->leftover));
  }
  budget = std::min(budget, state->leftover);
  JoinOutcome outcome;
  outcome.payments.resize(n);
  for (int k = 0; k < n; ++k) {
    outcome.payments[k] = budget * p[k];
    const HolderSpec& spec = world_->holders[k].spec;
    if (spec.join_round <= state->round &&
        MeetsAskingPrice(outcome.payments[k], spec.asking_price)) {
      outcome.joined.push_back(k);
    }
  }
  state->leftover = std::max(0.0, state->leftover - budget);
  return outcome;
}

std::string Environment::HistoryKey(const EnvState& state,
                                    std::span<const int> joined) const {
  std::string key;
  for (const std::vector<int>& round : state.history) {
    absl::StrAppend(&key, absl::StrJoin(round, ","), "|");
  }
  absl::StrAppend(&key, absl::StrJoin(joined, ","));
  return key;
}

SurrogateGenerator Environment::Generator(const GaussianAccumulator& data) const {
  return SurrogateGenerator::Fit(world_->prior, config().world.prior_strength,
                                 data);
}

absl::StatusOr<std::pair<AttributionResult, CopyrightResult>>
Environment::ScoreBatch(std::span<const Sample> train,
                        const SurrogateGenerator& generator, int round) const {
  const ExperimentConfig& cfg = config();
  AttributionParams params = cfg.attribution;
  const int n = static_cast<int>(train.size());
  params.subset_size = std::min(EffectiveSubsetSize(params, n), n);
  RngStream rng =
      RngStream::Derive(cfg.seed, "attribution").Child("round", round);
  ASSIGN_OR_RETURN(AttributionResult attribution,
                   TrakScores(train, world_->evaluation, params, rng));
  attribution.round = round;
  RETURN_IF_ERROR(
      FinalizeAttribution(train, world_->num_holders(), &attribution));
  ASSIGN_OR_RETURN(std::vector<Eigen::VectorXd> counterparts,
                   generator.Counterparts(train, world_->caption));
  ASSIGN_OR_RETURN(
      CopyrightResult copyright,
      ScoreRound(train, counterparts, world_->embedder, world_->stack,
                 cfg.semantic_weight, cfg.perceptual_weight,
                 world_->num_holders()));
  copyright.round = round;
  return std::make_pair(std::move(attribution), std::move(copyright));
}

absl::StatusOr<RoundEvaluation> Environment::RunRound(
    EnvState* state, std::span<const int> joined) {
  if (state->done()) {
    return absl::FailedPreconditionError("episode already finished");
  }
  const int t = state->round;
  std::vector<int> sorted(joined.begin(), joined.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Sample> train;
  for (int k : sorted) {
    if (k < 0 || k >= world_->num_holders()) {
      return absl::InvalidArgumentError(absl::StrCat("unknown holder ", k));
    }
    const std::vector<Sample>& batch = world_->holders[k].batches[t - 1];
    train.insert(train.end(), batch.begin(), batch.end());
  }
  const std::string key = HistoryKey(*state, sorted);
  state->trained.Add(train);

  auto it = round_cache_.find(key);
  if (it == round_cache_.end()) {
    RoundEvaluation eval;
    eval.holder_contribution.assign(world_->num_holders(), 0.0);
    eval.holder_copyright.assign(world_->num_holders(), 0.0);
    if (!train.empty()) {
      const SurrogateGenerator generator = Generator(state->trained);
      ASSIGN_OR_RETURN(auto scores, ScoreBatch(train, generator, t));
      eval.joined_samples = static_cast<int>(train.size());
      eval.holder_contribution = scores.first.per_holder;
      eval.holder_copyright = scores.second.per_holder;
      for (double v : scores.first.normalized) eval.contribution += v;
      for (double v : scores.second.loss) eval.copyright += v;
    }
    it = round_cache_.emplace(key, std::move(eval)).first;
  }
  const RoundEvaluation& eval = it->second;
  state->n += eval.joined_samples;
  state->x += eval.contribution;
  state->c += eval.copyright;
  state->history.push_back(std::move(sorted));
  ++state->round;
  return eval;
}

absl::StatusOr<const RoundRecord*> Environment::Step(EnvState* state,
                                                      double budget,
                                                      std::span<const double> p) {
  const bool final_round = state->rounds_left() == 1;
  RoundRecord record;
  record.round = state->round;
  const double before = state->leftover;
  ASSIGN_OR_RETURN(JoinOutcome join, ApplyAllocation(state, budget, p));
  record.budget = before - state->leftover;
  record.fractions.assign(p.begin(), p.end());
  record.payments = std::move(join.payments);
  record.joined = join.joined;
  ASSIGN_OR_RETURN(RoundEvaluation eval, RunRound(state, join.joined));
  record.joined_samples = eval.joined_samples;
  record.contribution = eval.contribution;
  record.copyright = eval.copyright;
  record.holder_contribution = eval.holder_contribution;
  record.holder_copyright = eval.holder_copyright;
  record.n = state->n;
  record.c = state->c;
  record.x = state->x;
  record.leftover = state->leftover;
  if (final_round) {
    ASSIGN_OR_RETURN(record.quality, FinalQuality(*state));
    record.has_quality = true;
  }
  state->ledger.push_back(std::move(record));
  return &state->ledger.back();
}

absl::StatusOr<QualityScore> Environment::FinalQuality(const EnvState& state) {
  std::string key;
  for (const std::vector<int>& round : state.history) {
    absl::StrAppend(&key, absl::StrJoin(round, ","), "|");
  }
  if (auto it = quality_cache_.find(key); it != quality_cache_.end()) {
    return it->second;
  }
  const SurrogateGenerator generator = Generator(state.trained);
  RngStream rng = RngStream::Derive(config().seed, "generate");
  ASSIGN_OR_RETURN(Eigen::MatrixXd batch,
                   generator.Generate(config().world.generated_batch, rng));
  ASSIGN_OR_RETURN(FeatureStats stats, ComputeFeatureStats(batch));
  ASSIGN_OR_RETURN(double fid, Fid(stats, world_->reference_stats));
  const QualityScore score = MakeQualityScore(fid);
  quality_cache_.emplace(std::move(key), score);
  return score;
}

absl::StatusOr<const RoundContext*> Environment::Probe(int round) {
  if (round < 1 || round > config().rounds) {
    return absl::InvalidArgumentError(absl::StrCat("no round ", round));
  }
  if (auto it = probe_cache_.find(round); it != probe_cache_.end()) {
    return it->second.get();
  }
  auto context = std::make_unique<RoundContext>();
  context->round = round;
  context->available = world_->Available(round);
  context->holder_contribution.assign(world_->num_holders(), 0.0);
  context->holder_copyright.assign(world_->num_holders(), 0.0);
  std::vector<Sample> train;
  for (int k : context->available) {
    const std::vector<Sample>& batch = world_->holders[k].batches[round - 1];
    train.insert(train.end(), batch.begin(), batch.end());
  }
  if (!train.empty()) {
    GaussianAccumulator data(world_->dim());
    data.Add(train);
    ASSIGN_OR_RETURN(auto scores, ScoreBatch(train, Generator(data), round));
    context->holder_contribution = scores.first.per_holder;
    context->holder_copyright = scores.second.per_holder;
    context->sample_contribution = scores.first.normalized;
    context->sample_copyright = scores.second.loss;
    context->sample_holder = HolderIndices(train);
  }
  const RoundContext* out = context.get();
  probe_cache_.emplace(round, std::move(context));
  return out;
}

}  // namespace copyalloc
