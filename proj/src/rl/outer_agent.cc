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

#include <algorithm>

#include "copyalloc/agents.h"
#include "copyalloc/dqn.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {
namespace {

Eigen::VectorXd ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

}  // namespace

absl::StatusOr<OuterTrainingResult> TrainOuter(Environment& env,
                                               InnerStrategy& inner,
                                               const ExperimentConfig& cfg,
                                               RngStream& rng) {
  const DqnParams& dqn = cfg.dqn;
  const OuterActionGrid grid(cfg.total_budget, cfg.outer_budget_bins);
  RngStream init_rng = rng.Child("init");
  RngStream act_rng = rng.Child("act");
  RngStream replay_rng = rng.Child("replay");
  ASSIGN_OR_RETURN(QNetwork net,
                   QNetwork::Create(5, dqn.hidden_layers, grid.size(), init_rng));
  QNetwork target = net;
  ReplayBuffer buffer(dqn.replay_capacity);
  const double ceiling = dqn.terminal_reward_ceiling;

  OuterTrainingResult result;
  bool have_best = false;
  int updates = 0;
  for (int episode = 0; episode <= cfg.outer_episodes; ++episode) {
    const bool greedy = episode == cfg.outer_episodes;
    const double epsilon = greedy ? 0.0 : cfg.explore_rate;
    RngStream inner_rng = rng.Child("episode", episode).Child("inner");
    EnvState state = env.Reset();
    while (!state.done()) {
      const Eigen::VectorXd obs = ToVector(OuterObservation(state, env.world()));
      ASSIGN_OR_RETURN(Eigen::VectorXd values, net.Forward(obs));
      const int action = SelectAction(values, epsilon, act_rng);
      const double budget = grid.Budget(action, state.leftover);
      ASSIGN_OR_RETURN(std::vector<double> p,
                       inner.Fractions(state, budget, env, inner_rng));
      const int rounds_left = state.rounds_left();
      ASSIGN_OR_RETURN(const RoundRecord* record, env.Step(&state, budget, p));
      if (greedy) continue;
      QualityScore capped = record->quality;
      capped.q = std::min(capped.q, ceiling);
      const double reward = OuterReward(rounds_left, capped) / ceiling;
      buffer.Add({obs, action, reward,
                  ToVector(OuterObservation(state, env.world())), state.done()});
      if (buffer.size() < dqn.batch_size) continue;
      const std::vector<const Transition*> batch =
          buffer.Sample(dqn.batch_size, replay_rng);
      RETURN_IF_ERROR(
          DqnUpdate(net, target, batch, cfg.discount, dqn.learning_rate).status());
      if (++updates % dqn.target_sync_interval == 0) target = net;
    }
    const double q = state.ledger.back().quality.q;
    result.episode_quality.push_back(q);
    if (!have_best || q > result.best.quality.q) {
      have_best = true;
      result.best_episode = episode;
      result.best.quality = state.ledger.back().quality;
      result.best.ledger = state.ledger;
    }
  }
  result.policy = std::move(net);
  return result;
}

absl::StatusOr<double> RlOuterStrategy::Budget(const EnvState& state,
                                               Environment& env, RngStream&) {
  const std::vector<double> obs = OuterObservation(state, env.world());
  ASSIGN_OR_RETURN(Eigen::VectorXd values, policy_.Forward(ToVector(obs)));
  return grid_.Budget(Argmax(values), state.leftover);
}

}  // namespace copyalloc
