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
#include <bit>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "copyalloc/agents.h"
#include "copyalloc/dqn.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {
namespace {

absl::StatusOr<std::vector<double>> GridRewards(const InnerProblem& problem,
                                                const InnerActionGrid& grid,
                                                double lambda, double delta) {
  std::vector<double> rewards(grid.size());
  for (int a = 0; a < grid.size(); ++a) {
    ASSIGN_OR_RETURN(rewards[a], InnerReward(grid.Fractions(a),
                                             problem.contribution,
                                             problem.copyright, lambda, delta));
  }
  return rewards;
}

}  // namespace

absl::StatusOr<InnerSolution> EnumerateInner(const InnerProblem& problem,
                                             int parts, double lambda,
                                             double delta) {
  ASSIGN_OR_RETURN(InnerActionGrid grid,
                   InnerActionGrid::Create(
                       static_cast<int>(problem.contribution.size()), parts));
  ASSIGN_OR_RETURN(std::vector<double> rewards,
                   GridRewards(problem, grid, lambda, delta));
  InnerSolution best;
  best.action = Argmax(rewards);
  best.fractions = grid.Fractions(best.action);
  best.reward = rewards[best.action];
  return best;
}

absl::StatusOr<InnerSolution> TrainInner(const InnerProblem& problem,
                                         const ExperimentConfig& cfg,
                                         RngStream& rng) {
  if (problem.contribution.empty()) {
    return absl::InvalidArgumentError("inner problem has no holders");
  }
  ASSIGN_OR_RETURN(InnerActionGrid grid,
                   InnerActionGrid::Create(
                       static_cast<int>(problem.contribution.size()),
                       cfg.inner_simplex_parts));
  const double lambda = cfg.contribution_weight;
  const double delta = cfg.copyright_weight;
  ASSIGN_OR_RETURN(std::vector<double> rewards,
                   GridRewards(problem, grid, lambda, delta));
  // Flat objective: every action is optimal and the tie rule decides.
  const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  if (*lo == *hi) return InnerSolution{0, grid.Fractions(0), rewards[0]};
  double scale = 0.0;
  for (size_t k = 0; k < problem.contribution.size(); ++k) {
    scale = std::max(scale, lambda * std::abs(problem.contribution[k]) +
                                delta * std::abs(problem.copyright[k]));
  }
  if (!(scale > 0)) scale = 1.0;

  const DqnParams& dqn = cfg.dqn;
  RngStream init_rng = rng.Child("init");
  RngStream act_rng = rng.Child("act");
  RngStream replay_rng = rng.Child("replay");
  ASSIGN_OR_RETURN(QNetwork net, QNetwork::Create(1, dqn.hidden_layers,
                                                  grid.size(), init_rng));
  QNetwork target = net;
  ReplayBuffer buffer(dqn.replay_capacity);
  const Eigen::VectorXd state = Eigen::VectorXd::Constant(1, problem.state);
  int updates = 0;
  for (int j = 0; j < cfg.inner_iterations; ++j) {
    ASSIGN_OR_RETURN(Eigen::VectorXd values, net.Forward(state));
    const int a = SelectAction(values, cfg.explore_rate, act_rng);
    buffer.Add({state, a, rewards[a] / scale, state, true});
    if (buffer.size() < dqn.batch_size) continue;
    const std::vector<const Transition*> batch =
        buffer.Sample(dqn.batch_size, replay_rng);
    RETURN_IF_ERROR(DqnUpdate(net, target, batch, cfg.discount,
                              dqn.learning_rate)
                        .status());
    if (++updates % dqn.target_sync_interval == 0) target = net;
  }
  ASSIGN_OR_RETURN(Eigen::VectorXd values, net.Forward(state));
  InnerSolution out;
  out.action = Argmax(values);
  out.fractions = grid.Fractions(out.action);
  out.reward = rewards[out.action];
  return out;
}

absl::StatusOr<std::vector<double>> RlInnerStrategy::Fractions(
    const EnvState& state, double budget, Environment& env, RngStream&) {
  const int t = state.round;
  const int n = env.world().num_holders();
  const auto key = std::make_pair(t, budget);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  ASSIGN_OR_RETURN(const RoundContext* context, env.Probe(t));
  std::vector<double> p;
  if (context->available.empty()) {
    p.assign(n, 1.0 / n);
  } else {
    InnerProblem problem;
    problem.state = budget / env.config().total_budget;
    for (int k : context->available) {
      problem.contribution.push_back(context->holder_contribution[k]);
      problem.copyright.push_back(context->holder_copyright[k]);
    }
    RngStream rng = RngStream::Derive(env.config().seed, "inner")
                        .Child("round", t)
                        .Child("budget", std::bit_cast<uint64_t>(budget));
    ASSIGN_OR_RETURN(InnerSolution solution, TrainInner(problem, env.config(), rng));
    p = ExpandFractions(solution.fractions, context->available, n);
  }
  cache_.emplace(key, p);
  return p;
}

}  // namespace copyalloc
