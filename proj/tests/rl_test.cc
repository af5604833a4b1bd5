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

#include <cmath>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "Eigen/Dense"
#include "copyalloc/action_grid.h"
#include "copyalloc/agents.h"
#include "copyalloc/checkpoint.h"
#include "copyalloc/dqn.h"
#include "copyalloc/environment.h"
#include "copyalloc/qnetwork.h"
#include "copyalloc/strategy.h"
#include "copyalloc/world.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace copyalloc {
namespace {

using ::copyalloc::testing::RandomVector;
using ::copyalloc::testing::SmallConfig;
using ::testing::ElementsAre;

QNetwork RandomNet(int input, std::vector<int> hidden, int actions,
                   RngStream& rng) {
  auto net = QNetwork::Create(input, hidden, actions, rng);
  EXPECT_TRUE(net.ok());
  // Nonzero biases so every parameter is exercised.
  for (Eigen::VectorXd& b : net->biases()) {
    for (int i = 0; i < b.size(); ++i) b[i] = 0.1 * rng.Normal();
  }
  return *net;
}

// Uniform split over every holder.
class EvenInner : public InnerStrategy {
 public:
  absl::StatusOr<std::vector<double>> Fractions(const EnvState&, double,
                                                Environment& env,
                                                RngStream&) override {
    const int n = env.world().num_holders();
    return std::vector<double>(n, 1.0 / n);
  }
};

TEST(QNetworkTest, ZeroWeightsGiveZeroOutputs) {
  const std::vector<int> sizes = {5, 80, 40, 7};
  auto net = QNetwork::Zeros(sizes);
  ASSERT_OK(net);
  auto q = net->Forward(Eigen::VectorXd::Constant(5, 3.0));
  ASSERT_OK(q);
  EXPECT_EQ(q->size(), 7);
  EXPECT_EQ(q->norm(), 0.0);
  EXPECT_EQ(net->num_parameters(), 5 * 80 + 80 + 80 * 40 + 40 + 40 * 7 + 7);
  EXPECT_EQ(net->layer_sizes(), sizes);
}

TEST(QNetworkTest, ScalingHeadDoublesOutputs) {
  RngStream rng = RngStream::Derive(1, "head");
  QNetwork net = RandomNet(5, {80, 40}, 11, rng);
  const Eigen::VectorXd s = RandomVector(5, rng);
  const Eigen::VectorXd before = *net.Forward(s);
  net.weights().back() *= 2.0;
  net.biases().back() *= 2.0;
  const Eigen::VectorXd after = *net.Forward(s);
  EXPECT_LT((after - 2.0 * before).norm(), 1e-12 * before.norm());
}

TEST(QNetworkTest, DimensionMismatch) {
  RngStream rng = RngStream::Derive(2, "dim");
  const QNetwork net = RandomNet(5, {8}, 3, rng);
  EXPECT_FALSE(net.Forward(Eigen::VectorXd::Zero(4)).ok());
  EXPECT_FALSE(QNetwork::Zeros(std::vector<int>{5}).ok());
}

TEST(QNetworkTest, GradientMatchesFiniteDifferences) {
  RngStream rng = RngStream::Derive(3, "grad");
  constexpr double kH = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const int input = 1 + rng.UniformIndex(5);
    const int actions = 2 + rng.UniformIndex(6);
    QNetwork net = RandomNet(input, {80, 40}, actions, rng);
    const Eigen::VectorXd s = RandomVector(input, rng);
    // Objective: the mean action value.
    const Eigen::VectorXd weights = Eigen::VectorXd::Constant(actions, 1.0 / actions);
    auto trace = net.ForwardTrace(s);
    ASSERT_OK(trace);
    QNetwork::Gradients grads = net.ZeroGradients();
    net.Backward(*trace, weights, &grads);
    QNetwork grad_net = net;
    Eigen::VectorXd flat(net.num_parameters());
    {
      QNetwork holder = net;
      holder.weights() = grads.weights;
      holder.biases() = grads.biases;
      flat = holder.Parameters();
    }
    const Eigen::VectorXd theta = net.Parameters();
    double worst = 0.0;
    for (int i = 0; i < theta.size(); i += 7) {
      Eigen::VectorXd up = theta, down = theta;
      up[i] += kH;
      down[i] -= kH;
      ASSERT_OK(grad_net.SetParameters(up));
      const double fu = grad_net.Forward(s)->mean();
      ASSERT_OK(grad_net.SetParameters(down));
      const double fd = grad_net.Forward(s)->mean();
      const double numeric = (fu - fd) / (2 * kH);
      const double err =
          std::abs(flat[i] - numeric) / std::max(1.0, std::abs(numeric));
      worst = std::max(worst, err);
    }
    EXPECT_LE(worst, 1e-4) << "trial " << trial;
  }
}

TEST(QNetworkTest, ParameterRoundTrip) {
  RngStream rng = RngStream::Derive(4, "params");
  const QNetwork a = RandomNet(3, {6, 4}, 5, rng);
  auto b = QNetwork::Zeros(a.layer_sizes());
  ASSERT_OK(b);
  ASSERT_OK(b->SetParameters(a.Parameters()));
  EXPECT_EQ(b->Parameters(), a.Parameters());
  EXPECT_FALSE(b->SetParameters(Eigen::VectorXd::Zero(3)).ok());
}

TEST(SelectActionTest, GreedyAndTies) {
  RngStream rng = RngStream::Derive(5, "greedy");
  EXPECT_EQ(SelectAction(std::vector<double>{1, 3, 2}, 0.0, rng), 1);
  EXPECT_EQ(SelectAction(std::vector<double>{2, 2}, 0.0, rng), 0);
  EXPECT_EQ(Argmax(std::vector<double>{-1, 4, 4, 0}), 1);
}

TEST(SelectActionTest, FullExplorationIsUniform) {
  RngStream rng = RngStream::Derive(6, "explore");
  constexpr int kDraws = 10000;
  constexpr int kActions = 5;
  std::vector<int> counts(kActions, 0);
  const std::vector<double> values = {0.0, 5.0, 1.0, 2.0, 3.0};
  for (int i = 0; i < kDraws; ++i) ++counts[SelectAction(values, 1.0, rng)];
  const double expected = double(kDraws) / kActions;
  const double sigma = std::sqrt(kDraws * (1.0 / kActions) * (1 - 1.0 / kActions));
  double chi2 = 0.0;
  for (int c : counts) {
    EXPECT_LE(std::abs(c - expected), 3 * sigma);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 0.999 quantile of chi-square with 4 degrees of freedom.
  EXPECT_LT(chi2, 18.467);
}

TEST(SelectActionTest, ArgmaxFrequency) {
  RngStream rng = RngStream::Derive(7, "freq");
  const std::vector<double> values = {0.1, 0.4, 0.9, 0.2};
  for (double eps : {0.1, 0.3, 0.5}) {
    int hits = 0;
    for (int i = 0; i < 10000; ++i) hits += SelectAction(values, eps, rng) == 2;
    EXPECT_GE(hits / 10000.0, 1 - eps - 0.02) << eps;
  }
}

TEST(ReplayBufferTest, BoundedFifo) {
  ReplayBuffer buffer(3);
  for (int i = 0; i < 5; ++i) {
    buffer.Add({Eigen::VectorXd::Zero(1), i, double(i), Eigen::VectorXd::Zero(1), true});
    EXPECT_LE(buffer.size(), 3);
  }
  EXPECT_EQ(buffer.size(), 3);
  EXPECT_EQ(buffer.capacity(), 3);
  EXPECT_EQ(buffer.at(0).action, 2);
  EXPECT_EQ(buffer.at(1).action, 3);
  EXPECT_EQ(buffer.at(2).action, 4);
  RngStream a = RngStream::Derive(8, "replay");
  RngStream b = RngStream::Derive(8, "replay");
  const auto sa = buffer.Sample(20, a);
  const auto sb = buffer.Sample(20, b);
  std::set<int> seen;
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(sa[i], sb[i]);
    seen.insert(sa[i]->action);
  }
  EXPECT_EQ(seen, (std::set<int>{2, 3, 4}));
}

TEST(DqnUpdateTest, ZeroLossAtTarget) {
  auto net = QNetwork::Zeros(std::vector<int>{2, 4, 3});
  ASSERT_OK(net);
  net->biases().back() = Eigen::Vector3d(0.5, 0.5, 0.5);
  const Transition t{Eigen::Vector2d(1, 2), 1, 0.5, Eigen::Vector2d(0, 0), true};
  const std::vector<const Transition*> batch = {&t, &t};
  const QNetwork target = *net;
  auto loss = DqnUpdate(*net, target, batch, 0.98, 1e-3);
  ASSERT_OK(loss);
  EXPECT_EQ(*loss, 0.0);
}

TEST(DqnUpdateTest, ZeroDiscountUsesImmediateReward) {
  RngStream rng = RngStream::Derive(9, "gamma");
  QNetwork net = RandomNet(2, {8}, 3, rng);
  const QNetwork target = RandomNet(2, {8}, 3, rng);
  const Transition t{Eigen::Vector2d(0.3, -1), 2, 1.5, Eigen::Vector2d(2, 2), false};
  const std::vector<const Transition*> batch = {&t};
  const double q = (*net.Forward(t.state))[2];
  auto loss = DqnUpdate(net, target, batch, 0.0, 0.0);
  ASSERT_OK(loss);
  EXPECT_NEAR(*loss, 0.5 * (q - 1.5) * (q - 1.5), 1e-12);

  const double bootstrap = target.Forward(t.next_state)->maxCoeff();
  auto discounted = DqnUpdate(net, target, batch, 0.5, 0.0);
  ASSERT_OK(discounted);
  const double y = 1.5 + 0.5 * bootstrap;
  EXPECT_NEAR(*discounted, 0.5 * (q - y) * (q - y), 1e-12);
}

TEST(DqnUpdateTest, RepeatedUpdatesDecreaseLoss) {
  RngStream rng = RngStream::Derive(10, "descent");
  QNetwork net = RandomNet(1, {80, 40}, 5, rng);
  const QNetwork target = net;
  const Transition t{Eigen::VectorXd::Constant(1, 0.4), 3, 2.0,
                     Eigen::VectorXd::Constant(1, 0.4), true};
  const std::vector<const Transition*> batch = {&t};
  double previous = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 100; ++step) {
    auto loss = DqnUpdate(net, target, batch, 0.98, 1e-3);
    ASSERT_OK(loss);
    EXPECT_LT(*loss, previous) << "step " << step;
    previous = *loss;
  }
  EXPECT_LT(std::abs((*net.Forward(t.state))[3] - 2.0), 1.0);
}

TEST(DqnUpdateTest, NonFiniteLossIsError) {
  RngStream rng = RngStream::Derive(11, "nan");
  QNetwork net = RandomNet(1, {4}, 2, rng);
  const Transition t{Eigen::VectorXd::Zero(1), 0,
                     std::numeric_limits<double>::quiet_NaN(),
                     Eigen::VectorXd::Zero(1), true};
  const std::vector<const Transition*> batch = {&t};
  EXPECT_FALSE(DqnUpdate(net, net, batch, 0.9, 1e-3).ok());
  EXPECT_FALSE(DqnUpdate(net, net, {}, 0.9, 1e-3).ok());
}

TEST(ActionGridTest, OuterLevels) {
  const OuterActionGrid grid(1000.0, 10);
  EXPECT_EQ(grid.size(), 11);
  EXPECT_EQ(grid.Level(0), 0.0);
  EXPECT_EQ(grid.Level(3), 300.0);
  EXPECT_EQ(grid.Level(10), 1000.0);
  EXPECT_EQ(grid.Budget(5, 320.0), 320.0);
  EXPECT_EQ(grid.Budget(2, 320.0), 200.0);
  EXPECT_EQ(grid.FloorIndex(320.0), 3);
  EXPECT_EQ(grid.FloorIndex(99.0), 0);
  EXPECT_EQ(grid.FloorIndex(5000.0), 10);
}

TEST(ActionGridTest, InnerCompositions) {
  EXPECT_EQ(CompositionCount(8, 4), 330);
  EXPECT_EQ(CompositionCount(3, 5), 21);
  auto grid = InnerActionGrid::Create(8, 4);
  ASSERT_OK(grid);
  ASSERT_EQ(grid->size(), 330);
  EXPECT_THAT(grid->Parts(0), ElementsAre(4, 0, 0, 0, 0, 0, 0, 0));
  std::set<std::vector<int>> unique;
  for (int i = 0; i < grid->size(); ++i) {
    int total = 0;
    for (int v : grid->Parts(i)) {
      EXPECT_GE(v, 0);
      total += v;
    }
    EXPECT_EQ(total, 4);
    unique.insert(grid->Parts(i));
    const auto p = grid->Fractions(i);
    double sum = 0.0;
    for (double v : p) sum += v;
    EXPECT_EQ(sum, 1.0);
  }
  EXPECT_EQ(unique.size(), 330u);
  EXPECT_FALSE(InnerActionGrid::Create(0, 4).ok());
  EXPECT_FALSE(InnerActionGrid::Create(60, 20).ok());
}

TEST(TrainInnerTest, TwoHolderExample) {
  const InnerProblem problem{0.3, {1.0, 0.0}, {0.0, 1.0}};
  auto best = EnumerateInner(problem, 4, 0.5, 0.5);
  ASSERT_OK(best);
  EXPECT_THAT(best->fractions, ElementsAre(1.0, 0.0));
  // (1, 0) is the unique maximizer.
  auto grid = InnerActionGrid::Create(2, 4);
  ASSERT_OK(grid);
  for (int a = 1; a < grid->size(); ++a) {
    EXPECT_LT(*InnerReward(grid->Fractions(a), problem.contribution,
                           problem.copyright, 0.5, 0.5),
              best->reward);
  }
  ExperimentConfig cfg = DefaultConfig();
  cfg.inner_simplex_parts = 4;
  RngStream rng = RngStream::Derive(12, "two-holder");
  auto trained = TrainInner(problem, cfg, rng);
  ASSERT_OK(trained);
  EXPECT_THAT(trained->fractions, ElementsAre(1.0, 0.0));
  EXPECT_DOUBLE_EQ(trained->reward, 0.5);
}

TEST(TrainInnerTest, FlatObjectiveUsesTieRule) {
  const InnerProblem problem{0.5, {0.4, 0.7, 0.2}, {0.4, 0.7, 0.2}};
  ExperimentConfig cfg = DefaultConfig();
  cfg.inner_iterations = 500;
  RngStream rng = RngStream::Derive(13, "flat");
  auto trained = TrainInner(problem, cfg, rng);
  ASSERT_OK(trained);
  EXPECT_EQ(trained->action, 0);
  EXPECT_THAT(trained->fractions, ElementsAre(1.0, 0.0, 0.0));
  EXPECT_EQ(trained->reward, 0.0);
}

TEST(TrainInnerTest, ThreeHolderGapWithinFivePercent) {
  ExperimentConfig cfg = DefaultConfig();
  cfg.inner_simplex_parts = 5;
  RngStream data = RngStream::Derive(14, "instances");
  for (int inst = 0; inst < 5; ++inst) {
    InnerProblem problem;
    problem.state = data.Uniform();
    for (int k = 0; k < 3; ++k) {
      problem.contribution.push_back(20 * data.Uniform());
      problem.copyright.push_back(20 * data.Uniform());
    }
    auto best = EnumerateInner(problem, 5, 0.5, 0.5);
    ASSERT_OK(best);
    RngStream rng = RngStream::Derive(inst, "train-inner");
    auto trained = TrainInner(problem, cfg, rng);
    ASSERT_OK(trained);
    EXPECT_GE(trained->reward, best->reward - 0.05 * std::abs(best->reward))
        << "instance " << inst;
  }
}

TEST(TrainInnerTest, EmptyProblem) {
  RngStream rng = RngStream::Derive(15, "empty");
  EXPECT_FALSE(TrainInner(InnerProblem{}, DefaultConfig(), rng).ok());
}

ExperimentConfig BanditConfig() {
  ExperimentConfig cfg = SmallConfig(2);
  cfg.rounds = 1;
  for (HolderSpec& h : cfg.holders) h.join_round = 1;
  cfg.outer_budget_bins = 1;
  cfg.outer_episodes = 40;
  return cfg;
}

TEST(TrainOuterTest, SingleRoundBanditSpendsWhenItPays) {
  const ExperimentConfig cfg = BanditConfig();
  auto world = InitWorld(cfg);
  ASSERT_OK(world);
  Environment env(*world);
  EvenInner inner;

  // Both arms evaluated directly.
  double arm_q[2];
  for (int arm = 0; arm < 2; ++arm) {
    EnvState state = env.Reset();
    auto record = env.Step(&state, arm * cfg.total_budget,
                           std::vector<double>(4, 0.25));
    ASSERT_OK(record);
    arm_q[arm] = (*record)->quality.q;
  }
  ASSERT_GT(arm_q[1], arm_q[0]);

  RngStream rng = RngStream::Derive(cfg.seed, "outer");
  auto trained = TrainOuter(env, inner, cfg, rng);
  ASSERT_OK(trained);
  RlOuterStrategy greedy(trained->policy, cfg.total_budget, cfg.outer_budget_bins);
  RngStream unused = RngStream::Derive(0, "unused");
  auto budget = greedy.Budget(env.Reset(), env, unused);
  ASSERT_OK(budget);
  EXPECT_EQ(*budget, cfg.total_budget);
  EXPECT_EQ(trained->best.quality.q, arm_q[1]);
}

TEST(TrainOuterTest, BudgetTraceAndDeterminism) {
  ExperimentConfig cfg = SmallConfig(3);
  cfg.outer_episodes = 6;
  auto run = [&cfg] {
    auto world = InitWorld(cfg);
    EXPECT_TRUE(world.ok());
    Environment env(*world);
    EvenInner inner;
    RngStream rng = RngStream::Derive(cfg.seed, "outer");
    auto trained = TrainOuter(env, inner, cfg, rng);
    EXPECT_TRUE(trained.ok()) << trained.status();
    return *trained;
  };
  const OuterTrainingResult a = run();
  const OuterTrainingResult b = run();
  ASSERT_EQ(a.episode_quality.size(), 7u);
  EXPECT_EQ(a.episode_quality, b.episode_quality);
  EXPECT_EQ(a.best_episode, b.best_episode);
  EXPECT_EQ(a.policy.Parameters(), b.policy.Parameters());
  ASSERT_EQ(a.best.ledger.size(), 3u);
  double spent = 0.0;
  for (size_t t = 0; t < a.best.ledger.size(); ++t) {
    EXPECT_EQ(a.best.ledger[t].budget, b.best.ledger[t].budget);
    EXPECT_GE(a.best.ledger[t].budget, 0.0);
    spent += a.best.ledger[t].budget;
  }
  EXPECT_LE(spent, cfg.total_budget + 1e-9);
  double best = 0.0;
  for (double q : a.episode_quality) best = std::max(best, q);
  EXPECT_EQ(a.best.quality.q, best);
}

TEST(CheckpointTest, RoundTrip) {
  RngStream rng = RngStream::Derive(16, "ckpt");
  const QNetwork net = RandomNet(5, {80, 40}, 11, rng);
  std::stringstream buffer;
  ASSERT_OK(WriteCheckpoint(net, buffer));
  auto back = ReadCheckpoint(buffer);
  ASSERT_OK(back);
  EXPECT_EQ(back->layer_sizes(), net.layer_sizes());
  EXPECT_EQ(back->Parameters(), net.Parameters());

  const auto path =
      (std::filesystem::temp_directory_path() / "copyalloc_net.ckpt").string();
  ASSERT_OK(SaveCheckpoint(net, path));
  auto loaded = LoadCheckpoint(path);
  ASSERT_OK(loaded);
  const Eigen::VectorXd s = RandomVector(5, rng);
  EXPECT_EQ(*loaded->Forward(s), *net.Forward(s));
}

TEST(CheckpointTest, RejectsDamagedInput) {
  RngStream rng = RngStream::Derive(17, "damaged");
  const QNetwork net = RandomNet(2, {3}, 2, rng);
  std::stringstream buffer;
  ASSERT_OK(WriteCheckpoint(net, buffer));
  std::string bytes = buffer.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 4));
  EXPECT_FALSE(ReadCheckpoint(truncated).ok());
  std::stringstream garbage("{\"format\": \"other\"}\n");
  EXPECT_FALSE(ReadCheckpoint(garbage).ok());
  std::stringstream empty("");
  EXPECT_FALSE(ReadCheckpoint(empty).ok());
}

}  // namespace
}  // namespace copyalloc
