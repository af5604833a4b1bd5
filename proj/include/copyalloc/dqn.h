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


// Experience replay, epsilon-greedy control and the Bellman regression step.

#ifndef COPYALLOC_DQN_H_
#define COPYALLOC_DQN_H_

#include <span>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "copyalloc/qnetwork.h"
#include "copyalloc/rng.h"

namespace copyalloc {

struct Transition {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool terminal = true;
};

// Bounded FIFO of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  void Add(Transition transition);
  // `count` transitions drawn uniformly with replacement.
  std::vector<const Transition*> Sample(int count, RngStream& rng) const;

  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  // i = 0 is the oldest retained transition.
  const Transition& at(int i) const;

 private:
  int capacity_;
  size_t head_ = 0;  // slot of the oldest item once full
  std::vector<Transition> items_;
};

// Argmax of `values` (lowest index on ties) with probability 1 - epsilon,
// otherwise a uniform index.
int SelectAction(std::span<const double> values, double epsilon, RngStream& rng);
int Argmax(std::span<const double> values);
int SelectAction(const Eigen::VectorXd& values, double epsilon, RngStream& rng);
int Argmax(const Eigen::VectorXd& values);

// One gradient step on L = sum_i (Q(s_i, a_i) - y_i)^2 / 2 over the batch, with
// y_i = r_i + gamma * max_a' Q_target(s'_i, a') (just r_i when terminal).
// Returns L before the step. Transitions sharing a state share one
// forward and backward pass.
absl::StatusOr<double> DqnUpdate(QNetwork& net, const QNetwork& target,
                                 std::span<const Transition* const> batch,
                                 double gamma, double step_size);

}  // namespace copyalloc

#endif  // COPYALLOC_DQN_H_
