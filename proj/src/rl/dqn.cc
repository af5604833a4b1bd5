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

#include "copyalloc/dqn.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "absl/strings/str_cat.h"

namespace copyalloc {

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(std::max(1, capacity)) {
  items_.reserve(std::min(capacity_, 4096));
}

void ReplayBuffer::Add(Transition transition) {
  if (static_cast<int>(items_.size()) < capacity_) {
    items_.push_back(std::move(transition));
    return;
  }
  items_[head_] = std::move(transition);
  head_ = (head_ + 1) % items_.size();
}

const Transition& ReplayBuffer::at(int i) const {
  return items_[(head_ + i) % items_.size()];
}

std::vector<const Transition*> ReplayBuffer::Sample(int count,
                                                    RngStream& rng) const {
  std::vector<const Transition*> out;
  if (items_.empty()) return out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(&items_[rng.UniformIndex(items_.size())]);
  return out;
}

int Argmax(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

int SelectAction(std::span<const double> values, double epsilon,
                 RngStream& rng) {
  if (rng.Uniform() < epsilon) {
    return static_cast<int>(rng.UniformIndex(values.size()));
  }
  return Argmax(values);
}

int SelectAction(const Eigen::VectorXd& values, double epsilon,
                 RngStream& rng) {
  return SelectAction(std::span<const double>(values.data(), values.size()),
                      epsilon, rng);
}

int Argmax(const Eigen::VectorXd& values) {
  return Argmax(std::span<const double>(values.data(), values.size()));
}

namespace {

using StateKey = std::vector<double>;

StateKey KeyOf(const Eigen::VectorXd& v) {
  return StateKey(v.data(), v.data() + v.size());
}

}  // namespace

absl::StatusOr<double> DqnUpdate(QNetwork& net, const QNetwork& target,
                                 std::span<const Transition* const> batch,
                                 double gamma, double step_size) {
  if (batch.empty()) return absl::InvalidArgumentError("empty batch");
  const int actions = net.num_actions();

  std::map<StateKey, double> next_max;
  for (const Transition* t : batch) {
    if (t->terminal) continue;
    StateKey key = KeyOf(t->next_state);
    if (next_max.contains(key)) continue;
    absl::StatusOr<Eigen::VectorXd> q = target.Forward(t->next_state);
    if (!q.ok()) return q.status();
    next_max.emplace(std::move(key), q->maxCoeff());
  }

  struct Group {
    QNetwork::Trace trace;
    Eigen::VectorXd output_grad;
  };
  std::map<StateKey, Group> groups;
  double loss = 0.0;
  for (const Transition* t : batch) {
    if (t->action < 0 || t->action >= actions) {
      return absl::InvalidArgumentError(
          absl::StrCat("action ", t->action, " out of range"));
    }
    StateKey key = KeyOf(t->state);
    auto it = groups.find(key);
    if (it == groups.end()) {
      absl::StatusOr<QNetwork::Trace> trace = net.ForwardTrace(t->state);
      if (!trace.ok()) return trace.status();
      it = groups.emplace(std::move(key),
                          Group{*std::move(trace), Eigen::VectorXd::Zero(actions)})
               .first;
    }
    double y = t->reward;
    if (!t->terminal) y += gamma * next_max.at(KeyOf(t->next_state));
    const double q = it->second.trace.activations.back()[t->action];
    const double err = q - y;
    loss += 0.5 * err * err;
    it->second.output_grad[t->action] += err;
  }
  if (!std::isfinite(loss)) {
    return absl::OutOfRangeError("non-finite Bellman loss");
  }
  QNetwork::Gradients grads = net.ZeroGradients();
  for (const auto& [key, group] : groups) {
    net.Backward(group.trace, group.output_grad, &grads);
  }
  net.Apply(grads, step_size);
  return loss;
}

}  // namespace copyalloc
