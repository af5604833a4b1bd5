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


// Feed-forward Q-value network with rectifier hidden layers, a linear head
// and hand-written backpropagation.

#ifndef COPYALLOC_QNETWORK_H_
#define COPYALLOC_QNETWORK_H_

#include <span>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "copyalloc/rng.h"

namespace copyalloc {

class QNetwork {
 public:
  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };

  // Activations of one forward pass; activations[0] is the input and the
  // last entry the action values.
  struct Trace {
    std::vector<Eigen::VectorXd> activations;
  };

  QNetwork() = default;

  // All-zero network with the given layer sizes (input, hidden..., output).
  static absl::StatusOr<QNetwork> Zeros(std::span<const int> layer_sizes);
  // He-normal weights, zero biases.
  static absl::StatusOr<QNetwork> Create(int input_dim,
                                         std::span<const int> hidden,
                                         int num_actions, RngStream& rng);

  absl::StatusOr<Eigen::VectorXd> Forward(const Eigen::VectorXd& state) const;
  absl::StatusOr<Trace> ForwardTrace(const Eigen::VectorXd& state) const;

  // Adds the gradient of sum_a output_grad[a] * Q_a to `grads`.
  void Backward(const Trace& trace, const Eigen::VectorXd& output_grad,
                Gradients* grads) const;

  Gradients ZeroGradients() const;
  // theta -= step * grads.
  void Apply(const Gradients& grads, double step);

  Eigen::VectorXd Parameters() const;
  absl::Status SetParameters(const Eigen::VectorXd& params);
  int num_parameters() const;

  std::vector<int> layer_sizes() const;
  int input_dim() const;
  int num_actions() const;

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

}  // namespace copyalloc

#endif  // COPYALLOC_QNETWORK_H_
