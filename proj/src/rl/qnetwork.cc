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

#include "copyalloc/qnetwork.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace copyalloc {

absl::StatusOr<QNetwork> QNetwork::Zeros(std::span<const int> layer_sizes) {
  if (layer_sizes.size() < 2) {
    return absl::InvalidArgumentError("network needs input and output sizes");
  }
  QNetwork net;
  for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    if (layer_sizes[l] < 1 || layer_sizes[l + 1] < 1) {
      return absl::InvalidArgumentError("layer sizes must be positive");
    }
    net.weights_.push_back(
        Eigen::MatrixXd::Zero(layer_sizes[l + 1], layer_sizes[l]));
    net.biases_.push_back(Eigen::VectorXd::Zero(layer_sizes[l + 1]));
  }
  return net;
}

absl::StatusOr<QNetwork> QNetwork::Create(int input_dim,
                                          std::span<const int> hidden,
                                          int num_actions, RngStream& rng) {
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(num_actions);
  absl::StatusOr<QNetwork> net = Zeros(sizes);
  if (!net.ok()) return net;
  for (Eigen::MatrixXd& w : net->weights_) {
    const double scale = std::sqrt(2.0 / static_cast<double>(w.cols()));
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = scale * rng.Normal();
    }
  }
  return net;
}

absl::StatusOr<QNetwork::Trace> QNetwork::ForwardTrace(
    const Eigen::VectorXd& state) const {
  if (weights_.empty() || state.size() != weights_.front().cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "network expects input dimension ", input_dim(), ", got ", state.size()));
  }
  Trace trace;
  trace.activations.reserve(weights_.size() + 1);
  trace.activations.push_back(state);
  for (size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * trace.activations.back() + biases_[l];
    if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);
    trace.activations.push_back(std::move(z));
  }
  return trace;
}

absl::StatusOr<Eigen::VectorXd> QNetwork::Forward(
    const Eigen::VectorXd& state) const {
  absl::StatusOr<Trace> trace = ForwardTrace(state);
  if (!trace.ok()) return trace.status();
  return std::move(trace->activations.back());
}

void QNetwork::Backward(const Trace& trace, const Eigen::VectorXd& output_grad,
                        Gradients* grads) const {
  Eigen::VectorXd delta = output_grad;
  for (size_t l = weights_.size(); l-- > 0;) {
    const Eigen::VectorXd& input = trace.activations[l];
    grads->weights[l].noalias() += delta * input.transpose();
    grads->biases[l] += delta;
    if (l == 0) break;
    Eigen::VectorXd back = weights_[l].transpose() * delta;
    // Rectifier derivative; the stored activation is post-ReLU.
    for (Eigen::Index i = 0; i < back.size(); ++i) {
      if (input[i] <= 0.0) back[i] = 0.0;
    }
    delta = std::move(back);
  }
}

QNetwork::Gradients QNetwork::ZeroGradients() const {
  Gradients g;
  for (size_t l = 0; l < weights_.size(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

void QNetwork::Apply(const Gradients& grads, double step) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] -= step * grads.weights[l];
    biases_[l] -= step * grads.biases[l];
  }
}

int QNetwork::num_parameters() const {
  int n = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<int>(weights_[l].size() + biases_[l].size());
  }
  return n;
}

Eigen::VectorXd QNetwork::Parameters() const {
  Eigen::VectorXd out(num_parameters());
  int at = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    out.segment(at, weights_[l].size()) =
        Eigen::Map<const Eigen::VectorXd>(weights_[l].data(), weights_[l].size());
    at += static_cast<int>(weights_[l].size());
    out.segment(at, biases_[l].size()) = biases_[l];
    at += static_cast<int>(biases_[l].size());
  }
  return out;
}

absl::Status QNetwork::SetParameters(const Eigen::VectorXd& params) {
  if (params.size() != num_parameters()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", num_parameters(), " parameters, got ", params.size()));
  }
  int at = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(weights_[l].data(), weights_[l].size()) =
        params.segment(at, weights_[l].size());
    at += static_cast<int>(weights_[l].size());
    biases_[l] = params.segment(at, biases_[l].size());
    at += static_cast<int>(biases_[l].size());
  }
  return absl::OkStatus();
}

std::vector<int> QNetwork::layer_sizes() const {
  std::vector<int> sizes;
  if (weights_.empty()) return sizes;
  sizes.push_back(static_cast<int>(weights_.front().cols()));
  for (const Eigen::MatrixXd& w : weights_) sizes.push_back(static_cast<int>(w.rows()));
  return sizes;
}

int QNetwork::input_dim() const {
  return weights_.empty() ? 0 : static_cast<int>(weights_.front().cols());
}

int QNetwork::num_actions() const {
  return weights_.empty() ? 0 : static_cast<int>(weights_.back().rows());
}

}  // namespace copyalloc
