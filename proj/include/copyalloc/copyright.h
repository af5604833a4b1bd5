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


// Two-part copyright metric: semantic distance between embeddings and
// LPIPS-style perceptual distance between channel-normalized feature maps,
// combined into a per-sample similarity and min-max normalized into a loss.

#ifndef COPYALLOC_COPYRIGHT_H_
#define COPYALLOC_COPYRIGHT_H_

#include <span>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "copyalloc/config.h"
#include "copyalloc/rng.h"
#include "copyalloc/types.h"

namespace copyalloc {

// Activations of one layer, stored channel-major: values[(c * H + h) * W + w].
struct FeatureTensor {
  LayerShape shape;
  Eigen::VectorXd values;

  double at(int c, int h, int w) const {
    return values[(c * shape.height + h) * shape.width + w];
  }
};

// Scales each spatial position's channel vector to unit norm. All-zero
// positions stay zero.
FeatureTensor ChannelNormalize(const FeatureTensor& tensor);

// e = tanh(gain * W x) with W drawn N(0, 1 / input_dim).
class SemanticEmbedder {
 public:
  SemanticEmbedder() = default;
  SemanticEmbedder(Eigen::MatrixXd weights, double gain)
      : weights_(std::move(weights)), gain_(gain) {}

  static SemanticEmbedder Create(int input_dim, int embedding_dim, double gain,
                                 RngStream& rng);

  absl::StatusOr<Eigen::VectorXd> Embed(const Eigen::VectorXd& x) const;

  int input_dim() const { return static_cast<int>(weights_.cols()); }
  int embedding_dim() const { return static_cast<int>(weights_.rows()); }

 private:
  Eigen::MatrixXd weights_;
  double gain_ = 1.0;
};

// Sequential tanh layers. Layer l maps the flattened output of layer l - 1
// (the raw input for l = 1) to a C_l x H_l x W_l tensor.
class FeatureStack {
 public:
  FeatureStack() = default;

  static absl::StatusOr<FeatureStack> Create(int input_dim,
                                             std::span<const LayerShape> shapes,
                                             double gain, RngStream& rng);

  // Raw (unnormalized) activations of every layer.
  absl::StatusOr<std::vector<FeatureTensor>> Activations(
      const Eigen::VectorXd& x) const;

  const std::vector<LayerShape>& shapes() const { return shapes_; }
  // Per-channel weight w_l of each layer; all ones after Create.
  const std::vector<Eigen::VectorXd>& layer_weights() const { return weights_; }
  void set_layer_weights(std::vector<Eigen::VectorXd> weights) {
    weights_ = std::move(weights);
  }

 private:
  std::vector<LayerShape> shapes_;
  std::vector<Eigen::MatrixXd> maps_;
  std::vector<Eigen::VectorXd> weights_;
  double gain_ = 1.0;
};

// Mean squared coordinate difference.
absl::StatusOr<double> SemanticDistance(const Eigen::VectorXd& e1,
                                        const Eigen::VectorXd& e2);

// sum_l 1 / (H_l W_l) sum_{h,w} |w_l * (z_hat - y_hat)|^2 over raw layer
// activations, which are channel-normalized here.
absl::StatusOr<double> PerceptualDistance(
    std::span<const FeatureTensor> x_layers,
    std::span<const FeatureTensor> y_layers,
    std::span<const Eigen::VectorXd> layer_weights);

absl::StatusOr<double> PerceptualDistance(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y,
                                          const FeatureStack& stack);

// a * ds + b * dp.
double ComprehensiveSimilarity(double ds, double dp, double a, double b);

// 1 - (c - c_min) / (c_max - c_min); all ones when every value is equal.
std::vector<double> CopyrightLosses(std::span<const double> similarity);

absl::StatusOr<std::vector<double>> HolderCopyright(
    std::span<const double> losses, std::span<const int> holder_of,
    int num_holders);

struct CopyrightResult {
  int round = 0;
  std::vector<double> semantic;
  std::vector<double> perceptual;
  std::vector<double> similarity;
  std::vector<double> loss;
  std::vector<double> per_holder;
  double c_min = 0.0;
  double c_max = 0.0;
};

// Precomputed features of one item, either a training sample or its
// generated counterpart.
struct FeatureRecord {
  std::string id;
  int holder = 0;
  Eigen::VectorXd embedding;
  std::vector<FeatureTensor> layers;
};

// Scores train[i] against generated[i].
absl::StatusOr<CopyrightResult> ScoreRecords(
    std::span<const FeatureRecord> train,
    std::span<const FeatureRecord> generated,
    std::span<const Eigen::VectorXd> layer_weights, double a, double b,
    int num_holders);

// Extracts features with the surrogate extractors and scores each training
// sample against generated[i].
absl::StatusOr<CopyrightResult> ScoreRound(
    std::span<const Sample> train, std::span<const Eigen::VectorXd> generated,
    const SemanticEmbedder& embedder, const FeatureStack& stack, double a,
    double b, int num_holders);

absl::StatusOr<FeatureRecord> ExtractRecord(const Sample& sample,
                                            const SemanticEmbedder& embedder,
                                            const FeatureStack& stack);

// JSON-lines ingestion: one object per line with keys id, holder (optional,
// default 0), embedding and layers = [{channels, height, width, values}].
absl::StatusOr<std::vector<FeatureRecord>> ParseFeatureRecords(
    std::string_view text);
absl::StatusOr<std::vector<FeatureRecord>> LoadFeatureRecords(
    const std::string& path);

}  // namespace copyalloc

#endif  // COPYALLOC_COPYRIGHT_H_
