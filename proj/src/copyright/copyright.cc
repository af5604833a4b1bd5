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

#include "copyalloc/copyright.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {

FeatureTensor ChannelNormalize(const FeatureTensor& tensor) {
  FeatureTensor out = tensor;
  const int channels = tensor.shape.channels;
  const int plane = tensor.shape.height * tensor.shape.width;
  for (int pos = 0; pos < plane; ++pos) {
    double norm2 = 0.0;
    for (int c = 0; c < channels; ++c) {
      const double v = tensor.values[c * plane + pos];
      norm2 += v * v;
    }
    if (norm2 == 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (int c = 0; c < channels; ++c) out.values[c * plane + pos] *= inv;
  }
  return out;
}

SemanticEmbedder SemanticEmbedder::Create(int input_dim, int embedding_dim,
                                          double gain, RngStream& rng) {
  Eigen::MatrixXd w(embedding_dim, input_dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (int c = 0; c < input_dim; ++c) {
    for (int r = 0; r < embedding_dim; ++r) w(r, c) = scale * rng.Normal();
  }
  return SemanticEmbedder(std::move(w), gain);
}

absl::StatusOr<Eigen::VectorXd> SemanticEmbedder::Embed(
    const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "embedder expects dimension ", input_dim(), ", got ", x.size()));
  }
  return Eigen::VectorXd((gain_ * (weights_ * x)).array().tanh());
}

absl::StatusOr<FeatureStack> FeatureStack::Create(
    int input_dim, std::span<const LayerShape> shapes, double gain,
    RngStream& rng) {
  if (shapes.empty()) {
    return absl::InvalidArgumentError("feature stack needs at least one layer");
  }
  FeatureStack stack;
  stack.gain_ = gain;
  int in = input_dim;
  for (const LayerShape& shape : shapes) {
    if (shape.channels < 1 || shape.height < 1 || shape.width < 1) {
      return absl::InvalidArgumentError("layer dimensions must be positive");
    }
    const int out = shape.size();
    Eigen::MatrixXd w(out, in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (int c = 0; c < in; ++c) {
      for (int r = 0; r < out; ++r) w(r, c) = scale * rng.Normal();
    }
    stack.shapes_.push_back(shape);
    stack.maps_.push_back(std::move(w));
    stack.weights_.push_back(Eigen::VectorXd::Ones(shape.channels));
    in = out;
  }
  return stack;
}

absl::StatusOr<std::vector<FeatureTensor>> FeatureStack::Activations(
    const Eigen::VectorXd& x) const {
  if (maps_.empty() || x.size() != maps_.front().cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature stack input dimension mismatch: got ", x.size()));
  }
  std::vector<FeatureTensor> layers;
  Eigen::VectorXd z = x;
  for (size_t l = 0; l < maps_.size(); ++l) {
    z = (gain_ * (maps_[l] * z)).array().tanh();
    layers.push_back({shapes_[l], z});
  }
  return layers;
}

absl::StatusOr<double> SemanticDistance(const Eigen::VectorXd& e1,
                                        const Eigen::VectorXd& e2) {
  if (e1.size() != e2.size() || e1.size() == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "embedding dimension mismatch: ", e1.size(), " vs ", e2.size()));
  }
  return (e1 - e2).squaredNorm() / static_cast<double>(e1.size());
}

absl::StatusOr<double> PerceptualDistance(
    std::span<const FeatureTensor> x_layers,
    std::span<const FeatureTensor> y_layers,
    std::span<const Eigen::VectorXd> layer_weights) {
  if (x_layers.size() != y_layers.size() ||
      x_layers.size() != layer_weights.size()) {
    return absl::InvalidArgumentError("layer count mismatch");
  }
  double total = 0.0;
  for (size_t l = 0; l < x_layers.size(); ++l) {
    const LayerShape& shape = x_layers[l].shape;
    if (!(shape == y_layers[l].shape) ||
        x_layers[l].values.size() != shape.size() ||
        y_layers[l].values.size() != shape.size() ||
        layer_weights[l].size() != shape.channels) {
      return absl::InvalidArgumentError(
          absl::StrCat("shape mismatch at layer ", l));
    }
    const FeatureTensor zx = ChannelNormalize(x_layers[l]);
    const FeatureTensor zy = ChannelNormalize(y_layers[l]);
    const int plane = shape.height * shape.width;
    double layer = 0.0;
    for (int c = 0; c < shape.channels; ++c) {
      const double w = layer_weights[l][c];
      for (int pos = 0; pos < plane; ++pos) {
        const double diff = w * (zx.values[c * plane + pos] - zy.values[c * plane + pos]);
        layer += diff * diff;
      }
    }
    total += layer / plane;
  }
  return total;
}

absl::StatusOr<double> PerceptualDistance(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y,
                                          const FeatureStack& stack) {
  ASSIGN_OR_RETURN(std::vector<FeatureTensor> fx, stack.Activations(x));
  ASSIGN_OR_RETURN(std::vector<FeatureTensor> fy, stack.Activations(y));
  return PerceptualDistance(fx, fy, stack.layer_weights());
}

double ComprehensiveSimilarity(double ds, double dp, double a, double b) {
  return a * ds + b * dp;
}

std::vector<double> CopyrightLosses(std::span<const double> similarity) {
  std::vector<double> out(similarity.size(), 1.0);
  if (similarity.empty()) return out;
  const auto [lo, hi] = std::minmax_element(similarity.begin(), similarity.end());
  const double range = *hi - *lo;
  if (!(range > 0)) return out;
  for (size_t i = 0; i < similarity.size(); ++i) {
    out[i] = std::clamp(1.0 - (similarity[i] - *lo) / range, 0.0, 1.0);
  }
  out[lo - similarity.begin()] = 1.0;
  out[hi - similarity.begin()] = 0.0;
  return out;
}

absl::StatusOr<std::vector<double>> HolderCopyright(
    std::span<const double> losses, std::span<const int> holder_of,
    int num_holders) {
  return SumByHolder(losses, holder_of, num_holders);
}

absl::StatusOr<CopyrightResult> ScoreRecords(
    std::span<const FeatureRecord> train,
    std::span<const FeatureRecord> generated,
    std::span<const Eigen::VectorXd> layer_weights, double a, double b,
    int num_holders) {
  if (train.size() != generated.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need one generated item per training sample: ", train.size(),
        " training vs ", generated.size(), " generated"));
  }
  CopyrightResult result;
  const size_t n = train.size();
  result.semantic.resize(n);
  result.perceptual.resize(n);
  result.similarity.resize(n);
  std::vector<int> holders(n);
  for (size_t i = 0; i < n; ++i) {
    auto ds = SemanticDistance(train[i].embedding, generated[i].embedding);
    if (!ds.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", train[i].id, ": ", ds.status().message()));
    }
    auto dp = PerceptualDistance(train[i].layers, generated[i].layers,
                                 layer_weights);
    if (!dp.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", train[i].id, ": ", dp.status().message()));
    }
    result.semantic[i] = *ds;
    result.perceptual[i] = *dp;
    result.similarity[i] = ComprehensiveSimilarity(*ds, *dp, a, b);
    holders[i] = train[i].holder;
  }
  result.loss = CopyrightLosses(result.similarity);
  if (n > 0) {
    const auto [lo, hi] =
        std::minmax_element(result.similarity.begin(), result.similarity.end());
    result.c_min = *lo;
    result.c_max = *hi;
  }
  ASSIGN_OR_RETURN(result.per_holder,
                   HolderCopyright(result.loss, holders, num_holders));
  return result;
}

absl::StatusOr<FeatureRecord> ExtractRecord(const Sample& sample,
                                            const SemanticEmbedder& embedder,
                                            const FeatureStack& stack) {
  FeatureRecord record;
  record.id = absl::StrCat(sample.id);
  record.holder = sample.holder;
  ASSIGN_OR_RETURN(record.embedding, embedder.Embed(sample.features));
  ASSIGN_OR_RETURN(record.layers, stack.Activations(sample.features));
  return record;
}

absl::StatusOr<CopyrightResult> ScoreRound(
    std::span<const Sample> train, std::span<const Eigen::VectorXd> generated,
    const SemanticEmbedder& embedder, const FeatureStack& stack, double a,
    double b, int num_holders) {
  if (train.size() != generated.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need one generated item per training sample: ", train.size(),
        " training vs ", generated.size(), " generated"));
  }
  std::vector<FeatureRecord> train_records;
  std::vector<FeatureRecord> generated_records;
  train_records.reserve(train.size());
  generated_records.reserve(train.size());
  for (size_t i = 0; i < train.size(); ++i) {
    ASSIGN_OR_RETURN(FeatureRecord record,
                     ExtractRecord(train[i], embedder, stack));
    train_records.push_back(std::move(record));
    Sample counterpart = train[i];
    counterpart.features = generated[i];
    ASSIGN_OR_RETURN(record, ExtractRecord(counterpart, embedder, stack));
    generated_records.push_back(std::move(record));
  }
  return ScoreRecords(train_records, generated_records, stack.layer_weights(),
                      a, b, num_holders);
}

}  // namespace copyalloc
