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


// The simulated data world: holders with per-round batches drawn by quality
// tier, the reference distribution the generator is judged against, the
// attribution evaluation set, the pre-trained generator prior and the
// surrogate feature extractors.

#ifndef COPYALLOC_WORLD_H_
#define COPYALLOC_WORLD_H_

#include <memory>
#include <span>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "copyalloc/config.h"
#include "copyalloc/copyright.h"
#include "copyalloc/quality.h"
#include "copyalloc/rng.h"
#include "copyalloc/types.h"

namespace copyalloc {

struct GaussianModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// Running sums over the samples a generator has been trained on.
class GaussianAccumulator {
 public:
  explicit GaussianAccumulator(int dim = 0)
      : sum_(Eigen::VectorXd::Zero(dim)), outer_(Eigen::MatrixXd::Zero(dim, dim)) {}

  void Add(const Eigen::VectorXd& x);
  void Add(std::span<const Sample> samples);

  int count() const { return count_; }
  const Eigen::VectorXd& sum() const { return sum_; }
  const Eigen::MatrixXd& outer() const { return outer_; }

 private:
  int count_ = 0;
  Eigen::VectorXd sum_;
  Eigen::MatrixXd outer_;
};

// Surrogate generative model: a Gaussian fitted to the training samples with
// `strength` pseudo-samples from the prior. The fitted moments are those of
// the pooled prior and data populations.
class SurrogateGenerator {
 public:
  static SurrogateGenerator Fit(const GaussianModel& prior, double strength,
                                const GaussianAccumulator& data);

  const GaussianModel& model() const { return model_; }
  int trained_on() const { return trained_on_; }

  // `count` i.i.d. draws, one per row.
  absl::StatusOr<Eigen::MatrixXd> Generate(int count, RngStream& rng) const;

  // Counterpart of x generated from its caption c = P^T x: the conditional
  // mean E[y | P^T y = P^T x] under the fitted Gaussian.
  absl::StatusOr<std::vector<Eigen::VectorXd>> Counterparts(
      std::span<const Sample> samples, const Eigen::MatrixXd& caption) const;

 private:
  GaussianModel model_;
  int trained_on_ = 0;
};

struct Holder {
  HolderSpec spec;
  // batches[t - 1] is the batch offered in round t; empty before join_round.
  std::vector<std::vector<Sample>> batches;
};

struct World {
  ExperimentConfig config;
  std::vector<Holder> holders;
  Eigen::MatrixXd reference;
  FeatureStats reference_stats;
  std::vector<Sample> evaluation;
  GaussianModel prior;
  Eigen::MatrixXd caption;
  SemanticEmbedder embedder;
  FeatureStack stack;
  Eigen::VectorXd teacher;
  Eigen::MatrixXd reference_covariance;
  Eigen::VectorXd shift_direction;

  int num_holders() const { return static_cast<int>(holders.size()); }
  int dim() const { return config.world.feature_dim; }
  // Holders whose join_round <= t.
  std::vector<int> Available(int round) const;
  double TotalOfferedPerRound() const;
};

// Materializes the world for `config` and its seed.
absl::StatusOr<std::shared_ptr<const World>> InitWorld(
    const ExperimentConfig& config);

// Mean offset and spread multiplier of a tier, in reference std units along
// the shift direction.
struct TierShape {
  double shift = 0.0;
  double spread = 1.0;
};
TierShape TierShapeFor(QualityTier tier, const WorldParams& params);

}  // namespace copyalloc

#endif  // COPYALLOC_WORLD_H_
