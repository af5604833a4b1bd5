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


// TRAK and D-TRAK attribution on a ridge-regression surrogate, min-max
// normalization into contributions, per-holder aggregation and an exact
// leave-one-out oracle.

#ifndef COPYALLOC_ATTRIBUTION_H_
#define COPYALLOC_ATTRIBUTION_H_

#include <functional>
#include <span>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "copyalloc/config.h"
#include "copyalloc/rng.h"
#include "copyalloc/types.h"

namespace copyalloc {

// Linear surrogate with output F(x; theta) = theta . x - target, the
// prediction residual. Loss is F^2 / 2, so the D-TRAK measurement F^2 is
// twice the training loss.
class SurrogateModel {
 public:
  SurrogateModel() = default;
  explicit SurrogateModel(Eigen::VectorXd theta) : theta_(std::move(theta)) {}

  // Exact minimizer of sum_i F(x_i)^2 / 2 + regularizer * |theta|^2 / 2.
  static absl::StatusOr<SurrogateModel> Fit(std::span<const Sample> samples,
                                            double regularizer);

  static double OutputAt(const Eigen::VectorXd& theta, const Sample& x);

  double Output(const Sample& x) const { return OutputAt(theta_, x); }
  double Loss(const Sample& x) const;
  // Gradient of F with respect to theta.
  Eigen::VectorXd OutputGradient(const Sample& x) const;
  // Gradient of F^2 with respect to theta.
  Eigen::VectorXd MeasurementGradient(const Sample& x) const;

  const Eigen::VectorXd& theta() const { return theta_; }
  int dim() const { return static_cast<int>(theta_.size()); }

 private:
  Eigen::VectorXd theta_;
};

// d_p x d_proj projection with i.i.d. standard normal entries.
class ProjectionMatrix {
 public:
  ProjectionMatrix() = default;
  explicit ProjectionMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {}

  static absl::StatusOr<ProjectionMatrix> Draw(int param_dim, int proj_dim,
                                               RngStream& rng);
  static ProjectionMatrix Identity(int dim);

  const Eigen::MatrixXd& matrix() const { return p_; }
  int param_dim() const { return static_cast<int>(p_.rows()); }
  int proj_dim() const { return static_cast<int>(p_.cols()); }

 private:
  Eigen::MatrixXd p_;
};

// P^T grad F for TRAK, P^T grad F^2 for D-TRAK.
absl::StatusOr<Eigen::VectorXd> ProjectedGradient(const SurrogateModel& model,
                                                  const Sample& x,
                                                  const ProjectionMatrix& p,
                                                  AttributionMeasure measure);

struct AttributionResult {
  int round = 0;
  std::vector<double> raw;
  std::vector<double> normalized;
  std::vector<double> per_holder;
  double beta_min = 0.0;
  double beta_max = 0.0;
};

// One model-retraining subset with its projection.
struct SubsetDraw {
  std::vector<int> indices;
  ProjectionMatrix projection;
};

// Scores every training sample against the evaluation set. For each subset
// s a model theta_s is fitted on the subset and the kernel Phi_s is formed
// from the projected gradients of the whole training set at theta_s:
//
//   tau_j = (1/N) sum_s g_s^T (Phi_s^T Phi_s + eta I)^-1 phi_s(x_j) * q_j
//
// with g_s the summed projected gradient over the evaluation set and
// eta = 1e-8 trace / |train|. For TRAK q_j is the subset-averaged output
// F(x_j); for D-TRAK q_j = 1. Only `raw` of the result is filled.
absl::StatusOr<AttributionResult> TrakScoresForSubsets(
    std::span<const Sample> train, std::span<const Sample> evaluation,
    std::span<const SubsetDraw> subsets, double regularizer,
    AttributionMeasure measure);

// Draws params.num_subsets subsets of params.subset_size samples without
// replacement and one projection per subset from `rng`, then scores.
absl::StatusOr<AttributionResult> TrakScores(std::span<const Sample> train,
                                             std::span<const Sample> evaluation,
                                             const AttributionParams& params,
                                             RngStream& rng);

// Subset size actually used for `n` training samples.
int EffectiveSubsetSize(const AttributionParams& params, int n);

// Min-max normalization; all zeros when every value is equal.
std::vector<double> NormalizeContributions(std::span<const double> raw);

absl::StatusOr<std::vector<double>> HolderContribution(
    std::span<const double> normalized, std::span<const int> holder_of,
    int num_holders);

// Fills normalized, per_holder and the min/max of `result.raw`.
absl::Status FinalizeAttribution(std::span<const Sample> train, int num_holders,
                                 AttributionResult* result);

using EvalFn = std::function<double(const SurrogateModel&)>;

// Sum of F(z)^2 over the evaluation set.
EvalFn SquaredOutputMeasure(std::span<const Sample> evaluation);

// eval_fn(fit without sample i) - eval_fn(fit on everything), per sample.
absl::StatusOr<std::vector<double>> LooOracle(std::span<const Sample> train,
                                              const EvalFn& eval_fn,
                                              double regularizer);

}  // namespace copyalloc

#endif  // COPYALLOC_ATTRIBUTION_H_
