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

#include "copyalloc/attribution.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {
namespace {

absl::Status CheckDims(std::span<const Sample> samples, int dim) {
  for (const Sample& s : samples) {
    if (s.features.size() != dim) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", s.id, " has dimension ", s.features.size(),
                       ", expected ", dim));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<SurrogateModel> SurrogateModel::Fit(
    std::span<const Sample> samples, double regularizer) {
  if (samples.empty()) {
    return absl::InvalidArgumentError("cannot fit on an empty sample set");
  }
  if (!(regularizer > 0)) {
    return absl::InvalidArgumentError("regularizer must be positive");
  }
  const int d = static_cast<int>(samples.front().features.size());
  RETURN_IF_ERROR(CheckDims(samples, d));
  Eigen::MatrixXd gram = regularizer * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  for (const Sample& s : samples) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(s.features);
    rhs += s.target * s.features;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success) {
    return absl::InternalError("normal matrix is not positive definite");
  }
  return SurrogateModel(llt.solve(rhs));
}

double SurrogateModel::OutputAt(const Eigen::VectorXd& theta, const Sample& x) {
  return theta.dot(x.features) - x.target;
}

double SurrogateModel::Loss(const Sample& x) const {
  const double f = Output(x);
  return 0.5 * f * f;
}

Eigen::VectorXd SurrogateModel::OutputGradient(const Sample& x) const {
  return x.features;
}

Eigen::VectorXd SurrogateModel::MeasurementGradient(const Sample& x) const {
  return 2.0 * Output(x) * x.features;
}

absl::StatusOr<ProjectionMatrix> ProjectionMatrix::Draw(int param_dim,
                                                        int proj_dim,
                                                        RngStream& rng) {
  if (param_dim < 1 || proj_dim < 1 || proj_dim > param_dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "projection needs 1 <= proj_dim <= param_dim, got ", proj_dim, " and ",
        param_dim));
  }
  Eigen::MatrixXd p(param_dim, proj_dim);
  for (int c = 0; c < proj_dim; ++c) {
    for (int r = 0; r < param_dim; ++r) p(r, c) = rng.Normal();
  }
  return ProjectionMatrix(std::move(p));
}

ProjectionMatrix ProjectionMatrix::Identity(int dim) {
  return ProjectionMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

absl::StatusOr<Eigen::VectorXd> ProjectedGradient(const SurrogateModel& model,
                                                  const Sample& x,
                                                  const ProjectionMatrix& p,
                                                  AttributionMeasure measure) {
  if (x.features.size() != model.dim() || p.param_dim() != model.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: model ", model.dim(), ", sample ",
        x.features.size(), ", projection ", p.param_dim()));
  }
  Eigen::VectorXd grad = measure == AttributionMeasure::kTrak
                             ? model.OutputGradient(x)
                             : model.MeasurementGradient(x);
  if (!grad.allFinite()) {
    return absl::OutOfRangeError(
        absl::StrCat("non-finite gradient for sample ", x.id));
  }
  return Eigen::VectorXd(p.matrix().transpose() * grad);
}

absl::StatusOr<AttributionResult> TrakScoresForSubsets(
    std::span<const Sample> train, std::span<const Sample> evaluation,
    std::span<const SubsetDraw> subsets, double regularizer,
    AttributionMeasure measure) {
  if (train.empty()) return absl::InvalidArgumentError("empty training set");
  if (subsets.empty()) return absl::InvalidArgumentError("no subsets");
  const int n = static_cast<int>(train.size());
  const int d = static_cast<int>(train.front().features.size());
  RETURN_IF_ERROR(CheckDims(train, d));
  RETURN_IF_ERROR(CheckDims(evaluation, d));

  Eigen::VectorXd kernel_sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd output_sum = Eigen::VectorXd::Zero(n);
  std::vector<Sample> subset;
  for (const SubsetDraw& draw : subsets) {
    subset.clear();
    for (int i : draw.indices) {
      if (i < 0 || i >= n) {
        return absl::InvalidArgumentError(
            absl::StrCat("subset index ", i, " out of range"));
      }
      subset.push_back(train[i]);
    }
    ASSIGN_OR_RETURN(SurrogateModel model,
                     SurrogateModel::Fit(subset, regularizer));
    const int k = draw.projection.proj_dim();
    Eigen::MatrixXd phi(n, k);
    for (int j = 0; j < n; ++j) {
      ASSIGN_OR_RETURN(Eigen::VectorXd row,
                       ProjectedGradient(model, train[j], draw.projection, measure));
      phi.row(j) = row.transpose();
      output_sum[j] += model.Output(train[j]);
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
    for (const Sample& z : evaluation) {
      ASSIGN_OR_RETURN(Eigen::VectorXd row,
                       ProjectedGradient(model, z, draw.projection, measure));
      g += row;
    }
    Eigen::MatrixXd kernel = phi.transpose() * phi;
    const double eta = 1e-8 * kernel.trace() / n;
    kernel.diagonal().array() += eta;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(kernel);
    if (ldlt.info() != Eigen::Success) {
      return absl::InternalError("attribution kernel factorization failed");
    }
    kernel_sum += phi * ldlt.solve(g);
  }
  const double inv = 1.0 / static_cast<double>(subsets.size());
  AttributionResult result;
  result.raw.resize(n);
  for (int j = 0; j < n; ++j) {
    double weight = 1.0;
    if (measure == AttributionMeasure::kTrak) weight = output_sum[j] * inv;
    result.raw[j] = kernel_sum[j] * inv * weight;
    if (!std::isfinite(result.raw[j])) {
      return absl::OutOfRangeError(
          absl::StrCat("non-finite attribution for sample ", train[j].id));
    }
  }
  return result;
}

int EffectiveSubsetSize(const AttributionParams& params, int n) {
  return params.subset_size > 0 ? params.subset_size : (n + 1) / 2;
}

absl::StatusOr<AttributionResult> TrakScores(std::span<const Sample> train,
                                             std::span<const Sample> evaluation,
                                             const AttributionParams& params,
                                             RngStream& rng) {
  const int n = static_cast<int>(train.size());
  if (n == 0) return absl::InvalidArgumentError("empty training set");
  if (params.num_subsets < 1) {
    return absl::InvalidArgumentError("num_subsets must be >= 1");
  }
  const int k = EffectiveSubsetSize(params, n);
  if (k > n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "subset_size ", k, " exceeds the ", n, " training samples"));
  }
  const int d = static_cast<int>(train.front().features.size());
  std::vector<SubsetDraw> subsets(params.num_subsets);
  std::vector<int> order(n);
  for (int s = 0; s < params.num_subsets; ++s) {
    RngStream subset_rng = rng.Child("subset", s);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < k; ++i) {
      const size_t j = i + subset_rng.UniformIndex(n - i);
      std::swap(order[i], order[j]);
    }
    subsets[s].indices.assign(order.begin(), order.begin() + k);
    RngStream proj_rng = rng.Child("projection", s);
    ASSIGN_OR_RETURN(subsets[s].projection,
                     ProjectionMatrix::Draw(d, params.proj_dim, proj_rng));
  }
  return TrakScoresForSubsets(train, evaluation, subsets, params.ridge,
                              params.measure);
}

std::vector<double> NormalizeContributions(std::span<const double> raw) {
  std::vector<double> out(raw.size(), 0.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  if (!(range > 0)) return out;
  for (size_t i = 0; i < raw.size(); ++i) {
    out[i] = std::clamp((raw[i] - *lo) / range, 0.0, 1.0);
  }
  // Pin the extremes so argmax and argmin survive rounding.
  out[lo - raw.begin()] = 0.0;
  out[hi - raw.begin()] = 1.0;
  return out;
}

absl::StatusOr<std::vector<double>> HolderContribution(
    std::span<const double> normalized, std::span<const int> holder_of,
    int num_holders) {
  return SumByHolder(normalized, holder_of, num_holders);
}

absl::Status FinalizeAttribution(std::span<const Sample> train, int num_holders,
                                 AttributionResult* result) {
  if (result->raw.size() != train.size()) {
    return absl::InvalidArgumentError("raw scores do not match the samples");
  }
  result->normalized = NormalizeContributions(result->raw);
  if (!result->raw.empty()) {
    const auto [lo, hi] = std::minmax_element(result->raw.begin(), result->raw.end());
    result->beta_min = *lo;
    result->beta_max = *hi;
  }
  const std::vector<int> holders = HolderIndices(train);
  ASSIGN_OR_RETURN(result->per_holder,
                   HolderContribution(result->normalized, holders, num_holders));
  return absl::OkStatus();
}

EvalFn SquaredOutputMeasure(std::span<const Sample> evaluation) {
  auto samples = std::make_shared<std::vector<Sample>>(evaluation.begin(),
                                                       evaluation.end());
  return [samples](const SurrogateModel& model) {
    double total = 0.0;
    for (const Sample& z : *samples) {
      const double f = model.Output(z);
      total += f * f;
    }
    return total;
  };
}

absl::StatusOr<std::vector<double>> LooOracle(std::span<const Sample> train,
                                              const EvalFn& eval_fn,
                                              double regularizer) {
  if (train.size() < 2) {
    return absl::InvalidArgumentError("leave-one-out needs at least 2 samples");
  }
  ASSIGN_OR_RETURN(SurrogateModel full, SurrogateModel::Fit(train, regularizer));
  const double base = eval_fn(full);
  std::vector<double> deltas(train.size());
  std::vector<Sample> rest;
  for (size_t i = 0; i < train.size(); ++i) {
    rest.clear();
    for (size_t j = 0; j < train.size(); ++j) {
      if (j != i) rest.push_back(train[j]);
    }
    ASSIGN_OR_RETURN(SurrogateModel model, SurrogateModel::Fit(rest, regularizer));
    deltas[i] = eval_fn(model) - base;
  }
  return deltas;
}

}  // namespace copyalloc
