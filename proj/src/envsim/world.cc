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

#include "copyalloc/world.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {
namespace {

Eigen::VectorXd NormalVector(int dim, RngStream& rng) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.Normal();
  return v;
}

Eigen::MatrixXd NormalMatrix(int rows, int cols, RngStream& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.Normal();
  }
  return m;
}

absl::StatusOr<Eigen::MatrixXd> CholeskyFactor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return Eigen::MatrixXd(llt.matrixL());
  const double jitter = 1e-10 * std::max(1.0, cov.trace() / cov.rows());
  llt.compute(cov + jitter * Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
  if (llt.info() != Eigen::Success) {
    return absl::InternalError("covariance is not positive definite");
  }
  return Eigen::MatrixXd(llt.matrixL());
}

}  // namespace

void GaussianAccumulator::Add(const Eigen::VectorXd& x) {
  ++count_;
  sum_ += x;
  outer_.selfadjointView<Eigen::Lower>().rankUpdate(x);
  outer_.triangularView<Eigen::StrictlyUpper>() = outer_.transpose();
}

void GaussianAccumulator::Add(std::span<const Sample> samples) {
  for (const Sample& s : samples) {
    ++count_;
    sum_ += s.features;
    outer_.selfadjointView<Eigen::Lower>().rankUpdate(s.features);
  }
  outer_.triangularView<Eigen::StrictlyUpper>() = outer_.transpose();
}

SurrogateGenerator SurrogateGenerator::Fit(const GaussianModel& prior,
                                           double strength,
                                           const GaussianAccumulator& data) {
  const double total = strength + data.count();
  SurrogateGenerator gen;
  gen.trained_on_ = data.count();
  gen.model_.mean = (strength * prior.mean + data.sum()) / total;
  const Eigen::MatrixXd second =
      (strength * (prior.covariance + prior.mean * prior.mean.transpose()) +
       data.outer()) /
      total;
  Eigen::MatrixXd cov = second - gen.model_.mean * gen.model_.mean.transpose();
  gen.model_.covariance = 0.5 * (cov + cov.transpose());
  return gen;
}

absl::StatusOr<Eigen::MatrixXd> SurrogateGenerator::Generate(
    int count, RngStream& rng) const {
  ASSIGN_OR_RETURN(Eigen::MatrixXd l, CholeskyFactor(model_.covariance));
  const int d = static_cast<int>(model_.mean.size());
  Eigen::MatrixXd rows(count, d);
  for (int i = 0; i < count; ++i) {
    rows.row(i) = (model_.mean + l * NormalVector(d, rng)).transpose();
  }
  return rows;
}

absl::StatusOr<std::vector<Eigen::VectorXd>> SurrogateGenerator::Counterparts(
    std::span<const Sample> samples, const Eigen::MatrixXd& caption) const {
  const Eigen::MatrixXd& cov = model_.covariance;
  if (caption.rows() != cov.rows()) {
    return absl::InvalidArgumentError("caption projection dimension mismatch");
  }
  const Eigen::MatrixXd cp = cov * caption;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(caption.transpose() * cp);
  if (ldlt.info() != Eigen::Success) {
    return absl::InternalError("caption covariance factorization failed");
  }
  // gain * (x - mean) is the conditional-mean correction.
  const Eigen::MatrixXd gain = cp * ldlt.solve(caption.transpose());
  std::vector<Eigen::VectorXd> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    if (s.features.size() != model_.mean.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sample ", s.id, " has the wrong dimension"));
    }
    out.push_back(model_.mean + gain * (s.features - model_.mean));
  }
  return out;
}

std::vector<int> World::Available(int round) const {
  std::vector<int> out;
  for (int k = 0; k < num_holders(); ++k) {
    if (holders[k].spec.join_round <= round) out.push_back(k);
  }
  return out;
}

double World::TotalOfferedPerRound() const {
  double total = 0.0;
  for (const Holder& h : holders) total += h.spec.sample_count;
  return total;
}

TierShape TierShapeFor(QualityTier tier, const WorldParams& params) {
  switch (tier) {
    case QualityTier::kHigh:
      return {0.0, 1.0};
    case QualityTier::kMedium:
      return {params.medium_shift, 1.0};
    case QualityTier::kLow:
      return {params.low_shift, params.low_spread};
  }
  return {};
}

absl::StatusOr<std::shared_ptr<const World>> InitWorld(
    const ExperimentConfig& config) {
  RETURN_IF_ERROR(ValidateConfig(config));
  auto world = std::make_shared<World>();
  world->config = config;
  const WorldParams& params = config.world;
  const int d = params.feature_dim;
  RngStream root = RngStream::Derive(config.seed, "world");

  RngStream geometry = root.Child("geometry");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(NormalMatrix(d, d, geometry));
  const Eigen::MatrixXd rotation = qr.householderQ();
  Eigen::VectorXd scales(d);
  for (int i = 0; i < d; ++i) scales[i] = 0.6 + 0.8 * geometry.Uniform();
  world->reference_covariance =
      rotation * scales.array().square().matrix().asDiagonal() * rotation.transpose();
  world->reference_covariance =
      0.5 * (world->reference_covariance + world->reference_covariance.transpose());
  ASSIGN_OR_RETURN(const Eigen::MatrixXd chol,
                   CholeskyFactor(world->reference_covariance));
  const Eigen::MatrixXd& sigma = world->reference_covariance;

  Eigen::VectorXd u = NormalVector(d, geometry).normalized();
  Eigen::VectorXd v = NormalVector(d, geometry);
  if (d > 1) v -= v.dot(u) * u;
  v.normalize();
  world->shift_direction = u;
  const double sigma_u = std::sqrt(u.dot(sigma * u));
  const double sigma_v = std::sqrt(v.dot(sigma * v));
  world->teacher = NormalVector(d, geometry) / std::sqrt(static_cast<double>(d));

  world->prior.mean = params.prior_shift * sigma_v * v;
  world->prior.covariance = 1.5 * sigma;

  RngStream ref_rng = root.Child("reference");
  world->reference.resize(params.reference_size, d);
  for (int i = 0; i < params.reference_size; ++i) {
    world->reference.row(i) = (chol * NormalVector(d, ref_rng)).transpose();
  }
  ASSIGN_OR_RETURN(world->reference_stats, ComputeFeatureStats(world->reference));

  auto draw_sample = [&](const Eigen::VectorXd& offset, double spread,
                         RngStream& rng) {
    Sample s;
    s.features = offset + spread * (chol * NormalVector(d, rng));
    s.target = world->teacher.dot(s.features) + params.label_noise * rng.Normal();
    return s;
  };

  RngStream eval_rng = root.Child("evaluation");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < params.evaluation_size; ++i) {
    Sample s = draw_sample(zero, 1.0, eval_rng);
    s.id = -(i + 1);
    s.holder = 0;
    world->evaluation.push_back(std::move(s));
  }

  RngStream caption_rng = root.Child("caption");
  world->caption = NormalMatrix(d, params.caption_dim, caption_rng);
  RngStream embed_rng = root.Child("embedder");
  world->embedder = SemanticEmbedder::Create(d, params.embedding_dim,
                                             params.extractor_gain, embed_rng);
  RngStream stack_rng = root.Child("stack");
  ASSIGN_OR_RETURN(world->stack,
                   FeatureStack::Create(d, params.perceptual_layers,
                                        params.extractor_gain, stack_rng));

  int next_id = 0;
  for (size_t k = 0; k < config.holders.size(); ++k) {
    Holder holder;
    holder.spec = config.holders[k];
    holder.batches.resize(config.rounds);
    const TierShape shape = TierShapeFor(holder.spec.tier, params);
    const Eigen::VectorXd offset = shape.shift * sigma_u * u;
    RngStream holder_rng = root.Child("holder", k);
    for (int t = holder.spec.join_round; t <= config.rounds; ++t) {
      RngStream batch_rng = holder_rng.Child("round", t);
      std::vector<Sample>& batch = holder.batches[t - 1];
      for (int i = 0; i < holder.spec.sample_count; ++i) {
        Sample s = draw_sample(offset, shape.spread, batch_rng);
        s.id = next_id++;
        s.holder = static_cast<int>(k);
        batch.push_back(std::move(s));
      }
    }
    world->holders.push_back(std::move(holder));
  }
  return std::shared_ptr<const World>(std::move(world));
}

}  // namespace copyalloc
