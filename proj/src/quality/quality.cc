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

#include "copyalloc/quality.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {

absl::StatusOr<FeatureStats> ComputeFeatureStats(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature stats need at least 2 vectors, got ", rows.rows()));
  }
  FeatureStats stats;
  stats.count = static_cast<int>(rows.rows());
  stats.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - stats.mean.transpose();
  stats.covariance = (centered.transpose() * centered) / (rows.rows() - 1.0);
  stats.covariance = 0.5 * (stats.covariance + stats.covariance.transpose());
  return stats;
}

absl::StatusOr<FeatureStats> ComputeFeatureStats(
    std::span<const Eigen::VectorXd> features) {
  if (features.size() < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature stats need at least 2 vectors, got ", features.size()));
  }
  const Eigen::Index q = features.front().size();
  Eigen::MatrixXd rows(features.size(), q);
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != q) {
      return absl::InvalidArgumentError("feature vectors differ in dimension");
    }
    rows.row(i) = features[i].transpose();
  }
  return ComputeFeatureStats(rows);
}

absl::StatusOr<Eigen::MatrixXd> MatrixSqrtPsd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    return absl::InvalidArgumentError("matrix square root needs a square matrix");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    return absl::InvalidArgumentError("matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()));
  if (eig.info() != Eigen::Success) {
    return absl::InternalError("eigendecomposition failed");
  }
  Eigen::VectorXd values = eig.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < -1e-10 * scale) {
      return absl::InvalidArgumentError(absl::StrCat(
          "matrix is not positive semidefinite (eigenvalue ", values[i], ")"));
    }
    values[i] = std::sqrt(std::max(values[i], 0.0));
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  Eigen::MatrixXd s = v * values.asDiagonal() * v.transpose();
  return Eigen::MatrixXd(0.5 * (s + s.transpose()));
}

absl::StatusOr<double> Fid(const FeatureStats& x, const FeatureStats& y) {
  if (x.mean.size() != y.mean.size() || x.covariance.rows() != y.covariance.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature dimension mismatch: ", x.mean.size(), " vs ", y.mean.size()));
  }
  ASSIGN_OR_RETURN(Eigen::MatrixXd sqrt_x, MatrixSqrtPsd(x.covariance));
  Eigen::MatrixXd inner = sqrt_x * y.covariance * sqrt_x;
  inner = 0.5 * (inner + inner.transpose());
  ASSIGN_OR_RETURN(Eigen::MatrixXd cross, MatrixSqrtPsd(inner));
  const double mean_term = (x.mean - y.mean).squaredNorm();
  const double trace_term =
      x.covariance.trace() + y.covariance.trace() - 2.0 * cross.trace();
  return std::max(0.0, mean_term + trace_term);
}

double ModelQuality(double fid) { return 100.0 / (fid + 1e-6); }

QualityScore MakeQualityScore(double fid) { return {fid, ModelQuality(fid)}; }

}  // namespace copyalloc
