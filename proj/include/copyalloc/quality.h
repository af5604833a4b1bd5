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


// Exact Frechet distance between Gaussian feature statistics and the model
// quality transform Q = 100 / (FID + 1e-6).

#ifndef COPYALLOC_QUALITY_H_
#define COPYALLOC_QUALITY_H_

#include <span>

#include "Eigen/Dense"
#include "absl/status/statusor.h"

namespace copyalloc {

struct FeatureStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  int count = 0;
};

// Empirical mean and covariance with denominator n - 1.
absl::StatusOr<FeatureStats> ComputeFeatureStats(
    std::span<const Eigen::VectorXd> features);
// Same, one sample per row.
absl::StatusOr<FeatureStats> ComputeFeatureStats(const Eigen::MatrixXd& rows);

// Symmetric PSD square root by eigendecomposition. Eigenvalues in
// [-1e-10, 0) are clamped to zero; anything more negative is an error.
absl::StatusOr<Eigen::MatrixXd> MatrixSqrtPsd(const Eigen::MatrixXd& a);

// |m_x - m_y|^2 + Tr(C_x + C_y - 2 (sqrt(C_x) C_y sqrt(C_x))^1/2), floored
// at zero.
absl::StatusOr<double> Fid(const FeatureStats& x, const FeatureStats& y);

struct QualityScore {
  double fid = 0.0;
  double q = 0.0;
};

double ModelQuality(double fid);
QualityScore MakeQualityScore(double fid);

}  // namespace copyalloc

#endif  // COPYALLOC_QUALITY_H_
