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

#include "copyalloc/types.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace copyalloc {

std::string_view QualityTierName(QualityTier tier) {
  switch (tier) {
    case QualityTier::kLow:
      return "low";
    case QualityTier::kMedium:
      return "medium";
    case QualityTier::kHigh:
      return "high";
  }
  return "unknown";
}

absl::StatusOr<QualityTier> ParseQualityTier(std::string_view name) {
  if (name == "low") return QualityTier::kLow;
  if (name == "medium") return QualityTier::kMedium;
  if (name == "high") return QualityTier::kHigh;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown quality tier \"", std::string(name),
                   "\" (expected low, medium or high)"));
}

absl::StatusOr<std::vector<double>> SumByHolder(std::span<const double> values,
                                                std::span<const int> holder_of,
                                                int num_holders) {
  if (values.size() != holder_of.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("holder map covers ", holder_of.size(), " samples but ",
                     values.size(), " values were given"));
  }
  std::vector<double> totals(num_holders, 0.0);
  for (size_t i = 0; i < values.size(); ++i) {
    const int holder = holder_of[i];
    if (holder < 0 || holder >= num_holders) {
      return absl::FailedPreconditionError(
          absl::StrCat("sample ", i, " maps to holder ", holder,
                       " outside [0, ", num_holders, ")"));
    }
    totals[holder] += values[i];
  }
  return totals;
}

std::vector<int> HolderIndices(std::span<const Sample> samples) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(s.holder);
  return out;
}

}  // namespace copyalloc
