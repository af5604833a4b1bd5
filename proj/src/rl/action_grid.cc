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

#include "copyalloc/action_grid.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace copyalloc {
namespace {

constexpr long long kMaxInnerActions = 100000;

void Enumerate(int holder, int remaining, std::vector<int>& current,
               std::vector<std::vector<int>>& out) {
  if (holder + 1 == static_cast<int>(current.size())) {
    current[holder] = remaining;
    out.push_back(current);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    current[holder] = v;
    Enumerate(holder + 1, remaining - v, current, out);
  }
}

}  // namespace

OuterActionGrid::OuterActionGrid(double total_budget, int bins)
    : total_budget_(total_budget), bins_(std::max(1, bins)) {}

double OuterActionGrid::Level(int index) const {
  if (index >= bins_) return total_budget_;
  return total_budget_ * index / bins_;
}

double OuterActionGrid::Budget(int index, double leftover) const {
  return std::min(Level(index), leftover);
}

int OuterActionGrid::FloorIndex(double amount) const {
  int index = 0;
  while (index < bins_ && Level(index + 1) <= amount) ++index;
  return index;
}

long long CompositionCount(int holders, int parts) {
  // C(n + k - 1, k) computed incrementally; exact for the sizes accepted.
  long long result = 1;
  for (int i = 1; i <= parts; ++i) {
    result = result * (holders - 1 + i) / i;
    if (result > kMaxInnerActions * 10) return result;
  }
  return result;
}

absl::StatusOr<InnerActionGrid> InnerActionGrid::Create(int holders, int parts) {
  if (holders < 1 || parts < 1) {
    return absl::InvalidArgumentError("inner grid needs holders >= 1, parts >= 1");
  }
  const long long count = CompositionCount(holders, parts);
  if (count > kMaxInnerActions) {
    return absl::InvalidArgumentError(absl::StrCat(
        "inner grid would have ", count, " actions (limit ", kMaxInnerActions, ")"));
  }
  InnerActionGrid grid;
  grid.holders_ = holders;
  grid.parts_ = parts;
  grid.actions_.reserve(count);
  std::vector<int> current(holders, 0);
  Enumerate(0, parts, current, grid.actions_);
  return grid;
}

std::vector<double> InnerActionGrid::Fractions(int index) const {
  const std::vector<int>& counts = actions_[index];
  std::vector<double> p(counts.size());
  for (size_t k = 0; k < counts.size(); ++k) {
    p[k] = static_cast<double>(counts[k]) / parts_;
  }
  return p;
}

}  // namespace copyalloc
