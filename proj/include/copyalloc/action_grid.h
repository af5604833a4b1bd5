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


// Discrete action spaces for the two agents.

#ifndef COPYALLOC_ACTION_GRID_H_
#define COPYALLOC_ACTION_GRID_H_

#include <vector>

#include "absl/status/statusor.h"

namespace copyalloc {

// Budget levels {0, B/G, ..., B}; a level is clipped to the leftover budget
// when taken.
class OuterActionGrid {
 public:
  OuterActionGrid(double total_budget, int bins);

  int size() const { return bins_ + 1; }
  double Level(int index) const;
  double Budget(int index, double leftover) const;
  // Largest index whose level does not exceed `amount`.
  int FloorIndex(double amount) const;

 private:
  double total_budget_;
  int bins_;
};

// All compositions of `parts` units over `holders` entries, stored as
// integer part counts. Index 0 is (parts, 0, ..., 0); the first coordinate
// descends, then the rest recursively.
class InnerActionGrid {
 public:
  static absl::StatusOr<InnerActionGrid> Create(int holders, int parts);

  int size() const { return static_cast<int>(actions_.size()); }
  int holders() const { return holders_; }
  int parts() const { return parts_; }
  const std::vector<int>& Parts(int index) const { return actions_[index]; }
  std::vector<double> Fractions(int index) const;

 private:
  int holders_ = 0;
  int parts_ = 0;
  std::vector<std::vector<int>> actions_;
};

// C(parts + holders - 1, holders - 1).
long long CompositionCount(int holders, int parts);

}  // namespace copyalloc

#endif  // COPYALLOC_ACTION_GRID_H_
