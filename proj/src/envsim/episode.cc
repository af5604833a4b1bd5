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

#include "absl/strings/str_cat.h"
#include "copyalloc/status_macros.h"
#include "copyalloc/strategy.h"

namespace copyalloc {

absl::StatusOr<EpisodeResult> RunEpisode(Environment& env, OuterStrategy& outer,
                                         InnerStrategy& inner, RngStream& rng) {
  RngStream outer_rng = rng.Child("outer");
  RngStream inner_rng = rng.Child("inner");
  EnvState state = env.Reset();
  while (!state.done()) {
    ASSIGN_OR_RETURN(double budget, outer.Budget(state, env, outer_rng));
    ASSIGN_OR_RETURN(std::vector<double> p,
                     inner.Fractions(state, budget, env, inner_rng));
    auto record = env.Step(&state, budget, p);
    if (!record.ok()) {
      return absl::Status(record.status().code(),
                          absl::StrCat("round ", state.round, ": ",
                                       record.status().message()));
    }
  }
  EpisodeResult result;
  result.quality = state.ledger.back().quality;
  result.ledger = std::move(state.ledger);
  return result;
}

std::vector<double> ExpandFractions(std::span<const double> local,
                                    std::span<const int> available,
                                    int num_holders) {
  std::vector<double> p(num_holders, 0.0);
  for (size_t i = 0; i < available.size() && i < local.size(); ++i) {
    p[available[i]] = local[i];
  }
  return p;
}

}  // namespace copyalloc
