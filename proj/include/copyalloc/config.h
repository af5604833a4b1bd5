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

// Experiment configuration: JSON loading, defaults, validation and
// serialization. The schema is documented in docs/config_schema.md.

#ifndef COPYALLOC_CONFIG_H_
#define COPYALLOC_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "copyalloc/types.h"
#include "nlohmann/json.hpp"

namespace copyalloc {

enum class AttributionMeasure { kTrak, kDTrak };

std::string_view AttributionMeasureName(AttributionMeasure measure);

struct AttributionParams {
  int num_subsets = 32;
  // 0 selects ceil(|train| / 2).
  int subset_size = 0;
  int proj_dim = 8;
  double ridge = 1e-2;
  AttributionMeasure measure = AttributionMeasure::kDTrak;

  bool operator==(const AttributionParams&) const = default;
};

struct LayerShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  int size() const { return channels * height * width; }
  bool operator==(const LayerShape&) const = default;
};

// Hyper-parameters shared by the outer and inner Q-learning agents.
struct DqnParams {
  std::vector<int> hidden_layers = {80, 40};
  double learning_rate = 1e-3;
  int batch_size = 32;
  int replay_capacity = 10000;
  int target_sync_interval = 100;
  // Ceiling applied to the terminal outer reward Q(M) before learning.
  double terminal_reward_ceiling = 1e3;

  bool operator==(const DqnParams&) const = default;
};

// Parameters of the simulated data world.
struct WorldParams {
  int feature_dim = 8;
  int reference_size = 1000;
  int evaluation_size = 200;
  int generated_batch = 1000;
  // Pseudo-sample weight of the pre-trained generator prior.
  double prior_strength = 100.0;
  // Offset of the prior mean from the reference mean, in reference std units.
  double prior_shift = 2.0;
  double medium_shift = 1.0;
  double low_shift = 3.0;
  double low_spread = 2.0;
  double label_noise = 0.25;
  // Dimension of the caption a generated counterpart is conditioned on.
  int caption_dim = 4;
  int embedding_dim = 16;
  double extractor_gain = 1.0;
  std::vector<LayerShape> perceptual_layers = {{4, 4, 4}, {8, 2, 2}};

  bool operator==(const WorldParams&) const = default;
};

struct ExperimentConfig {
  double total_budget = 1000.0;
  int rounds = 5;
  std::vector<HolderSpec> holders;
  // Copyright metric weights on semantic and perceptual distance.
  double semantic_weight = 0.5;
  double perceptual_weight = 0.5;
  // Inner reward weights on contribution and copyright loss.
  double contribution_weight = 0.5;
  double copyright_weight = 0.5;
  double explore_rate = 0.5;
  double discount = 0.98;
  int inner_iterations = 10000;
  int outer_episodes = 200;
  AttributionParams attribution;
  int outer_budget_bins = 10;
  int inner_simplex_parts = 4;
  uint64_t seed = 0;
  DqnParams dqn;
  WorldParams world;

  bool operator==(const ExperimentConfig&) const = default;
};

// Eight holders whose batch sizes cycle through {50, 60, 80, 100, 150, 200}.
// Join rounds later than `rounds` are clamped to `rounds`.
std::vector<HolderSpec> DefaultHolders(int rounds);

// Default configuration, including the default holder set.
ExperimentConfig DefaultConfig();

struct FieldError {
  std::string field;
  std::string message;
};

std::vector<FieldError> ValidationErrors(const ExperimentConfig& config);

// Ok iff every invariant holds; otherwise an InvalidArgument status listing
// every violated field.
absl::Status ValidateConfig(const ExperimentConfig& config);

absl::StatusOr<ExperimentConfig> ConfigFromJson(const nlohmann::json& json);
nlohmann::json ConfigToJson(const ExperimentConfig& config);

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);
absl::Status SaveConfig(const ExperimentConfig& config, const std::string& path);

// Applies COPYALLOC_SEED when set.
absl::Status ApplyEnvironmentOverrides(ExperimentConfig* config);
// COPYALLOC_OUT_DIR when set, otherwise `fallback`.
std::string OutputDirectory(const std::string& fallback);

}  // namespace copyalloc

#endif  // COPYALLOC_CONFIG_H_
