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

#include "copyalloc/config.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {
namespace {

using nlohmann::json;

// Reads members of one JSON object, remembering which keys were consumed so
// that typos surface as errors instead of silently falling back to defaults.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path)
      : object_(object), path_(std::move(path)) {}

  template <typename T>
  absl::Status Read(std::string_view key, T* out) {
    seen_.insert(std::string(key));
    auto it = object_.find(key);
    if (it == object_.end()) return absl::OkStatus();
    try {
      if constexpr (std::is_same_v<T, int> || std::is_same_v<T, uint64_t>) {
        if (!it->is_number_integer()) {
          return TypeError(key, "an integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) return TypeError(key, "a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) return TypeError(key, "a string");
      }
      *out = it->template get<T>();
    } catch (const json::exception& e) {
      return absl::InvalidArgumentError(
          absl::StrCat(FieldPath(key), ": ", e.what()));
    }
    return absl::OkStatus();
  }

  // Marks `key` as consumed and returns the member, or null if absent.
  const json* Member(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  absl::Status RejectUnknown() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!seen_.contains(it.key())) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown field \"", FieldPath(it.key()), "\""));
      }
    }
    return absl::OkStatus();
  }

  std::string FieldPath(std::string_view key) const {
    return path_.empty() ? std::string(key) : absl::StrCat(path_, ".", std::string(key));
  }

 private:
  absl::Status TypeError(std::string_view key, std::string_view expected) {
    return absl::InvalidArgumentError(
        absl::StrCat(FieldPath(key), ": expected ", std::string(expected)));
  }

  const json& object_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

absl::Status RequireObject(const json& value, std::string_view path) {
  if (!value.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path.empty() ? std::string("config") : std::string(path),
                     ": expected an object"));
  }
  return absl::OkStatus();
}

absl::StatusOr<HolderSpec> HolderFromJson(const json& value,
                                          const std::string& path) {
  RETURN_IF_ERROR(RequireObject(value, path));
  ObjectReader reader(value, path);
  HolderSpec holder;
  std::string tier = "high";
  RETURN_IF_ERROR(reader.Read("id", &holder.id));
  RETURN_IF_ERROR(reader.Read("sample_count", &holder.sample_count));
  RETURN_IF_ERROR(reader.Read("quality_tier", &tier));
  RETURN_IF_ERROR(reader.Read("asking_price", &holder.asking_price));
  RETURN_IF_ERROR(reader.Read("join_round", &holder.join_round));
  RETURN_IF_ERROR(reader.RejectUnknown());
  auto parsed = ParseQualityTier(tier);
  if (!parsed.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ".quality_tier: ", parsed.status().message()));
  }
  holder.tier = *parsed;
  return holder;
}

absl::Status ReadAttribution(const json& value, AttributionParams* params) {
  RETURN_IF_ERROR(RequireObject(value, "attribution"));
  ObjectReader reader(value, "attribution");
  std::string measure(AttributionMeasureName(params->measure));
  RETURN_IF_ERROR(reader.Read("num_subsets", &params->num_subsets));
  RETURN_IF_ERROR(reader.Read("subset_size", &params->subset_size));
  RETURN_IF_ERROR(reader.Read("proj_dim", &params->proj_dim));
  RETURN_IF_ERROR(reader.Read("ridge", &params->ridge));
  RETURN_IF_ERROR(reader.Read("measure", &measure));
  RETURN_IF_ERROR(reader.RejectUnknown());
  if (measure == "trak") {
    params->measure = AttributionMeasure::kTrak;
  } else if (measure == "dtrak") {
    params->measure = AttributionMeasure::kDTrak;
  } else {
    return absl::InvalidArgumentError(absl::StrCat(
        "attribution.measure: unknown measure \"", measure,
        "\" (expected trak or dtrak)"));
  }
  return absl::OkStatus();
}

absl::Status ReadDqn(const json& value, DqnParams* params) {
  RETURN_IF_ERROR(RequireObject(value, "dqn"));
  ObjectReader reader(value, "dqn");
  RETURN_IF_ERROR(reader.Read("hidden_layers", &params->hidden_layers));
  RETURN_IF_ERROR(reader.Read("learning_rate", &params->learning_rate));
  RETURN_IF_ERROR(reader.Read("batch_size", &params->batch_size));
  RETURN_IF_ERROR(reader.Read("replay_capacity", &params->replay_capacity));
  RETURN_IF_ERROR(
      reader.Read("target_sync_interval", &params->target_sync_interval));
  RETURN_IF_ERROR(reader.Read("terminal_reward_ceiling",
                              &params->terminal_reward_ceiling));
  return reader.RejectUnknown();
}

absl::Status ReadWorld(const json& value, WorldParams* params) {
  RETURN_IF_ERROR(RequireObject(value, "world"));
  ObjectReader reader(value, "world");
  RETURN_IF_ERROR(reader.Read("feature_dim", &params->feature_dim));
  RETURN_IF_ERROR(reader.Read("reference_size", &params->reference_size));
  RETURN_IF_ERROR(reader.Read("evaluation_size", &params->evaluation_size));
  RETURN_IF_ERROR(reader.Read("generated_batch", &params->generated_batch));
  RETURN_IF_ERROR(reader.Read("prior_strength", &params->prior_strength));
  RETURN_IF_ERROR(reader.Read("prior_shift", &params->prior_shift));
  RETURN_IF_ERROR(reader.Read("medium_shift", &params->medium_shift));
  RETURN_IF_ERROR(reader.Read("low_shift", &params->low_shift));
  RETURN_IF_ERROR(reader.Read("low_spread", &params->low_spread));
  RETURN_IF_ERROR(reader.Read("label_noise", &params->label_noise));
  RETURN_IF_ERROR(reader.Read("caption_dim", &params->caption_dim));
  RETURN_IF_ERROR(reader.Read("embedding_dim", &params->embedding_dim));
  RETURN_IF_ERROR(reader.Read("extractor_gain", &params->extractor_gain));
  if (const json* layers = reader.Member("perceptual_layers")) {
    if (!layers->is_array()) {
      return absl::InvalidArgumentError(
          "world.perceptual_layers: expected an array of [C, H, W] triples");
    }
    params->perceptual_layers.clear();
    for (const json& layer : *layers) {
      if (!layer.is_array() || layer.size() != 3 ||
          !layer[0].is_number_integer() || !layer[1].is_number_integer() ||
          !layer[2].is_number_integer()) {
        return absl::InvalidArgumentError(
            "world.perceptual_layers: expected an array of [C, H, W] triples");
      }
      params->perceptual_layers.push_back(
          {layer[0].get<int>(), layer[1].get<int>(), layer[2].get<int>()});
    }
  }
  return reader.RejectUnknown();
}

// 1-based line and column of byte offset `pos` in `text`.
std::string LineContext(std::string_view text, size_t pos) {
  size_t line = 1;
  size_t column = 1;
  for (size_t i = 0; i < pos && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  size_t begin = text.rfind('\n', pos == 0 ? 0 : pos - 1);
  begin = begin == std::string_view::npos ? 0 : begin + 1;
  size_t end = text.find('\n', begin);
  if (end == std::string_view::npos) end = text.size();
  return absl::StrCat("line ", line, ", column ", column, ": `",
                      std::string(text.substr(begin, end - begin)), "`");
}

}  // namespace

std::string_view AttributionMeasureName(AttributionMeasure measure) {
  return measure == AttributionMeasure::kTrak ? "trak" : "dtrak";
}

std::vector<HolderSpec> DefaultHolders(int rounds) {
  struct Row {
    int count;
    QualityTier tier;
    int join_round;
  };
  // Batch sizes cycle through the six published amounts.
  const Row rows[] = {
      {50, QualityTier::kHigh, 1},    {60, QualityTier::kMedium, 1},
      {80, QualityTier::kLow, 1},     {100, QualityTier::kHigh, 1},
      {150, QualityTier::kMedium, 2}, {200, QualityTier::kLow, 1},
      {50, QualityTier::kHigh, 3},    {60, QualityTier::kLow, 2},
  };
  std::vector<HolderSpec> holders;
  for (size_t i = 0; i < std::size(rows); ++i) {
    HolderSpec holder;
    holder.id = absl::StrCat("h", i);
    holder.sample_count = rows[i].count;
    holder.tier = rows[i].tier;
    double unit_price = 1.2;
    if (rows[i].tier == QualityTier::kMedium) unit_price = 0.6;
    if (rows[i].tier == QualityTier::kLow) unit_price = 0.3;
    holder.asking_price = unit_price * rows[i].count;
    holder.join_round = std::max(1, std::min(rows[i].join_round, rounds));
    holders.push_back(holder);
  }
  return holders;
}

ExperimentConfig DefaultConfig() {
  ExperimentConfig config;
  config.holders = DefaultHolders(config.rounds);
  return config;
}

std::vector<FieldError> ValidationErrors(const ExperimentConfig& config) {
  std::vector<FieldError> errors;
  auto fail = [&errors](std::string field, std::string message) {
    errors.push_back({std::move(field), std::move(message)});
  };
  if (!(config.total_budget > 0)) {
    fail("total_budget", absl::StrCat("must be > 0 (got ", config.total_budget, ")"));
  }
  if (config.rounds < 1) {
    fail("rounds", absl::StrCat("must be >= 1 (got ", config.rounds, ")"));
  }
  if (config.holders.empty()) fail("holders", "at least one holder is required");
  std::set<std::string> ids;
  for (size_t i = 0; i < config.holders.size(); ++i) {
    const HolderSpec& h = config.holders[i];
    const std::string prefix = absl::StrCat("holders[", i, "].");
    if (h.id.empty()) fail(prefix + "id", "must be non-empty");
    if (!ids.insert(h.id).second) {
      fail(prefix + "id", absl::StrCat("duplicate id \"", h.id, "\""));
    }
    if (h.sample_count <= 0) {
      fail(prefix + "sample_count",
           absl::StrCat("must be > 0 (got ", h.sample_count, ")"));
    }
    if (!(h.asking_price >= 0)) {
      fail(prefix + "asking_price",
           absl::StrCat("must be >= 0 (got ", h.asking_price, ")"));
    }
    if (h.join_round < 1 || h.join_round > config.rounds) {
      fail(prefix + "join_round",
           absl::StrCat("must be in [1, ", config.rounds, "] (got ",
                        h.join_round, ")"));
    }
  }
  if (!(config.semantic_weight >= 0)) fail("semantic_weight", "must be >= 0");
  if (!(config.perceptual_weight >= 0)) fail("perceptual_weight", "must be >= 0");
  if (!(config.contribution_weight >= 0)) {
    fail("contribution_weight", "must be >= 0");
  }
  if (!(config.copyright_weight >= 0)) fail("copyright_weight", "must be >= 0");
  if (!(config.explore_rate >= 0 && config.explore_rate <= 1)) {
    fail("explore_rate",
         absl::StrCat("must be in [0, 1] (got ", config.explore_rate, ")"));
  }
  if (!(config.discount >= 0 && config.discount < 1)) {
    fail("discount",
         absl::StrCat("must be in [0, 1) (got ", config.discount, ")"));
  }
  if (config.inner_iterations < 1) fail("inner_iterations", "must be >= 1");
  if (config.outer_episodes < 1) fail("outer_episodes", "must be >= 1");
  if (config.outer_budget_bins < 1) fail("outer_budget_bins", "must be >= 1");
  if (config.inner_simplex_parts < 1) {
    fail("inner_simplex_parts", "must be >= 1");
  }

  const AttributionParams& attr = config.attribution;
  if (attr.num_subsets < 1) fail("attribution.num_subsets", "must be >= 1");
  if (attr.subset_size < 0) {
    fail("attribution.subset_size", "must be >= 0 (0 selects half the set)");
  }
  if (attr.proj_dim < 1 || attr.proj_dim > config.world.feature_dim) {
    fail("attribution.proj_dim",
         absl::StrCat("must be in [1, world.feature_dim = ",
                      config.world.feature_dim, "] (got ", attr.proj_dim, ")"));
  }
  if (!(attr.ridge > 0)) fail("attribution.ridge", "must be > 0");

  const DqnParams& dqn = config.dqn;
  if (dqn.hidden_layers.empty()) fail("dqn.hidden_layers", "must be non-empty");
  for (int width : dqn.hidden_layers) {
    if (width < 1) fail("dqn.hidden_layers", "every width must be >= 1");
  }
  if (!(dqn.learning_rate > 0)) fail("dqn.learning_rate", "must be > 0");
  if (dqn.batch_size < 1) fail("dqn.batch_size", "must be >= 1");
  if (dqn.replay_capacity < dqn.batch_size) {
    fail("dqn.replay_capacity", "must be >= dqn.batch_size");
  }
  if (dqn.target_sync_interval < 1) {
    fail("dqn.target_sync_interval", "must be >= 1");
  }
  if (!(dqn.terminal_reward_ceiling > 0)) {
    fail("dqn.terminal_reward_ceiling", "must be > 0");
  }

  const WorldParams& world = config.world;
  if (world.feature_dim < 1) fail("world.feature_dim", "must be >= 1");
  if (world.reference_size < 2) fail("world.reference_size", "must be >= 2");
  if (world.evaluation_size < 1) fail("world.evaluation_size", "must be >= 1");
  if (world.generated_batch < 2) fail("world.generated_batch", "must be >= 2");
  if (!(world.prior_strength > 0)) fail("world.prior_strength", "must be > 0");
  if (!(world.low_spread > 0)) fail("world.low_spread", "must be > 0");
  if (!(world.label_noise >= 0)) fail("world.label_noise", "must be >= 0");
  if (world.caption_dim < 1 || world.caption_dim > world.feature_dim) {
    fail("world.caption_dim", "must be in [1, world.feature_dim]");
  }
  if (world.embedding_dim < 1) fail("world.embedding_dim", "must be >= 1");
  if (!(world.extractor_gain > 0)) fail("world.extractor_gain", "must be > 0");
  if (world.perceptual_layers.empty()) {
    fail("world.perceptual_layers", "at least one layer is required");
  }
  for (const LayerShape& shape : world.perceptual_layers) {
    if (shape.channels < 1 || shape.height < 1 || shape.width < 1) {
      fail("world.perceptual_layers", "every dimension must be >= 1");
    }
  }
  return errors;
}

absl::Status ValidateConfig(const ExperimentConfig& config) {
  const std::vector<FieldError> errors = ValidationErrors(config);
  if (errors.empty()) return absl::OkStatus();
  std::vector<std::string> parts;
  for (const FieldError& e : errors) {
    parts.push_back(absl::StrCat(e.field, ": ", e.message));
  }
  return absl::InvalidArgumentError(
      absl::StrCat("invalid config: ", absl::StrJoin(parts, "; ")));
}

absl::StatusOr<ExperimentConfig> ConfigFromJson(const json& value) {
  RETURN_IF_ERROR(RequireObject(value, ""));
  ExperimentConfig config;
  ObjectReader reader(value, "");
  RETURN_IF_ERROR(reader.Read("seed", &config.seed));
  RETURN_IF_ERROR(reader.Read("total_budget", &config.total_budget));
  RETURN_IF_ERROR(reader.Read("rounds", &config.rounds));
  RETURN_IF_ERROR(reader.Read("semantic_weight", &config.semantic_weight));
  RETURN_IF_ERROR(reader.Read("perceptual_weight", &config.perceptual_weight));
  RETURN_IF_ERROR(
      reader.Read("contribution_weight", &config.contribution_weight));
  RETURN_IF_ERROR(reader.Read("copyright_weight", &config.copyright_weight));
  RETURN_IF_ERROR(reader.Read("explore_rate", &config.explore_rate));
  RETURN_IF_ERROR(reader.Read("discount", &config.discount));
  RETURN_IF_ERROR(reader.Read("inner_iterations", &config.inner_iterations));
  RETURN_IF_ERROR(reader.Read("outer_episodes", &config.outer_episodes));
  RETURN_IF_ERROR(reader.Read("outer_budget_bins", &config.outer_budget_bins));
  RETURN_IF_ERROR(
      reader.Read("inner_simplex_parts", &config.inner_simplex_parts));
  if (const json* attr = reader.Member("attribution")) {
    RETURN_IF_ERROR(ReadAttribution(*attr, &config.attribution));
  }
  if (const json* dqn = reader.Member("dqn")) {
    RETURN_IF_ERROR(ReadDqn(*dqn, &config.dqn));
  }
  if (const json* world = reader.Member("world")) {
    RETURN_IF_ERROR(ReadWorld(*world, &config.world));
  }
  if (const json* holders = reader.Member("holders")) {
    if (!holders->is_array()) {
      return absl::InvalidArgumentError("holders: expected an array");
    }
    for (size_t i = 0; i < holders->size(); ++i) {
      ASSIGN_OR_RETURN(HolderSpec holder,
                       HolderFromJson((*holders)[i], absl::StrCat("holders[", i, "]")));
      config.holders.push_back(std::move(holder));
    }
  } else {
    config.holders = DefaultHolders(config.rounds);
  }
  RETURN_IF_ERROR(reader.RejectUnknown());
  RETURN_IF_ERROR(ValidateConfig(config));
  return config;
}

json ConfigToJson(const ExperimentConfig& config) {
  json holders = json::array();
  for (const HolderSpec& h : config.holders) {
    holders.push_back({{"id", h.id},
                       {"sample_count", h.sample_count},
                       {"quality_tier", std::string(QualityTierName(h.tier))},
                       {"asking_price", h.asking_price},
                       {"join_round", h.join_round}});
  }
  json layers = json::array();
  for (const LayerShape& s : config.world.perceptual_layers) {
    layers.push_back({s.channels, s.height, s.width});
  }
  const AttributionParams& a = config.attribution;
  const DqnParams& d = config.dqn;
  const WorldParams& w = config.world;
  return {
      {"seed", config.seed},
      {"total_budget", config.total_budget},
      {"rounds", config.rounds},
      {"holders", holders},
      {"semantic_weight", config.semantic_weight},
      {"perceptual_weight", config.perceptual_weight},
      {"contribution_weight", config.contribution_weight},
      {"copyright_weight", config.copyright_weight},
      {"explore_rate", config.explore_rate},
      {"discount", config.discount},
      {"inner_iterations", config.inner_iterations},
      {"outer_episodes", config.outer_episodes},
      {"outer_budget_bins", config.outer_budget_bins},
      {"inner_simplex_parts", config.inner_simplex_parts},
      {"attribution",
       {{"num_subsets", a.num_subsets},
        {"subset_size", a.subset_size},
        {"proj_dim", a.proj_dim},
        {"ridge", a.ridge},
        {"measure", std::string(AttributionMeasureName(a.measure))}}},
      {"dqn",
       {{"hidden_layers", d.hidden_layers},
        {"learning_rate", d.learning_rate},
        {"batch_size", d.batch_size},
        {"replay_capacity", d.replay_capacity},
        {"target_sync_interval", d.target_sync_interval},
        {"terminal_reward_ceiling", d.terminal_reward_ceiling}}},
      {"world",
       {{"feature_dim", w.feature_dim},
        {"reference_size", w.reference_size},
        {"evaluation_size", w.evaluation_size},
        {"generated_batch", w.generated_batch},
        {"prior_strength", w.prior_strength},
        {"prior_shift", w.prior_shift},
        {"medium_shift", w.medium_shift},
        {"low_shift", w.low_shift},
        {"low_spread", w.low_spread},
        {"label_noise", w.label_noise},
        {"caption_dim", w.caption_dim},
        {"embedding_dim", w.embedding_dim},
        {"extractor_gain", w.extractor_gain},
        {"perceptual_layers", layers}}},
  };
}

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text) {
  json value;
  try {
    value = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config parse error at ",
                     LineContext(text, e.byte == 0 ? 0 : e.byte - 1), ": ",
                     e.what()));
  }
  return ConfigFromJson(value);
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto config = ParseConfig(buffer.str());
  if (!config.ok()) {
    return absl::Status(config.status().code(),
                        absl::StrCat(path, ": ", config.status().message()));
  }
  return config;
}

absl::Status SaveConfig(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << ConfigToJson(config).dump(2) << "\n";
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::Status ApplyEnvironmentOverrides(ExperimentConfig* config) {
  if (const char* seed = std::getenv("COPYALLOC_SEED")) {
    uint64_t value = 0;
    if (!absl::SimpleAtoi(seed, &value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("COPYALLOC_SEED: not an unsigned integer: ", seed));
    }
    config->seed = value;
  }
  return absl::OkStatus();
}

std::string OutputDirectory(const std::string& fallback) {
  const char* dir = std::getenv("COPYALLOC_OUT_DIR");
  return dir != nullptr && *dir != '\0' ? std::string(dir) : fallback;
}

}  // namespace copyalloc
