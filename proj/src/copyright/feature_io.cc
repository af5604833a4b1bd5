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

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "copyalloc/copyright.h"
#include "nlohmann/json.hpp"

namespace copyalloc {
namespace {

using nlohmann::json;

absl::StatusOr<Eigen::VectorXd> ToVector(const json& value) {
  if (!value.is_array()) return absl::InvalidArgumentError("expected an array");
  Eigen::VectorXd out(value.size());
  for (size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) {
      return absl::InvalidArgumentError("expected an array of numbers");
    }
    out[i] = value[i].get<double>();
  }
  return out;
}

absl::StatusOr<FeatureRecord> RecordFromJson(const json& value) {
  if (!value.is_object()) return absl::InvalidArgumentError("expected an object");
  FeatureRecord record;
  if (!value.contains("id")) return absl::InvalidArgumentError("missing id");
  const json& id = value["id"];
  record.id = id.is_string() ? id.get<std::string>() : id.dump();
  if (value.contains("holder")) {
    if (!value["holder"].is_number_integer()) {
      return absl::InvalidArgumentError("holder must be an integer");
    }
    record.holder = value["holder"].get<int>();
  }
  if (!value.contains("embedding")) {
    return absl::InvalidArgumentError("missing embedding");
  }
  auto embedding = ToVector(value["embedding"]);
  if (!embedding.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("embedding: ", embedding.status().message()));
  }
  record.embedding = *std::move(embedding);
  if (!value.contains("layers") || !value["layers"].is_array()) {
    return absl::InvalidArgumentError("missing layers array");
  }
  for (const json& layer : value["layers"]) {
    if (!layer.is_object()) {
      return absl::InvalidArgumentError("layer must be an object");
    }
    FeatureTensor tensor;
    try {
      tensor.shape.channels = layer.at("channels").get<int>();
      tensor.shape.height = layer.at("height").get<int>();
      tensor.shape.width = layer.at("width").get<int>();
    } catch (const json::exception& e) {
      return absl::InvalidArgumentError(absl::StrCat("layer shape: ", e.what()));
    }
    if (tensor.shape.channels < 1 || tensor.shape.height < 1 ||
        tensor.shape.width < 1) {
      return absl::InvalidArgumentError("layer dimensions must be positive");
    }
    if (!layer.contains("values")) {
      return absl::InvalidArgumentError("layer missing values");
    }
    auto values = ToVector(layer["values"]);
    if (!values.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("layer values: ", values.status().message()));
    }
    if (values->size() != tensor.shape.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "layer has ", values->size(), " values, shape needs ",
          tensor.shape.size()));
    }
    tensor.values = *std::move(values);
    record.layers.push_back(std::move(tensor));
  }
  return record;
}

}  // namespace

absl::StatusOr<std::vector<FeatureRecord>> ParseFeatureRecords(
    std::string_view text) {
  std::vector<FeatureRecord> records;
  int line_number = 0;
  for (absl::string_view line :
       absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json value;
    try {
      value = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": ", e.what()));
    }
    auto record = RecordFromJson(value);
    if (!record.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": ", record.status().message()));
    }
    records.push_back(*std::move(record));
  }
  return records;
}

absl::StatusOr<std::vector<FeatureRecord>> LoadFeatureRecords(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto records = ParseFeatureRecords(buffer.str());
  if (!records.ok()) {
    return absl::Status(records.status().code(),
                        absl::StrCat(path, ": ", records.status().message()));
  }
  return records;
}

}  // namespace copyalloc
