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

#include "copyalloc/checkpoint.h"

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace copyalloc {

static_assert(std::endian::native == std::endian::little,
              "checkpoints are written little-endian");

absl::Status WriteCheckpoint(const QNetwork& net, std::ostream& out) {
  const Eigen::VectorXd params = net.Parameters();
  nlohmann::json header = {{"format", "copyalloc-qnetwork"},
                           {"version", 1},
                           {"layer_sizes", net.layer_sizes()},
                           {"activation", "relu"},
                           {"parameter_order", "per layer: weights column-major, then biases"},
                           {"parameters", params.size()},
                           {"dtype", "float64-le"}};
  out << header.dump() << '\n';
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!out) return absl::DataLossError("failed writing checkpoint");
  return absl::OkStatus();
}

absl::StatusOr<QNetwork> ReadCheckpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError("checkpoint has no header line");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad checkpoint header: ", e.what()));
  }
  if (header.value("format", "") != "copyalloc-qnetwork" ||
      !header.contains("layer_sizes") || !header["layer_sizes"].is_array()) {
    return absl::InvalidArgumentError("not a copyalloc network checkpoint");
  }
  const std::vector<int> sizes = header["layer_sizes"].get<std::vector<int>>();
  absl::StatusOr<QNetwork> net = QNetwork::Zeros(sizes);
  if (!net.ok()) return net.status();
  const int count = net->num_parameters();
  if (header.value("parameters", -1) != count) {
    return absl::InvalidArgumentError("checkpoint parameter count mismatch");
  }
  Eigen::VectorXd params(count);
  in.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(count * sizeof(double))) {
    return absl::DataLossError("checkpoint is truncated");
  }
  absl::Status status = net->SetParameters(params);
  if (!status.ok()) return status;
  return net;
}

absl::Status SaveCheckpoint(const QNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return WriteCheckpoint(net, out);
}

absl::StatusOr<QNetwork> LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadCheckpoint(in);
}

}  // namespace copyalloc
