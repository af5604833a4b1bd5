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


// Network checkpoints: one JSON header line describing the layer shapes,
// followed by the parameters as raw little-endian doubles.

#ifndef COPYALLOC_CHECKPOINT_H_
#define COPYALLOC_CHECKPOINT_H_

#include <iosfwd>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "copyalloc/qnetwork.h"

namespace copyalloc {

absl::Status WriteCheckpoint(const QNetwork& net, std::ostream& out);
absl::StatusOr<QNetwork> ReadCheckpoint(std::istream& in);

absl::Status SaveCheckpoint(const QNetwork& net, const std::string& path);
absl::StatusOr<QNetwork> LoadCheckpoint(const std::string& path);

}  // namespace copyalloc

#endif  // COPYALLOC_CHECKPOINT_H_
