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

// Named, reproducible random streams. One root seed fans out into
// independent per-purpose substreams keyed by text labels, so that adding a
// draw in one module never perturbs another module's sequence.

#ifndef COPYALLOC_RNG_H_
#define COPYALLOC_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace copyalloc {

class RngStream {
 public:
  // Same (seed, label) always yields the same sequence.
  static RngStream Derive(uint64_t seed, std::string_view label);

  // Substream keyed by this stream's identity and `label`. Does not consume
  // draws from this stream.
  RngStream Child(std::string_view label) const;
  RngStream Child(std::string_view label, uint64_t index) const;

  // Uniform on [0, 1).
  double Uniform();
  double Normal();
  // Uniform on {0, ..., n - 1}; n must be positive.
  size_t UniformIndex(size_t n);

  uint64_t key() const { return key_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  explicit RngStream(uint64_t key);

  uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace copyalloc

#endif  // COPYALLOC_RNG_H_
