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

#include "copyalloc/rng.h"

namespace copyalloc {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t Fnv1a(std::string_view text) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

RngStream::RngStream(uint64_t key) : key_(key), engine_(SplitMix64(key)) {}

RngStream RngStream::Derive(uint64_t seed, std::string_view label) {
  return RngStream(SplitMix64(SplitMix64(seed) ^ Fnv1a(label)));
}

RngStream RngStream::Child(std::string_view label) const {
  return RngStream(SplitMix64(key_ ^ Fnv1a(label)));
}

RngStream RngStream::Child(std::string_view label, uint64_t index) const {
  return RngStream(SplitMix64(SplitMix64(key_ ^ Fnv1a(label)) + index));
}

double RngStream::Uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::Normal() { return normal_(engine_); }

size_t RngStream::UniformIndex(size_t n) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(engine_);
}

}  // namespace copyalloc
