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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "copyalloc/copyright.h"
#include "copyalloc/rng.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace copyalloc {
namespace {

using ::copyalloc::testing::RandomVector;
using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

FeatureTensor Tensor(int c, int h, int w, std::vector<double> values) {
  FeatureTensor t;
  t.shape = {c, h, w};
  t.values = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
  return t;
}

struct Extractors {
  SemanticEmbedder embedder;
  FeatureStack stack;
};

Extractors MakeExtractors(int input_dim, uint64_t seed) {
  RngStream rng = RngStream::Derive(seed, "extractors");
  RngStream embed_rng = rng.Child("embedder");
  RngStream stack_rng = rng.Child("stack");
  const std::vector<LayerShape> shapes = {{4, 4, 4}, {8, 2, 2}};
  Extractors e;
  e.embedder = SemanticEmbedder::Create(input_dim, 16, 1.0, embed_rng);
  e.stack = *FeatureStack::Create(input_dim, shapes, 1.0, stack_rng);
  return e;
}

std::vector<Sample> RandomSamples(int n, int dim, int holders, RngStream& rng) {
  std::vector<Sample> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].id = i;
    out[i].holder = i % holders;
    out[i].features = RandomVector(dim, rng);
  }
  return out;
}

TEST(SemanticDistanceTest, Examples) {
  EXPECT_DOUBLE_EQ(*SemanticDistance(Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0)),
                   2.0);
  const Eigen::Vector3d e(0.3, -1.0, 2.0);
  EXPECT_EQ(*SemanticDistance(e, e), 0.0);
  const Eigen::Vector3d f(1.0, 0.5, -2.0);
  EXPECT_DOUBLE_EQ(*SemanticDistance(e, f), *SemanticDistance(f, e));
  EXPECT_FALSE(SemanticDistance(e, Eigen::Vector2d(0, 0)).ok());
}

TEST(ChannelNormalizeTest, UnitOrZeroNormPerPosition) {
  RngStream rng = RngStream::Derive(1, "norm");
  FeatureTensor t = Tensor(5, 3, 2, std::vector<double>(30));
  for (int i = 0; i < 30; ++i) t.values[i] = rng.Normal();
  // Zero out one spatial position entirely.
  for (int c = 0; c < 5; ++c) t.values[(c * 3 + 1) * 2 + 0] = 0.0;
  const FeatureTensor n = ChannelNormalize(t);
  for (int h = 0; h < 3; ++h) {
    for (int w = 0; w < 2; ++w) {
      double norm2 = 0.0;
      for (int c = 0; c < 5; ++c) norm2 += n.at(c, h, w) * n.at(c, h, w);
      if (h == 1 && w == 0) {
        EXPECT_EQ(norm2, 0.0);
      } else {
        EXPECT_NEAR(std::sqrt(norm2), 1.0, 1e-9);
      }
    }
  }
}

TEST(PerceptualDistanceTest, TwoChannelHandEvaluation) {
  // Channel vectors (3, 4) and (1, 0) normalize to u = (0.6, 0.8) and
  // v = (1, 0); |u - v|^2 = 0.16 + 0.64.
  const std::vector<FeatureTensor> x = {Tensor(2, 1, 1, {3.0, 4.0})};
  const std::vector<FeatureTensor> y = {Tensor(2, 1, 1, {1.0, 0.0})};
  const std::vector<Eigen::VectorXd> ones = {Eigen::VectorXd::Ones(2)};
  auto d = PerceptualDistance(x, y, ones);
  ASSERT_OK(d);
  EXPECT_NEAR(*d, 0.8, 1e-12);
}

TEST(PerceptualDistanceTest, SpatialAveragingAndWeights) {
  // Two positions: identical at the first, orthogonal at the second.
  const std::vector<FeatureTensor> x = {Tensor(2, 1, 2, {1.0, 0.0, 0.0, 1.0})};
  const std::vector<FeatureTensor> y = {Tensor(2, 1, 2, {1.0, 1.0, 0.0, 0.0})};
  const std::vector<Eigen::VectorXd> ones = {Eigen::VectorXd::Ones(2)};
  EXPECT_NEAR(*PerceptualDistance(x, y, ones), 1.0, 1e-12);
  const std::vector<Eigen::VectorXd> half = {Eigen::Vector2d(0.5, 0.5)};
  EXPECT_NEAR(*PerceptualDistance(x, y, half), 0.25, 1e-12);
  const std::vector<Eigen::VectorXd> zero = {Eigen::Vector2d(0.0, 0.0)};
  EXPECT_EQ(*PerceptualDistance(x, y, zero), 0.0);
}

TEST(PerceptualDistanceTest, ShapeMismatch) {
  const std::vector<FeatureTensor> x = {Tensor(2, 1, 1, {3.0, 4.0})};
  const std::vector<FeatureTensor> y = {Tensor(1, 1, 2, {1.0, 0.0})};
  const std::vector<Eigen::VectorXd> ones = {Eigen::VectorXd::Ones(2)};
  EXPECT_FALSE(PerceptualDistance(x, y, ones).ok());
}

TEST(PerceptualDistanceTest, StackIdentitySymmetryAndWeightAnnihilation) {
  Extractors e = MakeExtractors(6, 2);
  RngStream rng = RngStream::Derive(2, "pairs");
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd x = RandomVector(6, rng);
    const Eigen::VectorXd y = RandomVector(6, rng);
    EXPECT_EQ(*PerceptualDistance(x, x, e.stack), 0.0);
    const double dxy = *PerceptualDistance(x, y, e.stack);
    EXPECT_GT(dxy, 0.0);
    EXPECT_NEAR(dxy, *PerceptualDistance(y, x, e.stack), 1e-12);
  }
  std::vector<Eigen::VectorXd> zeros;
  for (const LayerShape& s : e.stack.shapes()) {
    zeros.push_back(Eigen::VectorXd::Zero(s.channels));
  }
  e.stack.set_layer_weights(zeros);
  EXPECT_EQ(*PerceptualDistance(RandomVector(6, rng), RandomVector(6, rng),
                                e.stack),
            0.0);
}

TEST(FeatureStackTest, DefaultShapesAndDeterminism) {
  const Extractors a = MakeExtractors(8, 3);
  const Extractors b = MakeExtractors(8, 3);
  RngStream rng = RngStream::Derive(3, "x");
  const Eigen::VectorXd x = RandomVector(8, rng);
  auto la = a.stack.Activations(x);
  auto lb = b.stack.Activations(x);
  ASSERT_OK(la);
  ASSERT_OK(lb);
  ASSERT_EQ(la->size(), 2u);
  EXPECT_EQ((*la)[0].shape, (LayerShape{4, 4, 4}));
  EXPECT_EQ((*la)[1].shape, (LayerShape{8, 2, 2}));
  for (size_t l = 0; l < la->size(); ++l) {
    EXPECT_EQ((*la)[l].values, (*lb)[l].values);
  }
  for (const Eigen::VectorXd& w : a.stack.layer_weights()) {
    EXPECT_EQ(w, Eigen::VectorXd::Ones(w.size()));
  }
  EXPECT_EQ(*a.embedder.Embed(x), *b.embedder.Embed(x));
  EXPECT_FALSE(a.embedder.Embed(Eigen::VectorXd::Zero(3)).ok());
}

TEST(ComprehensiveSimilarityTest, Examples) {
  EXPECT_NEAR(ComprehensiveSimilarity(0.2, 0.4, 0.5, 0.5), 0.3, 1e-15);
  EXPECT_EQ(ComprehensiveSimilarity(0.7, 0.4, 1.0, 0.0), 0.7);
  EXPECT_EQ(ComprehensiveSimilarity(0.0, 0.0, 0.5, 0.5), 0.0);
}

TEST(CopyrightLossesTest, Examples) {
  EXPECT_THAT(CopyrightLosses(std::vector<double>{0.1, 0.3, 0.5}),
              ElementsAre(1.0, DoubleNear(0.5, 1e-12), 0.0));
  EXPECT_THAT(CopyrightLosses(std::vector<double>{7.0}), ElementsAre(1.0));
  EXPECT_THAT(CopyrightLosses(std::vector<double>{2.0, 2.0}),
              ElementsAre(1.0, 1.0));
}

TEST(CopyrightLossesTest, BoundsMonotoneAndEndpoints) {
  RngStream rng = RngStream::Derive(4, "losses");
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> c(2 + rng.UniformIndex(20));
    for (double& v : c) v = std::abs(rng.Normal());
    const auto loss = CopyrightLosses(c);
    const size_t lo = std::min_element(c.begin(), c.end()) - c.begin();
    const size_t hi = std::max_element(c.begin(), c.end()) - c.begin();
    EXPECT_EQ(loss[lo], 1.0);
    EXPECT_EQ(loss[hi], 0.0);
    for (size_t i = 0; i < c.size(); ++i) {
      ASSERT_GE(loss[i], 0.0);
      ASSERT_LE(loss[i], 1.0);
      for (size_t j = 0; j < c.size(); ++j) {
        if (c[i] < c[j]) ASSERT_GT(loss[i], loss[j]);
      }
    }
  }
}

TEST(HolderCopyrightTest, Examples) {
  const std::vector<double> loss = {0.5, 0.5, 0.25};
  const std::vector<int> holder_of = {1, 1, 0};
  auto sums = HolderCopyright(loss, holder_of, 3);
  ASSERT_OK(sums);
  EXPECT_THAT(*sums, ElementsAre(0.25, 1.0, 0.0));
  EXPECT_DOUBLE_EQ(std::accumulate(sums->begin(), sums->end(), 0.0), 1.25);
  const std::vector<int> bad = {1, -1, 0};
  EXPECT_FALSE(HolderCopyright(loss, bad, 3).ok());
}

TEST(ScoreRoundTest, ExactCopies) {
  const Extractors e = MakeExtractors(5, 5);
  RngStream rng = RngStream::Derive(5, "copies");
  const auto train = RandomSamples(9, 5, 3, rng);
  std::vector<Eigen::VectorXd> generated;
  for (const Sample& s : train) generated.push_back(s.features);
  auto result = ScoreRound(train, generated, e.embedder, e.stack, 0.5, 0.5, 3);
  ASSERT_OK(result);
  for (size_t i = 0; i < train.size(); ++i) {
    EXPECT_EQ(result->similarity[i], 0.0);
    EXPECT_EQ(result->loss[i], 1.0);
  }
  EXPECT_THAT(result->per_holder, ElementsAre(3.0, 3.0, 3.0));
}

TEST(ScoreRoundTest, OneFarCounterpart) {
  const Extractors e = MakeExtractors(5, 6);
  RngStream rng = RngStream::Derive(6, "far");
  const auto train = RandomSamples(6, 5, 2, rng);
  std::vector<Eigen::VectorXd> generated;
  for (const Sample& s : train) generated.push_back(s.features);
  generated[2] = -3.0 * train[2].features;
  auto result = ScoreRound(train, generated, e.embedder, e.stack, 0.5, 0.5, 2);
  ASSERT_OK(result);
  for (size_t i = 0; i < train.size(); ++i) {
    EXPECT_EQ(result->loss[i], i == 2 ? 0.0 : 1.0);
  }
  EXPECT_EQ(result->c_min, 0.0);
  EXPECT_EQ(result->c_max, result->similarity[2]);
  EXPECT_THAT(result->per_holder, ElementsAre(2.0, 3.0));
}

TEST(ScoreRoundTest, HolderPermutationIsEquivariant) {
  const Extractors e = MakeExtractors(5, 7);
  RngStream rng = RngStream::Derive(7, "perm");
  auto train = RandomSamples(12, 5, 4, rng);
  std::vector<Eigen::VectorXd> generated;
  for (const Sample& s : train) {
    generated.push_back(s.features + 0.5 * RandomVector(5, rng));
  }
  auto base = ScoreRound(train, generated, e.embedder, e.stack, 0.5, 0.5, 4);
  ASSERT_OK(base);
  const std::vector<int> perm = {2, 0, 3, 1};
  for (Sample& s : train) s.holder = perm[s.holder];
  auto permuted = ScoreRound(train, generated, e.embedder, e.stack, 0.5, 0.5, 4);
  ASSERT_OK(permuted);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(permuted->per_holder[perm[k]], base->per_holder[k]);
  }
}

TEST(ScoreRoundTest, DeterministicAndBounded) {
  const Extractors e = MakeExtractors(4, 8);
  RngStream rng = RngStream::Derive(8, "rounds");
  for (int round = 0; round < 1000; ++round) {
    const int n = 2 + rng.UniformIndex(6);
    const auto train = RandomSamples(n, 4, 2, rng);
    std::vector<Eigen::VectorXd> generated;
    for (int i = 0; i < n; ++i) generated.push_back(RandomVector(4, rng));
    auto a = ScoreRound(train, generated, e.embedder, e.stack, 0.5, 0.5, 2);
    auto b = ScoreRound(train, generated, e.embedder, e.stack, 0.5, 0.5, 2);
    ASSERT_OK(a);
    ASSERT_OK(b);
    ASSERT_EQ(a->loss, b->loss);
    for (double c : a->loss) {
      ASSERT_GE(c, 0.0);
      ASSERT_LE(c, 1.0);
    }
  }
}

TEST(ScoreRoundTest, CountMismatch) {
  const Extractors e = MakeExtractors(4, 9);
  RngStream rng = RngStream::Derive(9, "mismatch");
  const auto train = RandomSamples(3, 4, 1, rng);
  const std::vector<Eigen::VectorXd> generated = {train[0].features};
  EXPECT_FALSE(
      ScoreRound(train, generated, e.embedder, e.stack, 0.5, 0.5, 1).ok());
}

TEST(FeatureRecordsTest, ParsesJsonLines) {
  auto records = LoadFeatureRecords(COPYALLOC_TESTDATA "/features.jsonl");
  ASSERT_OK(records);
  ASSERT_EQ(records->size(), 3u);
  EXPECT_EQ((*records)[1].id, "a-1");
  EXPECT_EQ((*records)[1].holder, 1);
  EXPECT_EQ((*records)[2].holder, 0);
  EXPECT_EQ((*records)[0].layers[0].shape, (LayerShape{2, 1, 2}));

  // Records 0 and 2 share normalized channel vectors up to a swap of the
  // positions, so every position is orthogonal: distance 2 per position.
  const std::vector<Eigen::VectorXd> ones = {Eigen::VectorXd::Ones(2)};
  const std::vector<FeatureRecord> train = {(*records)[0]};
  const std::vector<FeatureRecord> generated = {(*records)[2]};
  auto result = ScoreRecords(train, generated, ones, 0.0, 1.0, 1);
  ASSERT_OK(result);
  EXPECT_NEAR(result->perceptual[0], 2.0, 1e-12);
}

TEST(FeatureRecordsTest, ReportsBadLine) {
  auto records = ParseFeatureRecords(
      "{\"id\": \"x\", \"embedding\": [1], \"layers\": []}\n"
      "{\"id\": \"y\", \"embedding\": [1], \"layers\": [{\"channels\": 2, "
      "\"height\": 1, \"width\": 1, \"values\": [1]}]}\n");
  ASSERT_FALSE(records.ok());
  EXPECT_THAT(std::string(records.status().message()), HasSubstr("line 2"));
}

}  // namespace
}  // namespace copyalloc
