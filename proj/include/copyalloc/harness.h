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


// Experiment harness: seeded strategy-pair matrices, mean and std of the
// final model quality, ledger soundness checks, the contribution versus
// copyright-loss rank analysis and report files.

#ifndef COPYALLOC_HARNESS_H_
#define COPYALLOC_HARNESS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "copyalloc/agents.h"
#include "copyalloc/allocators.h"
#include "copyalloc/config.h"
#include "copyalloc/strategy.h"

namespace copyalloc {

// Ranks starting at 1; tied values share their average rank.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation of average ranks. Fails on length mismatch, fewer
// than two values or a constant input.
absl::StatusOr<double> Spearman(std::span<const double> x,
                                std::span<const double> y);

struct RunReport {
  StrategyPair pair;
  std::vector<uint64_t> seeds;
  std::vector<double> quality;
  std::vector<double> fid;
  double mean_quality = 0.0;
  // Sample standard deviation (n - 1); zero for a single seed.
  double std_quality = 0.0;
  std::vector<std::vector<RoundRecord>> ledgers;
  // Cumulative N_T, X_T and C_T per seed.
  std::vector<double> samples;
  std::vector<double> contribution;
  std::vector<double> copyright;
  double wall_seconds = 0.0;
};

struct MatrixOptions {
  // Called with a short line before each (pair, seed) episode.
  std::function<void(const std::string&)> progress;
};

// Runs every (pair, seed). Pairs share one world and one inner-agent cache
// per seed. Reports follow the order of `pairs`, seeds the order of `seeds`.
absl::StatusOr<std::vector<RunReport>> RunMatrix(
    const ExperimentConfig& config, std::span<const StrategyPair> pairs,
    std::span<const uint64_t> seeds, const MatrixOptions& options = {});

// Runs one pair on an existing environment. `rl_inner` serves pairs with an
// RL inner layer.
absl::StatusOr<EpisodeResult> RunPair(Environment& env, const StrategyPair& pair,
                                      RlInnerStrategy& rl_inner);

double Mean(std::span<const double> values);
double SampleStd(std::span<const double> values);

// Budget conservation, fraction validity, the join rule, ledger
// monotonicity and round count. Returns one message per violation.
std::vector<std::string> CheckLedger(const World& world,
                                     std::span<const RoundRecord> ledger);

struct CorrelationPoint {
  uint64_t seed = 0;
  int round = 0;
  int holder = 0;
  QualityTier tier = QualityTier::kHigh;
  double contribution = 0.0;
  double copyright = 0.0;
  // A: top-quartile contribution with bottom-quartile copyright loss.
  // B: bottom-quartile contribution with top-quartile copyright loss.
  bool group_a = false;
  bool group_b = false;
};

struct CorrelationReport {
  std::vector<CorrelationPoint> points;
  double rho = 0.0;
  double contribution_q1 = 0.0;
  double contribution_q3 = 0.0;
  double copyright_q1 = 0.0;
  double copyright_q3 = 0.0;
};

// Linear-interpolation quantile, q in [0, 1].
double Quantile(std::span<const double> values, double q);

// Per-sample contribution and copyright loss of every available batch in
// every round of the world, with the rank correlation between them.
absl::StatusOr<CorrelationReport> BuildCorrelationReport(Environment& env);

// Fixed column orders, six decimals.
void WriteSummaryCsv(std::span<const RunReport> reports, std::ostream& out);
void WriteRunsCsv(std::span<const RunReport> reports, std::ostream& out);
void WriteLedgersJsonl(std::span<const RunReport> reports, std::ostream& out);
void WriteCorrelationCsv(std::span<const CorrelationReport> reports,
                         std::ostream& out);

// summary.csv, runs.csv and ledgers.jsonl under `dir`, plus correlation.csv
// when `correlations` is non-empty. Creates `dir` if needed.
absl::Status EmitReports(std::span<const RunReport> reports,
                         std::span<const CorrelationReport> correlations,
                         const std::string& dir);

// "0,1,2", "0-4" or a mix.
absl::StatusOr<std::vector<uint64_t>> ParseSeeds(std::string_view text);

}  // namespace copyalloc

#endif  // COPYALLOC_HARNESS_H_
