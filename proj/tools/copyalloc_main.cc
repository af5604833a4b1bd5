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

// copyalloc: command-line driver for the allocation simulator.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_format.h"
#include "copyalloc/config.h"
#include "copyalloc/copyright.h"
#include "copyalloc/harness.h"

namespace copyalloc {
namespace {

int Fail(const absl::Status& status) {
  std::cerr << "copyalloc: " << status.message() << "\n";
  return 1;
}

absl::StatusOr<ExperimentConfig> ResolveConfig(const std::string& path) {
  ExperimentConfig config = DefaultConfig();
  if (!path.empty()) {
    absl::StatusOr<ExperimentConfig> loaded = LoadConfig(path);
    if (!loaded.ok()) return loaded.status();
    config = *std::move(loaded);
  }
  absl::Status status = ApplyEnvironmentOverrides(&config);
  if (!status.ok()) return status;
  return config;
}

absl::StatusOr<std::vector<uint64_t>> ResolveSeeds(const std::string& flag) {
  if (!flag.empty()) return ParseSeeds(flag);
  if (const char* env = std::getenv("COPYALLOC_SEED")) return ParseSeeds(env);
  return ParseSeeds("0-4");
}

struct CommonFlags {
  std::string config;
  std::string seeds;
  std::string out;
  int outer_episodes = -1;
  int inner_iterations = -1;
};

void AddCommon(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config, "JSON experiment config");
  cmd->add_option("--seeds", flags->seeds, "Seed list such as 0-4 or 1,3,5");
  cmd->add_option("--out", flags->out, "Output directory");
  cmd->add_option("--outer-episodes", flags->outer_episodes,
                  "Override outer_episodes");
  cmd->add_option("--inner-iterations", flags->inner_iterations,
                  "Override inner_iterations");
}

absl::StatusOr<ExperimentConfig> ConfigFromFlags(const CommonFlags& flags) {
  absl::StatusOr<ExperimentConfig> config = ResolveConfig(flags.config);
  if (!config.ok()) return config;
  if (flags.outer_episodes > 0) config->outer_episodes = flags.outer_episodes;
  if (flags.inner_iterations > 0) config->inner_iterations = flags.inner_iterations;
  absl::Status status = ValidateConfig(*config);
  if (!status.ok()) return status;
  return config;
}

void PrintSummary(const std::vector<RunReport>& reports) {
  std::cout << absl::StrFormat("%-8s %6s %12s %12s %10s\n", "pair", "seeds",
                               "mean_q", "std_q", "wall_s");
  for (const RunReport& r : reports) {
    std::cout << absl::StrFormat("%-8s %6d %12.6f %12.6f %10.1f\n",
                                 r.pair.Name(), r.seeds.size(), r.mean_quality,
                                 r.std_quality, r.wall_seconds);
  }
}

int RunExperiment(const CommonFlags& flags, const std::string& pairs_text,
                  bool with_correlation) {
  absl::StatusOr<ExperimentConfig> config = ConfigFromFlags(flags);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<std::vector<uint64_t>> seeds = ResolveSeeds(flags.seeds);
  if (!seeds.ok()) return Fail(seeds.status());
  absl::StatusOr<std::vector<StrategyPair>> pairs = ParseStrategyPairs(pairs_text);
  if (!pairs.ok()) return Fail(pairs.status());

  MatrixOptions options;
  options.progress = [](const std::string& tag) { std::cerr << "running " << tag << "\n"; };
  absl::StatusOr<std::vector<RunReport>> reports =
      RunMatrix(*config, *pairs, *seeds, options);
  if (!reports.ok()) return Fail(reports.status());

  int violations = 0;
  for (uint64_t seed : *seeds) {
    ExperimentConfig cfg = *config;
    cfg.seed = seed;
    auto world = InitWorld(cfg);
    if (!world.ok()) return Fail(world.status());
    for (const RunReport& r : *reports) {
      for (size_t i = 0; i < r.seeds.size(); ++i) {
        if (r.seeds[i] != seed) continue;
        for (const std::string& v : CheckLedger(**world, r.ledgers[i])) {
          std::cerr << r.pair.Name() << " seed " << seed << ": " << v << "\n";
          ++violations;
        }
      }
    }
  }

  std::vector<CorrelationReport> correlations;
  if (with_correlation) {
    for (uint64_t seed : *seeds) {
      ExperimentConfig cfg = *config;
      cfg.seed = seed;
      auto world = InitWorld(cfg);
      if (!world.ok()) return Fail(world.status());
      Environment env(*world);
      auto report = BuildCorrelationReport(env);
      if (!report.ok()) return Fail(report.status());
      correlations.push_back(*std::move(report));
    }
  }
  const std::string out = flags.out.empty() ? OutputDirectory("out") : flags.out;
  absl::Status status = EmitReports(*reports, correlations, out);
  if (!status.ok()) return Fail(status);
  PrintSummary(*reports);
  std::cout << "reports written to " << out << "\n";
  if (violations > 0) {
    std::cerr << "copyalloc: " << violations << " ledger soundness violations\n";
    return 2;
  }
  return 0;
}

int Correlate(const CommonFlags& flags) {
  absl::StatusOr<ExperimentConfig> config = ConfigFromFlags(flags);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<std::vector<uint64_t>> seeds = ResolveSeeds(flags.seeds);
  if (!seeds.ok()) return Fail(seeds.status());
  std::vector<CorrelationReport> reports;
  std::cout << absl::StrFormat("%6s %8s %10s %8s %8s\n", "seed", "samples",
                               "spearman", "group_a", "group_b");
  for (uint64_t seed : *seeds) {
    ExperimentConfig cfg = *config;
    cfg.seed = seed;
    auto world = InitWorld(cfg);
    if (!world.ok()) return Fail(world.status());
    Environment env(*world);
    auto report = BuildCorrelationReport(env);
    if (!report.ok()) return Fail(report.status());
    int a = 0;
    int b = 0;
    for (const CorrelationPoint& p : report->points) {
      a += p.group_a;
      b += p.group_b;
    }
    std::cout << absl::StrFormat("%6d %8d %10.6f %8d %8d\n", seed,
                                 report->points.size(), report->rho, a, b);
    reports.push_back(*std::move(report));
  }
  const std::string out = flags.out.empty() ? OutputDirectory("out") : flags.out;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  std::ofstream file(std::filesystem::path(out) / "correlation.csv");
  if (!file) return Fail(absl::UnavailableError("cannot write correlation.csv"));
  WriteCorrelationCsv(reports, file);
  return 0;
}

int ScoreFiles(const std::string& train_path, const std::string& generated_path,
               double a, double b, const std::string& out_path) {
  auto train = LoadFeatureRecords(train_path);
  if (!train.ok()) return Fail(train.status());
  auto generated = LoadFeatureRecords(generated_path);
  if (!generated.ok()) return Fail(generated.status());
  std::map<std::string, const FeatureRecord*> by_id;
  for (const FeatureRecord& r : *generated) by_id[r.id] = &r;
  std::vector<FeatureRecord> paired;
  int num_holders = 0;
  for (const FeatureRecord& r : *train) {
    auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      return Fail(absl::InvalidArgumentError("no generated record for id " + r.id));
    }
    paired.push_back(*it->second);
    num_holders = std::max(num_holders, r.holder + 1);
  }
  if (train->empty()) return Fail(absl::InvalidArgumentError("no training records"));
  std::vector<Eigen::VectorXd> weights;
  for (const FeatureTensor& layer : train->front().layers) {
    weights.push_back(Eigen::VectorXd::Ones(layer.shape.channels));
  }
  auto result = ScoreRecords(*train, paired, weights, a, b, num_holders);
  if (!result.ok()) return Fail(result.status());
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) return Fail(absl::UnavailableError("cannot write " + out_path));
    out = &file;
  }
  *out << "id,holder,semantic,perceptual,similarity,copyright_loss\n";
  for (size_t i = 0; i < train->size(); ++i) {
    *out << absl::StrFormat("%s,%d,%.6f,%.6f,%.6f,%.6f\n", (*train)[i].id,
                            (*train)[i].holder, result->semantic[i],
                            result->perceptual[i], result->similarity[i],
                            result->loss[i]);
  }
  return 0;
}

}  // namespace
}  // namespace copyalloc

int main(int argc, char** argv) {
  using namespace copyalloc;
  CLI::App app{"Copyright-aware budget allocation simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string outer = "rl";
  std::string inner = "rl";
  CLI::App* run = app.add_subcommand("run", "Run one strategy pair over seeds");
  AddCommon(run, &run_flags);
  run->add_option("--outer", outer, "rl, greedy, linear or random");
  run->add_option("--inner", inner, "rl, linear, random, contribution or copyright");

  CommonFlags matrix_flags;
  std::string pairs = "all";
  CLI::App* matrix = app.add_subcommand("matrix", "Run a strategy-pair matrix");
  AddCommon(matrix, &matrix_flags);
  matrix->add_option("--pairs", pairs, "all, or a list such as RL+RL,G+L");

  CommonFlags correlate_flags;
  CLI::App* correlate = app.add_subcommand(
      "correlate", "Rank correlation of contribution and copyright loss");
  AddCommon(correlate, &correlate_flags);

  std::string train_path;
  std::string generated_path;
  std::string score_out;
  double weight_a = 0.5;
  double weight_b = 0.5;
  CLI::App* copyright = app.add_subcommand(
      "copyright", "Score precomputed feature records (JSON lines)");
  copyright->add_option("--train", train_path, "Training records")->required();
  copyright->add_option("--generated", generated_path, "Generated records, same ids")
      ->required();
  copyright->add_option("--semantic-weight", weight_a, "Weight a");
  copyright->add_option("--perceptual-weight", weight_b, "Weight b");
  copyright->add_option("--out", score_out, "CSV output (default stdout)");

  CLI::App* defaults = app.add_subcommand("defaults", "Print the default config");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return RunExperiment(run_flags, outer + "+" + inner, /*with_correlation=*/false);
  }
  if (*matrix) return RunExperiment(matrix_flags, pairs, /*with_correlation=*/true);
  if (*correlate) return Correlate(correlate_flags);
  if (*copyright) {
    return ScoreFiles(train_path, generated_path, weight_a, weight_b, score_out);
  }
  if (*defaults) {
    std::cout << ConfigToJson(DefaultConfig()).dump(2) << "\n";
    return 0;
  }
  return 1;
}
