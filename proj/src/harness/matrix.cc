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
#include <chrono>
#include <cmath>
#include <memory>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "copyalloc/harness.h"
#include "copyalloc/status_macros.h"

namespace copyalloc {

absl::StatusOr<EpisodeResult> RunPair(Environment& env, const StrategyPair& pair,
                                      RlInnerStrategy& rl_inner) {
  const ExperimentConfig& cfg = env.config();
  RngStream rng = RngStream::Derive(cfg.seed, "episode").Child(pair.Name());
  std::unique_ptr<InnerStrategy> baseline = MakeBaselineInnerStrategy(pair.inner);
  InnerStrategy& inner = baseline ? *baseline : rl_inner;
  if (pair.outer == OuterKind::kRl) {
    ASSIGN_OR_RETURN(OuterTrainingResult trained, TrainOuter(env, inner, cfg, rng));
    return std::move(trained.best);
  }
  std::unique_ptr<OuterStrategy> outer = MakeOuterStrategy(pair.outer);
  return RunEpisode(env, *outer, inner, rng);
}

absl::StatusOr<std::vector<RunReport>> RunMatrix(
    const ExperimentConfig& config, std::span<const StrategyPair> pairs,
    std::span<const uint64_t> seeds, const MatrixOptions& options) {
  std::vector<RunReport> reports(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) reports[i].pair = pairs[i];
  for (uint64_t seed : seeds) {
    ExperimentConfig cfg = config;
    cfg.seed = seed;
    auto world = InitWorld(cfg);
    if (!world.ok()) {
      return absl::Status(world.status().code(),
                          absl::StrCat("seed ", seed, ": ", world.status().message()));
    }
    Environment env(*world);
    RlInnerStrategy rl_inner;
    for (size_t i = 0; i < pairs.size(); ++i) {
      const std::string tag = absl::StrCat(pairs[i].Name(), " seed ", seed);
      if (options.progress) options.progress(tag);
      const auto start = std::chrono::steady_clock::now();
      absl::StatusOr<EpisodeResult> episode = RunPair(env, pairs[i], rl_inner);
      if (!episode.ok()) {
        return absl::Status(episode.status().code(),
                            absl::StrCat(tag, ": ", episode.status().message()));
      }
      RunReport& report = reports[i];
      report.wall_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      report.seeds.push_back(seed);
      report.quality.push_back(episode->quality.q);
      report.fid.push_back(episode->quality.fid);
      const RoundRecord& last = episode->ledger.back();
      report.samples.push_back(last.n);
      report.contribution.push_back(last.x);
      report.copyright.push_back(last.c);
      report.ledgers.push_back(std::move(episode->ledger));
    }
  }
  for (RunReport& report : reports) {
    report.mean_quality = Mean(report.quality);
    report.std_quality = SampleStd(report.quality);
  }
  return reports;
}

std::vector<std::string> CheckLedger(const World& world,
                                     std::span<const RoundRecord> ledger) {
  std::vector<std::string> violations;
  auto fail = [&](int round, std::string what) {
    violations.push_back(absl::StrCat("round ", round, ": ", what));
  };
  const ExperimentConfig& cfg = world.config;
  const double tol = 1e-9 * std::max(1.0, cfg.total_budget);
  if (static_cast<int>(ledger.size()) != cfg.rounds) {
    violations.push_back(absl::StrCat("ledger has ", ledger.size(),
                                      " rounds, expected ", cfg.rounds));
  }
  double spent = 0.0;
  double prev_n = 0.0, prev_c = 0.0, prev_x = 0.0;
  for (size_t i = 0; i < ledger.size(); ++i) {
    const RoundRecord& r = ledger[i];
    const int t = r.round;
    if (t != static_cast<int>(i) + 1) fail(t, "out-of-order round index");
    if (r.budget < 0) fail(t, "negative round budget");
    spent += r.budget;
    if (spent > cfg.total_budget + tol) fail(t, "cumulative spending exceeds B");
    if (std::abs(cfg.total_budget - spent - r.leftover) > tol) {
      fail(t, "leftover budget does not match spending");
    }
    if (r.leftover < 0) fail(t, "negative leftover budget");
    if (r.fractions.size() != world.holders.size() ||
        r.payments.size() != world.holders.size()) {
      fail(t, "fraction or payment vector has the wrong length");
      continue;
    }
    double p_sum = 0.0;
    double pay_sum = 0.0;
    for (size_t k = 0; k < r.fractions.size(); ++k) {
      if (r.fractions[k] < 0) fail(t, absl::StrCat("negative fraction for holder ", k));
      p_sum += r.fractions[k];
      pay_sum += r.payments[k];
      if (std::abs(r.payments[k] - r.budget * r.fractions[k]) > tol) {
        fail(t, absl::StrCat("payment of holder ", k, " is not B^t p_k"));
      }
    }
    if (std::abs(p_sum - 1.0) > 1e-9) fail(t, absl::StrCat("fractions sum to ", p_sum));
    if (std::abs(pay_sum - r.budget) > tol) {
      fail(t, absl::StrCat("payments sum to ", pay_sum, ", round budget ", r.budget));
    }
    for (size_t k = 0; k < world.holders.size(); ++k) {
      const HolderSpec& spec = world.holders[k].spec;
      const bool eligible = spec.join_round <= t &&
                            MeetsAskingPrice(r.payments[k], spec.asking_price);
      const bool joined =
          std::find(r.joined.begin(), r.joined.end(), static_cast<int>(k)) !=
          r.joined.end();
      if (eligible != joined) {
        fail(t, absl::StrCat("holder ", k, joined ? " joined without meeting"
                                                  : " met but did not join",
                             " the join rule"));
      }
    }
    if (r.n < prev_n || r.c < prev_c || r.x < prev_x) {
      fail(t, "cumulative N, C or X decreased");
    }
    prev_n = r.n;
    prev_c = r.c;
    prev_x = r.x;
    const bool last = i + 1 == ledger.size();
    if (r.has_quality != last) {
      fail(t, last ? "final round lacks a quality score"
                   : "non-final round carries a quality score");
    }
  }
  return violations;
}

absl::StatusOr<CorrelationReport> BuildCorrelationReport(Environment& env) {
  CorrelationReport report;
  const World& world = env.world();
  std::vector<double> beta;
  std::vector<double> loss;
  for (int t = 1; t <= world.config.rounds; ++t) {
    ASSIGN_OR_RETURN(const RoundContext* context, env.Probe(t));
    for (size_t i = 0; i < context->sample_holder.size(); ++i) {
      CorrelationPoint point;
      point.seed = world.config.seed;
      point.round = t;
      point.holder = context->sample_holder[i];
      point.tier = world.holders[point.holder].spec.tier;
      point.contribution = context->sample_contribution[i];
      point.copyright = context->sample_copyright[i];
      beta.push_back(point.contribution);
      loss.push_back(point.copyright);
      report.points.push_back(point);
    }
  }
  ASSIGN_OR_RETURN(report.rho, Spearman(beta, loss));
  report.contribution_q1 = Quantile(beta, 0.25);
  report.contribution_q3 = Quantile(beta, 0.75);
  report.copyright_q1 = Quantile(loss, 0.25);
  report.copyright_q3 = Quantile(loss, 0.75);
  for (CorrelationPoint& p : report.points) {
    p.group_a = p.contribution >= report.contribution_q3 &&
                p.copyright <= report.copyright_q1;
    p.group_b = p.contribution <= report.contribution_q1 &&
                p.copyright >= report.copyright_q3;
  }
  return report;
}

absl::StatusOr<std::vector<uint64_t>> ParseSeeds(std::string_view text) {
  std::vector<uint64_t> seeds;
  for (absl::string_view part :
       absl::StrSplit(absl::string_view(text.data(), text.size()), ',',
                      absl::SkipWhitespace())) {
    part = absl::StripAsciiWhitespace(part);
    const size_t dash = part.find('-');
    uint64_t lo = 0;
    uint64_t hi = 0;
    bool ok = false;
    if (dash == absl::string_view::npos) {
      ok = absl::SimpleAtoi(part, &lo);
      hi = lo;
    } else {
      ok = absl::SimpleAtoi(part.substr(0, dash), &lo) &&
           absl::SimpleAtoi(part.substr(dash + 1), &hi) && lo <= hi &&
           hi - lo < 100000;
    }
    if (!ok) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad seed list entry \"", part, "\""));
    }
    for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) return absl::InvalidArgumentError("empty seed list");
  return seeds;
}

}  // namespace copyalloc
