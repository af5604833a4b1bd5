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

#include <filesystem>
#include <fstream>
#include <ostream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "copyalloc/harness.h"
#include "nlohmann/json.hpp"

namespace copyalloc {
namespace {

std::string F6(double v) { return absl::StrFormat("%.6f", v); }

}  // namespace

void WriteSummaryCsv(std::span<const RunReport> reports, std::ostream& out) {
  out << "pair,outer,inner,n_seeds,mean_q,std_q,mean_fid,seeds\n";
  for (const RunReport& r : reports) {
    out << r.pair.Name() << ',' << OuterKindName(r.pair.outer) << ','
        << InnerKindName(r.pair.inner) << ',' << r.seeds.size() << ','
        << F6(r.mean_quality) << ',' << F6(r.std_quality) << ','
        << F6(Mean(r.fid)) << ',' << absl::StrJoin(r.seeds, ";") << '\n';
  }
}

void WriteRunsCsv(std::span<const RunReport> reports, std::ostream& out) {
  out << "pair,seed,q,fid,samples,contribution,copyright_loss,spent\n";
  for (const RunReport& r : reports) {
    for (size_t i = 0; i < r.seeds.size(); ++i) {
      double spent = 0.0;
      for (const RoundRecord& rec : r.ledgers[i]) spent += rec.budget;
      out << r.pair.Name() << ',' << r.seeds[i] << ',' << F6(r.quality[i]) << ','
          << F6(r.fid[i]) << ',' << F6(r.samples[i]) << ','
          << F6(r.contribution[i]) << ',' << F6(r.copyright[i]) << ','
          << F6(spent) << '\n';
    }
  }
}

void WriteLedgersJsonl(std::span<const RunReport> reports, std::ostream& out) {
  for (const RunReport& r : reports) {
    for (size_t i = 0; i < r.seeds.size(); ++i) {
      for (const RoundRecord& rec : r.ledgers[i]) {
        nlohmann::json line = {{"pair", r.pair.Name()},
                               {"seed", r.seeds[i]},
                               {"round", rec.round},
                               {"budget", rec.budget},
                               {"fractions", rec.fractions},
                               {"payments", rec.payments},
                               {"joined", rec.joined},
                               {"joined_samples", rec.joined_samples},
                               {"contribution", rec.contribution},
                               {"copyright_loss", rec.copyright},
                               {"holder_contribution", rec.holder_contribution},
                               {"holder_copyright_loss", rec.holder_copyright},
                               {"n", rec.n},
                               {"c", rec.c},
                               {"x", rec.x},
                               {"leftover", rec.leftover}};
        if (rec.has_quality) {
          line["fid"] = rec.quality.fid;
          line["q"] = rec.quality.q;
        }
        out << line.dump() << '\n';
      }
    }
  }
}

void WriteCorrelationCsv(std::span<const CorrelationReport> reports,
                         std::ostream& out) {
  out << "seed,round,holder,tier,contribution,copyright_loss,group\n";
  for (const CorrelationReport& report : reports) {
    for (const CorrelationPoint& p : report.points) {
      const char* group = p.group_a ? "A" : p.group_b ? "B" : "";
      out << p.seed << ',' << p.round << ',' << p.holder << ','
          << QualityTierName(p.tier) << ',' << F6(p.contribution) << ','
          << F6(p.copyright) << ',' << group << '\n';
    }
  }
}

absl::Status EmitReports(std::span<const RunReport> reports,
                         std::span<const CorrelationReport> correlations,
                         const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  auto write = [&](const std::string& name,
                   const std::function<void(std::ostream&)>& body) -> absl::Status {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
    body(out);
    out.flush();
    if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
    return absl::OkStatus();
  };
  absl::Status status = write("summary.csv", [&](std::ostream& o) { WriteSummaryCsv(reports, o); });
  if (!status.ok()) return status;
  status = write("runs.csv", [&](std::ostream& o) { WriteRunsCsv(reports, o); });
  if (!status.ok()) return status;
  status = write("ledgers.jsonl", [&](std::ostream& o) { WriteLedgersJsonl(reports, o); });
  if (!status.ok()) return status;
  if (!correlations.empty()) {
    status = write("correlation.csv",
                   [&](std::ostream& o) { WriteCorrelationCsv(correlations, o); });
  }
  return status;
}

}  // namespace copyalloc
