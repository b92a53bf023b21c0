// Copyright 2026 The embias Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMBIAS_REPORT_HPP_
#define EMBIAS_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "embias/weat.hpp"

namespace embias {

struct ReportRow {
  std::string language;
  CorpusVersion corpus_version = CorpusVersion::kRaw;
  std::string spec_name;
  double mean_statistic = 0.0;
  double mean_effect_size = 0.0;
  double mean_p_value = 0.0;
  std::size_t n_runs = 0;
};

struct RunReport {
  std::vector<ReportRow> rows;  // sorted by spec, language, version
  std::string toolkit_version;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

// One row per aggregate. Rows must be unique on (language, version, spec).
RunReport BuildReport(std::span<const AggregateResult> aggregates,
                      nlohmann::ordered_json config = nlohmann::ordered_json::object());

// Columns: language, version, spec, m.t.s., m.e.s., m.p.v., n_runs. Numbers
// rounded to three decimals.
std::string FormatTsv(const RunReport& report);
std::string FormatMarkdown(const RunReport& report);

// Grouped bar chart of mean test statistics: one panel per comparison,
// bars grouped by language, raw and lemmatized side by side. All bars share
// one vertical scale. Self-contained and byte-stable for equal input.
std::string RenderSvg(const RunReport& report, const std::string& title = "");

// Writes report.tsv, report.md and report.svg into `dir`.
void WriteReport(const RunReport& report, const std::filesystem::path& dir,
                 const std::string& title = "");

}  // namespace embias

#endif  // EMBIAS_REPORT_HPP_
