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

#include <cmath>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "doctest.h"
#include "embias/error.hpp"
#include "embias/report.hpp"
#include "test_util.hpp"

using namespace embias;
using doctest::Approx;

namespace {

AggregateResult Agg(const std::string& language, CorpusVersion version,
                    const std::string& spec, double mts, double mes,
                    double mpv) {
  AggregateResult a;
  a.spec_name = spec;
  a.spec_language = language;
  a.language = language;
  a.corpus_version = version;
  a.mean_statistic = mts;
  a.mean_effect_size = mes;
  a.mean_p_value = mpv;
  a.n_runs = 10;
  return a;
}

struct Bar {
  std::string language;
  std::string version;
  double height;
  double mts;
};

std::vector<Bar> ParseBars(const std::string& svg) {
  static const std::regex kRect(
      R"re(<rect class="bar"[^>]*height="([0-9.]+)"[^>]*data-language="([^"]*)" data-version="([^"]*)" data-mts="([-0-9.]+)")re");
  std::vector<Bar> bars;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), kRect);
       it != std::sregex_iterator(); ++it) {
    bars.push_back({(*it)[2], (*it)[3], std::stod((*it)[1]), std::stod((*it)[4])});
  }
  return bars;
}

}  // namespace

TEST_CASE("two-row table with three-decimal rounding") {
  std::vector<AggregateResult> aggs = {
      Agg("es", CorpusVersion::kLemmatized, "career_family", 0.05, 0.2, 0.4),
      Agg("de", CorpusVersion::kRaw, "career_family", 1.53, 0.85, 0.08),
  };
  RunReport report = BuildReport(aggs);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].language == "de");
  CHECK(report.rows[1].language == "es");
  std::string tsv = FormatTsv(report);
  CHECK(tsv ==
        "language\tversion\tspec\tm.t.s.\tm.e.s.\tm.p.v.\tn_runs\n"
        "de\traw\tcareer_family\t1.530\t0.850\t0.080\t10\n"
        "es\tlemmatized\tcareer_family\t0.050\t0.200\t0.400\t10\n");
  std::string md = FormatMarkdown(report);
  CHECK(md.find("| de | raw | career_family | 1.530 | 0.850 | 0.080 | 10 |") !=
        std::string::npos);
}

TEST_CASE("duplicate row key is rejected") {
  std::vector<AggregateResult> aggs = {
      Agg("de", CorpusVersion::kRaw, "career_family", 1.0, 0.5, 0.1),
      Agg("de", CorpusVersion::kRaw, "career_family", 2.0, 0.5, 0.1),
  };
  try {
    BuildReport(aggs);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kData);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }
  CHECK_THROWS_AS(BuildReport(std::span<const AggregateResult>{}), Error);
}

TEST_CASE("bar heights are proportional to the mean statistic") {
  std::vector<AggregateResult> aggs = {
      Agg("de", CorpusVersion::kRaw, "balanced/masculine-feminine/objects", 2.62, 1.9, 0.005),
      Agg("de", CorpusVersion::kLemmatized, "balanced/masculine-feminine/objects", 0.15, 0.3, 0.3),
      Agg("es", CorpusVersion::kRaw, "balanced/masculine-feminine/objects", 2.38, 1.9, 0.001),
      Agg("es", CorpusVersion::kLemmatized, "balanced/masculine-feminine/objects", 0.11, 0.2, 0.35),
      Agg("de", CorpusVersion::kRaw, "balanced/career-family/masculine", -0.03, -0.1, 0.6),
      Agg("es", CorpusVersion::kRaw, "balanced/career-family/masculine", 0.01, 0.02, 0.5),
  };
  std::string svg = RenderSvg(BuildReport(aggs), "t");
  auto bars = ParseBars(svg);
  REQUIRE(bars.size() == aggs.size());
  // Shared scale: height / |mts| is the same for every bar.
  const Bar* largest = &bars[0];
  for (const auto& bar : bars) {
    if (std::abs(bar.mts) > std::abs(largest->mts)) largest = &bar;
  }
  const double ratio = largest->height / std::abs(largest->mts);
  for (const auto& bar : bars) {
    const double expected = std::abs(bar.mts) * ratio;
    CHECK(std::abs(bar.height - expected) <= 0.005 * largest->height);
  }
  std::map<std::string, double> by_key;
  for (const auto& bar : bars) by_key[bar.language + bar.version] = bar.height;
  CHECK(by_key["deraw"] > by_key["delemmatized"]);
}

TEST_CASE("svg output is byte-stable and escapes text") {
  std::vector<AggregateResult> aggs = {
      Agg("de", CorpusVersion::kRaw, "a<b>&c", 0.5, 0.2, 0.1),
  };
  RunReport report = BuildReport(aggs);
  std::string first = RenderSvg(report, "x & y");
  CHECK(first == RenderSvg(BuildReport(aggs), "x & y"));
  CHECK(first.find("a&lt;b&gt;&amp;c") != std::string::npos);
  CHECK(first.find("x &amp; y") != std::string::npos);
  CHECK(first.find("a<b>") == std::string::npos);

  embias::testing::TempDir dir;
  WriteReport(report, dir.path(), "x & y");
  CHECK(embias::testing::ReadFile(dir.path() / "report.svg") == first);
  CHECK(embias::testing::ReadFile(dir.path() / "report.tsv") == FormatTsv(report));
}
