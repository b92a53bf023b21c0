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

#include "embias/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "embias/error.hpp"

namespace embias {
namespace {

std::string Fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string out = buf;
  if (out == "-0.000" || out == "-0.0000") out.erase(0, 1);
  return out;
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void WriteText(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowData("cannot write " + path.string());
  out << text;
  if (!out.flush()) ThrowData("write failure on " + path.string());
}

// Layout, in SVG user units.
constexpr double kWidthPerLanguage = 120.0;
constexpr double kBarWidth = 36.0;
constexpr double kBarGap = 8.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kPanelHeight = 240.0;
constexpr double kPlotHeight = 160.0;
constexpr double kPanelTop = 40.0;  // panel title area
constexpr double kHeader = 50.0;
const char* kRawColor = "#4c72b0";
const char* kLemmaColor = "#dd8452";

}  // namespace

RunReport BuildReport(std::span<const AggregateResult> aggregates,
                      nlohmann::ordered_json config) {
  if (aggregates.empty()) ThrowData("report needs at least one aggregate result");
  RunReport report;
  report.toolkit_version = EMBIAS_VERSION;
  report.config = std::move(config);
  std::set<std::tuple<std::string, int, std::string>> keys;
  for (const auto& a : aggregates) {
    if (a.n_runs < 1) ThrowData("aggregate '" + a.spec_name + "' has no runs");
    auto key = std::make_tuple(a.language, static_cast<int>(a.corpus_version),
                               a.spec_name);
    if (!keys.insert(key).second) {
      ThrowData("duplicate report row: language '" + a.language +
                "', version '" + std::string(ToString(a.corpus_version)) +
                "', spec '" + a.spec_name + "'");
    }
    report.rows.push_back({a.language, a.corpus_version, a.spec_name,
                           a.mean_statistic, a.mean_effect_size, a.mean_p_value,
                           a.n_runs});
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ReportRow& l, const ReportRow& r) {
              return std::tie(l.spec_name, l.language, l.corpus_version) <
                     std::tie(r.spec_name, r.language, r.corpus_version);
            });
  return report;
}

std::string FormatTsv(const RunReport& report) {
  std::string out = "language\tversion\tspec\tm.t.s.\tm.e.s.\tm.p.v.\tn_runs\n";
  for (const auto& row : report.rows) {
    out += row.language + '\t' + std::string(ToString(row.corpus_version)) +
           '\t' + row.spec_name + '\t' + Fixed(row.mean_statistic, 3) + '\t' +
           Fixed(row.mean_effect_size, 3) + '\t' + Fixed(row.mean_p_value, 3) +
           '\t' + std::to_string(row.n_runs) + '\n';
  }
  return out;
}

std::string FormatMarkdown(const RunReport& report) {
  std::string out =
      "| language | version | spec | m.t.s. | m.e.s. | m.p.v. | n_runs |\n"
      "|---|---|---|---:|---:|---:|---:|\n";
  for (const auto& row : report.rows) {
    out += "| " + row.language + " | " +
           std::string(ToString(row.corpus_version)) + " | " + row.spec_name +
           " | " + Fixed(row.mean_statistic, 3) + " | " +
           Fixed(row.mean_effect_size, 3) + " | " +
           Fixed(row.mean_p_value, 3) + " | " + std::to_string(row.n_runs) +
           " |\n";
  }
  out += "\nGenerated by embias " + report.toolkit_version + ".\n";
  if (!report.config.empty()) {
    out += "\n```json\n" + report.config.dump(2) + "\n```\n";
  }
  return out;
}

std::string RenderSvg(const RunReport& report, const std::string& title) {
  // panel (spec) -> language -> version -> m.t.s.
  std::map<std::string, std::map<std::string, std::map<int, double>>> panels;
  std::set<std::string> languages;
  double max_abs = 0.0;
  bool any_negative = false;
  for (const auto& row : report.rows) {
    panels[row.spec_name][row.language][static_cast<int>(row.corpus_version)] =
        row.mean_statistic;
    languages.insert(row.language);
    max_abs = std::max(max_abs, std::abs(row.mean_statistic));
    any_negative = any_negative || row.mean_statistic < 0.0;
  }
  if (max_abs == 0.0) max_abs = 1.0;
  // Zero line sits mid-plot when negative bars exist, else at the bottom.
  const double available = any_negative ? kPlotHeight / 2.0 : kPlotHeight;
  const double scale = available / max_abs;

  const double width = kMarginLeft +
                       kWidthPerLanguage * static_cast<double>(languages.size()) +
                       kMarginRight;
  const double height = kHeader + kPanelHeight * static_cast<double>(panels.size());

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Fixed(width, 0) +
         "\" height=\"" + Fixed(height, 0) + "\" viewBox=\"0 0 " +
         Fixed(width, 0) + " " + Fixed(height, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" data-scale=\"" +
         Fixed(scale, 6) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + Fixed(width, 0) + "\" height=\"" +
         Fixed(height, 0) + "\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + Fixed(width / 2, 1) +
         "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         Escape(title.empty() ? "Mean WEAT test statistic" : title) +
         "</text>\n";

  // Legend.
  const double legend_x = width - kMarginRight + 20.0;
  svg += "<rect x=\"" + Fixed(legend_x, 1) + "\" y=\"40\" width=\"12\" "
         "height=\"12\" fill=\"" + kRawColor + "\"/>\n";
  svg += "<text x=\"" + Fixed(legend_x + 18, 1) + "\" y=\"50\">raw</text>\n";
  svg += "<rect x=\"" + Fixed(legend_x, 1) + "\" y=\"60\" width=\"12\" "
         "height=\"12\" fill=\"" + kLemmaColor + "\"/>\n";
  svg += "<text x=\"" + Fixed(legend_x + 18, 1) +
         "\" y=\"70\">lemmatized</text>\n";

  std::size_t panel_index = 0;
  for (const auto& [spec, by_language] : panels) {
    const double top = kHeader + kPanelHeight * static_cast<double>(panel_index);
    const double plot_top = top + kPanelTop;
    const double zero_y = plot_top + (any_negative ? kPlotHeight / 2.0 : kPlotHeight);
    svg += "<g class=\"panel\" data-spec=\"" + Escape(spec) + "\">\n";
    svg += "<text x=\"" + Fixed(kMarginLeft, 1) + "\" y=\"" +
           Fixed(top + 20, 1) + "\" font-weight=\"bold\">" + Escape(spec) +
           "</text>\n";
    svg += "<line x1=\"" + Fixed(kMarginLeft, 1) + "\" y1=\"" +
           Fixed(plot_top, 1) + "\" x2=\"" + Fixed(kMarginLeft, 1) +
           "\" y2=\"" + Fixed(plot_top + kPlotHeight, 1) +
           "\" stroke=\"#333333\"/>\n";
    svg += "<line x1=\"" + Fixed(kMarginLeft, 1) + "\" y1=\"" +
           Fixed(zero_y, 4) + "\" x2=\"" +
           Fixed(width - kMarginRight, 1) + "\" y2=\"" + Fixed(zero_y, 4) +
           "\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + Fixed(kMarginLeft - 6, 1) + "\" y=\"" +
           Fixed(plot_top + 4, 1) + "\" text-anchor=\"end\">" +
           Fixed(max_abs, 2) + "</text>\n";
    svg += "<text x=\"" + Fixed(kMarginLeft - 6, 1) + "\" y=\"" +
           Fixed(zero_y + 4, 1) + "\" text-anchor=\"end\">0</text>\n";

    std::size_t lang_index = 0;
    for (const auto& language : languages) {
      const double group_x =
          kMarginLeft + kWidthPerLanguage * static_cast<double>(lang_index) + 16.0;
      svg += "<text x=\"" + Fixed(group_x + kBarWidth + kBarGap / 2, 1) +
             "\" y=\"" + Fixed(plot_top + kPlotHeight + 18, 1) +
             "\" text-anchor=\"middle\">" + Escape(language) + "</text>\n";
      auto found = by_language.find(language);
      for (int version = 0; version < 2; ++version) {
        if (found == by_language.end()) break;
        auto value_it = found->second.find(version);
        if (value_it == found->second.end()) continue;
        const double value = value_it->second;
        const double bar_height = std::abs(value) * scale;
        const double x = group_x + version * (kBarWidth + kBarGap);
        const double y = value >= 0 ? zero_y - bar_height : zero_y;
        const auto version_name =
            std::string(ToString(static_cast<CorpusVersion>(version)));
        svg += "<rect class=\"bar\" x=\"" + Fixed(x, 4) + "\" y=\"" +
               Fixed(y, 4) + "\" width=\"" + Fixed(kBarWidth, 4) +
               "\" height=\"" + Fixed(bar_height, 4) + "\" fill=\"" +
               (version == 0 ? kRawColor : kLemmaColor) + "\" data-language=\"" +
               Escape(language) + "\" data-version=\"" + version_name +
               "\" data-mts=\"" + Fixed(value, 6) + "\"><title>" +
               Escape(language + " " + version_name + ": " + Fixed(value, 3)) +
               "</title></rect>\n";
        const double label_y = value >= 0 ? y - 4 : y + bar_height + 12;
        svg += "<text x=\"" + Fixed(x + kBarWidth / 2, 4) + "\" y=\"" +
               Fixed(label_y, 4) + "\" text-anchor=\"middle\" font-size=\"10\">" +
               Fixed(value, 3) + "</text>\n";
      }
      ++lang_index;
    }
    svg += "</g>\n";
    ++panel_index;
  }
  svg += "</svg>\n";
  return svg;
}

void WriteReport(const RunReport& report, const std::filesystem::path& dir,
                 const std::string& title) {
  std::filesystem::create_directories(dir);
  WriteText(FormatTsv(report), dir / "report.tsv");
  WriteText(FormatMarkdown(report), dir / "report.md");
  WriteText(RenderSvg(report, title), dir / "report.svg");
}

}  // namespace embias
