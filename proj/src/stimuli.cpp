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

#include "embias/stimuli.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "embias/error.hpp"
#include "json.hpp"

namespace embias {
namespace {

using nlohmann::json;

std::string JoinQuoted(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ", ";
    out += '"' + w + '"';
  }
  return out;
}

void CheckNoRepeats(const WordSet& set, const std::string& where) {
  std::set<std::string> seen;
  std::vector<std::string> repeated;
  for (const auto& w : set.words) {
    if (w.empty()) ThrowData(where + ": empty word in set '" + set.label + "'");
    if (!seen.insert(w).second) repeated.push_back(w);
  }
  if (!repeated.empty()) {
    ThrowData(where + ": repeated word(s) in set '" + set.label +
              "': " + JoinQuoted(repeated));
  }
}

void CheckDisjoint(const WordSet& first, const WordSet& second,
                   const std::string& where) {
  std::set<std::string> lhs(first.words.begin(), first.words.end());
  std::vector<std::string> shared;
  for (const auto& w : second.words) {
    if (lhs.count(w)) shared.push_back(w);
  }
  if (!shared.empty()) {
    ThrowData(where + ": word(s) in both '" + first.label + "' and '" +
              second.label + "': " + JoinQuoted(shared));
  }
}

void CheckNonEmpty(const WordSet& set, const std::string& where) {
  if (set.words.empty()) {
    ThrowData(where + ": set '" + set.label + "' is empty");
  }
}

WordSet Concat(std::string label, const WordSet& first, const WordSet& second) {
  WordSet out{std::move(label), first.words, {}};
  out.words.insert(out.words.end(), second.words.begin(), second.words.end());
  if (!first.provenance.empty() || !second.provenance.empty()) {
    out.provenance = first.provenance == second.provenance
                         ? first.provenance
                         : first.provenance + "; " + second.provenance;
  }
  return out;
}

WordSet ReadSet(const json& sets, const json& provenance, const char* key,
                bool required) {
  WordSet out;
  if (!sets.contains(key)) {
    if (required) ThrowData(std::string("missing set '") + key + "'");
    out.label = key;
    return out;
  }
  const json& node = sets.at(key);
  if (!node.is_object()) {
    ThrowData(std::string("set '") + key + "' must be an object");
  }
  out.label = node.value("label", std::string(key));
  if (!node.contains("words") || !node.at("words").is_array()) {
    ThrowData(std::string("set '") + key + "' needs a \"words\" array");
  }
  for (const auto& w : node.at("words")) {
    if (!w.is_string()) {
      ThrowData(std::string("set '") + key + "' contains a non-string word");
    }
    out.words.push_back(w.get<std::string>());
  }
  if (provenance.is_object() && provenance.contains(key)) {
    out.provenance = provenance.at(key).get<std::string>();
  } else if (node.contains("provenance")) {
    out.provenance = node.at("provenance").get<std::string>();
  }
  return out;
}

}  // namespace

void StimulusSpec::Validate() const {
  const std::string where = "stimulus spec '" + name + "'";
  for (const WordSet* set : {&x, &y, &a, &b}) {
    CheckNonEmpty(*set, where);
    CheckNoRepeats(*set, where);
  }
  if (x.words.size() != y.words.size()) {
    ThrowData(where + ": unequal target sets ('" + x.label + "' has " +
              std::to_string(x.words.size()) + " words, '" + y.label +
              "' has " + std::to_string(y.words.size()) + ")");
  }
  CheckDisjoint(x, y, where);
  CheckDisjoint(a, b, where);
}

void BalancedDesign::Validate() const {
  const std::string where = "balanced design '" + name + "'";
  CheckNonEmpty(male, where);
  CheckNonEmpty(female, where);
  CheckNoRepeats(male, where);
  CheckNoRepeats(female, where);
  CheckDisjoint(male, female, where);

  const WordSet* cells[] = {&masculine_career, &masculine_family,
                            &feminine_career, &feminine_family};
  const std::size_t k = masculine_career.words.size();
  for (const WordSet* cell : cells) {
    CheckNonEmpty(*cell, where);
    CheckNoRepeats(*cell, where);
    if (cell->words.size() != k) {
      ThrowData(where + ": cell '" + cell->label + "' has " +
                std::to_string(cell->words.size()) + " words, expected " +
                std::to_string(k));
    }
  }
  if (masculine_objects.words.size() != feminine_objects.words.size()) {
    ThrowData(where + ": object lists differ in size (" +
              std::to_string(masculine_objects.words.size()) + " vs " +
              std::to_string(feminine_objects.words.size()) + ")");
  }
  CheckNoRepeats(masculine_objects, where);
  CheckNoRepeats(feminine_objects, where);

  const WordSet* targets[] = {&masculine_career, &masculine_family,
                              &feminine_career,  &feminine_family,
                              &masculine_objects, &feminine_objects};
  for (std::size_t i = 0; i < std::size(targets); ++i) {
    for (std::size_t j = i + 1; j < std::size(targets); ++j) {
      CheckDisjoint(*targets[i], *targets[j], where);
    }
  }
}

StimulusFile ParseStimuli(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    ThrowData(std::string("stimulus file is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object()) ThrowData("stimulus file must be a JSON object");
    for (const char* key : {"language", "name", "type", "sets"}) {
      if (!doc.contains(key)) {
        ThrowData(std::string("stimulus file lacks field \"") + key + "\"");
      }
    }
    const json& sets = doc.at("sets");
    if (!sets.is_object()) ThrowData("\"sets\" must be an object");
    const json provenance = doc.value("provenance", json::object());
    const auto type = doc.at("type").get<std::string>();

    if (type == "weat") {
      StimulusSpec spec;
      spec.language = doc.at("language").get<std::string>();
      spec.name = doc.at("name").get<std::string>();
      spec.x = ReadSet(sets, provenance, "X", true);
      spec.y = ReadSet(sets, provenance, "Y", true);
      spec.a = ReadSet(sets, provenance, "A", true);
      spec.b = ReadSet(sets, provenance, "B", true);
      spec.Validate();
      return spec;
    }
    if (type == "balanced") {
      BalancedDesign design;
      design.language = doc.at("language").get<std::string>();
      design.name = doc.at("name").get<std::string>();
      design.male = ReadSet(sets, provenance, "male", true);
      design.female = ReadSet(sets, provenance, "female", true);
      design.masculine_career =
          ReadSet(sets, provenance, "masculine_career", true);
      design.masculine_family =
          ReadSet(sets, provenance, "masculine_family", true);
      design.feminine_career = ReadSet(sets, provenance, "feminine_career", true);
      design.feminine_family = ReadSet(sets, provenance, "feminine_family", true);
      design.masculine_objects =
          ReadSet(sets, provenance, "masculine_objects", false);
      design.feminine_objects =
          ReadSet(sets, provenance, "feminine_objects", false);
      design.Validate();
      return design;
    }
    ThrowData("unknown stimulus type '" + type +
              "' (expected \"weat\" or \"balanced\")");
  } catch (const json::exception& e) {
    ThrowData(std::string("stimulus schema violation: ") + e.what());
  }
}

StimulusFile LoadStimuli(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseStimuli(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Expansion ExpandBalancedDesign(const BalancedDesign& design) {
  design.Validate();
  Expansion out;
  auto emit = [&](const std::string& suffix, WordSet x, WordSet y) {
    StimulusSpec spec{design.language, design.name + "/" + suffix,
                      std::move(x),    std::move(y),
                      design.male,     design.female};
    spec.Validate();
    out.specs.push_back(std::move(spec));
  };

  emit("career-family/all",
       Concat("career", design.masculine_career, design.feminine_career),
       Concat("family", design.masculine_family, design.feminine_family));
  emit("career-family/masculine", design.masculine_career,
       design.masculine_family);
  emit("career-family/feminine", design.feminine_career,
       design.feminine_family);
  if (design.masculine_objects.words.empty()) {
    out.notices.push_back("design '" + design.name +
                          "' has no object nouns; objects comparison omitted");
  } else {
    emit("masculine-feminine/objects", design.masculine_objects,
         design.feminine_objects);
  }
  emit("masculine-feminine/career", design.masculine_career,
       design.feminine_career);
  emit("masculine-feminine/family", design.masculine_family,
       design.feminine_family);
  return out;
}

Expansion ToSpecs(const StimulusFile& file) {
  if (const auto* spec = std::get_if<StimulusSpec>(&file)) {
    return Expansion{{*spec}, {}};
  }
  return ExpandBalancedDesign(std::get<BalancedDesign>(file));
}

}  // namespace embias
