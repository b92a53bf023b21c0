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

#ifndef EMBIAS_STIMULI_HPP_
#define EMBIAS_STIMULI_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace embias {

struct WordSet {
  std::string label;
  std::vector<std::string> words;
  std::string provenance;

  bool operator==(const WordSet&) const = default;
};

// One WEAT comparison: targets X, Y against attributes A, B.
struct StimulusSpec {
  std::string language;
  std::string name;
  WordSet x;
  WordSet y;
  WordSet a;
  WordSet b;

  // Throws kData naming the offending words: |X| != |Y|, X and Y share a
  // word, A and B share a word, an empty set, a repeated word in one set.
  void Validate() const;

  bool operator==(const StimulusSpec&) const = default;
};

// Gender x topic design over grammatically gendered nouns, plus optional
// object-noun lists. Each cell holds k nouns.
struct BalancedDesign {
  std::string language;
  std::string name;
  WordSet male;
  WordSet female;
  WordSet masculine_career;
  WordSet masculine_family;
  WordSet feminine_career;
  WordSet feminine_family;
  WordSet masculine_objects;  // may be empty together with feminine_objects
  WordSet feminine_objects;

  void Validate() const;
};

using StimulusFile = std::variant<StimulusSpec, BalancedDesign>;

// Reads the JSON stimulus schema (see docs/stimulus-schema.md) and
// validates the result.
StimulusFile LoadStimuli(const std::filesystem::path& path);
StimulusFile ParseStimuli(std::string_view json_text);

struct Expansion {
  std::vector<StimulusSpec> specs;
  std::vector<std::string> notices;
};

// Emits, in order: career vs family over all nouns, within masculine
// nouns, within feminine nouns; then masculine vs feminine over objects,
// career nouns, family nouns. Attributes are always male/female. The
// objects comparison is omitted (with a notice) when the object lists are
// empty.
Expansion ExpandBalancedDesign(const BalancedDesign& design);

// A plain spec passes through; a balanced design is expanded.
Expansion ToSpecs(const StimulusFile& file);

}  // namespace embias

#endif  // EMBIAS_STIMULI_HPP_
