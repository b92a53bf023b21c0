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

#ifndef EMBIAS_TESTS_FIXTURES_HPP_
#define EMBIAS_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

// Fixture builders that produce file contents only, so they serve tests on
// both sides of the C API.
namespace embias::testing {

inline std::vector<std::string> Words(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

struct PlantedWords {
  std::vector<std::string> x = Words("career", 8);
  std::vector<std::string> y = Words("family", 8);
  std::vector<std::string> a = Words("male", 8);
  std::vector<std::string> b = Words("female", 8);
};

// Embedding text: X and A near axis 0, Y and B near axis 1, Gaussian noise
// of scale `noise` on every coordinate. `extra` adds unrelated words.
inline std::string PlantedEmbeddingText(const PlantedWords& words,
                                        std::uint64_t seed, int dim = 20,
                                        double noise = 0.05, int extra = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, noise);
  std::vector<std::pair<std::string, int>> rows;
  for (const auto& w : words.x) rows.emplace_back(w, 0);
  for (const auto& w : words.a) rows.emplace_back(w, 0);
  for (const auto& w : words.y) rows.emplace_back(w, 1);
  for (const auto& w : words.b) rows.emplace_back(w, 1);
  for (const auto& w : Words("filler", extra)) rows.emplace_back(w, -1);
  std::string text = std::to_string(rows.size()) + " " + std::to_string(dim) + "\n";
  for (const auto& [word, axis] : rows) {
    text += word;
    for (int d = 0; d < dim; ++d) {
      double value = normal(rng);
      if (d == axis) value += 1.0;
      if (axis < 0) value += 0.3;
      text += " " + std::to_string(value);
    }
    text += "\n";
  }
  return text;
}

inline std::string JsonList(const std::vector<std::string>& words) {
  std::string out = "[";
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + words[i] + "\"";
  }
  return out + "]";
}

inline std::string StimulusJson(const std::string& language,
                                const std::string& name,
                                const PlantedWords& w) {
  auto set = [](const char* label, const std::vector<std::string>& words) {
    return std::string("{\"label\": \"") + label + "\", \"words\": " +
           JsonList(words) + "}";
  };
  return "{\"language\": \"" + language + "\", \"name\": \"" + name +
         "\", \"type\": \"weat\", \"sets\": {\"X\": " + set("career", w.x) +
         ", \"Y\": " + set("family", w.y) + ", \"A\": " + set("male", w.a) +
         ", \"B\": " + set("female", w.b) + "}}\n";
}

}  // namespace embias::testing

#endif  // EMBIAS_TESTS_FIXTURES_HPP_
