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

#ifndef EMBIAS_EMBEDDING_STORE_HPP_
#define EMBIAS_EMBEDDING_STORE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace embias {

enum class CorpusVersion { kRaw, kLemmatized };

std::string_view ToString(CorpusVersion version);
// Throws kData on anything other than "raw" or "lemmatized".
CorpusVersion ParseCorpusVersion(std::string_view text);

struct EmbeddingMeta {
  std::string language;  // ISO code, may be empty when unknown
  CorpusVersion corpus_version = CorpusVersion::kRaw;
  std::int64_t seed = 0;
  std::string source;
  bool deterministic = true;

  bool operator==(const EmbeddingMeta&) const = default;
};

// Immutable word -> vector table. Rows are stored in vocabulary order at
// single precision; callers that do arithmetic convert to double.
class EmbeddingSet {
 public:
  // Validates: at least one word, no duplicates, dim >= 1,
  // matrix.size() == words.size() * dim, all values finite.
  EmbeddingSet(std::vector<std::string> words, std::vector<float> matrix,
               std::size_t dim, EmbeddingMeta meta = {});

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const EmbeddingMeta& meta() const noexcept { return meta_; }
  const std::vector<std::string>& words() const noexcept { return words_; }

  // Row index of `word`, or -1.
  std::ptrdiff_t IndexOf(std::string_view word) const;
  bool Contains(std::string_view word) const { return IndexOf(word) >= 0; }

  std::span<const float> Row(std::size_t index) const {
    return {matrix_.data() + index * dim_, dim_};
  }
  std::span<const float> matrix() const noexcept { return matrix_; }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> words_;
  std::vector<float> matrix_;
  std::size_t dim_;
  EmbeddingMeta meta_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>>
      index_;
};

// Text interchange format: "<vocab_size> <dim>" header, then one
// "<word> <v1> ... <vdim>" line per word. Errors carry the 1-based line
// number. Provenance metadata lives in an optional JSON sidecar
// ("<path>.meta.json"); it is read here when present.
EmbeddingSet LoadTextFormat(const std::filesystem::path& path);
EmbeddingSet ParseTextFormat(std::string_view text, EmbeddingMeta meta = {});

// Writes the text format plus the metadata sidecar. Values are printed in
// the shortest form that reads back to the same float.
void SaveTextFormat(const EmbeddingSet& set, const std::filesystem::path& path);
std::string FormatText(const EmbeddingSet& set);

std::filesystem::path MetaSidecarPath(const std::filesystem::path& path);

enum class OovPolicy { kStrict, kSkip };

struct Lookup {
  std::vector<std::string> words;             // present words, query order
  std::vector<std::vector<double>> vectors;   // parallel to `words`
  std::vector<std::string> missing;           // query order
};

// Strict: throws kData listing every missing word. Skip: returns what was
// found and reports the rest in `missing`.
Lookup LookupAll(const EmbeddingSet& set, std::span<const std::string> words,
                 OovPolicy policy);

}  // namespace embias

#endif  // EMBIAS_EMBEDDING_STORE_HPP_
