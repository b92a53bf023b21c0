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

#ifndef EMBIAS_CORPUS_HPP_
#define EMBIAS_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace embias {

// One sentence per entry, tokens in order.
using TokenLines = std::vector<std::vector<std::string>>;

struct CorpusManifest {
  std::vector<std::string> languages;  // sorted
  std::vector<std::string> documents;  // intersection, sorted
  std::map<std::string, std::uint64_t> token_counts;  // per language
};

// Keeps the documents present in every language. Needs >= 2 languages with
// >= 1 document each; an empty intersection is an error. The result does
// not depend on the order of `per_language`.
CorpusManifest IntersectDocuments(
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        per_language);

// Lowercases, splits punctuation off and drops it, and breaks sentences at
// sentence-final punctuation (. ! ? and the ellipsis). A '.' or ',' between
// two digits stays inside the number.
TokenLines Tokenize(std::string_view text);

// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic capitals. Other code points pass through.
std::string LowercaseUtf8(std::string_view text);

// True when the token has no letter or digit.
bool IsPunctuationToken(std::string_view token);

inline constexpr std::string_view kUnknownLemma = "<unknown>";

// One row of tagger output.
struct TokenRecord {
  std::string surface;
  std::string pos;
  std::string lemma;

  bool operator==(const TokenRecord&) const = default;
};

using TaggedSentence = std::vector<TokenRecord>;

// Reads "surface<TAB>pos<TAB>lemma" rows. Sentences end at blank lines,
// single-field markup lines such as <s> or </s>, and after records whose
// tag marks a sentence end (SENT, $., FS). Other arities are errors with
// the line number.
std::vector<TaggedSentence> ParseTaggerOutput(std::istream& in,
                                              const std::string& source = "");
std::vector<TaggedSentence> ParseTaggerOutput(const std::filesystem::path& path);

enum class MatchLevel { kLemma, kSurface };

struct ScrubRules {
  std::string language;
  std::map<std::string, std::string> replacements;  // lowercased
  MatchLevel level = MatchLevel::kLemma;

  // Keys and replacements non-empty; no replacement is itself a key.
  void Validate() const;
};

// "key<TAB>replacement" per line; '#' starts a comment line.
ScrubRules ParseScrubRules(std::string_view text, std::string language = "",
                           MatchLevel level = MatchLevel::kLemma);
ScrubRules LoadScrubRules(const std::filesystem::path& path,
                          std::string language = "",
                          MatchLevel level = MatchLevel::kLemma);

struct LemmatizeStats {
  std::uint64_t word_tokens = 0;   // records that are not punctuation
  std::uint64_t output_tokens = 0;
  std::uint64_t punctuation = 0;
  std::uint64_t unknown_lemmas = 0;
  std::uint64_t replaced = 0;
};

// Each word record becomes its lowercased lemma (or surface form when the
// lemma is unknown), then scrub rules apply. Punctuation records are
// dropped; word tokens map 1:1 onto output tokens.
TokenLines LemmatizeCorpus(const std::vector<TaggedSentence>& sentences,
                           const ScrubRules& rules,
                           LemmatizeStats* stats = nullptr);

// Writes one sentence per line, tokens separated by single spaces.
void WriteTokenLines(const TokenLines& lines, const std::filesystem::path& path);

// Tagger input: one token per line, each sentence wrapped in <s> ... </s>.
void WriteTaggerInput(const TokenLines& lines, const std::filesystem::path& path);

struct PrepareOptions {
  std::filesystem::path input_root;   // <root>/<lang>/<doc-id>.<ext>
  std::vector<std::string> languages;
  std::filesystem::path output_dir;
  bool tagger_input = false;          // also write <lang>.raw.tagger.txt
  unsigned threads = 1;
};

// Intersects document ids, tokenizes every shared document and writes
// "<lang>.raw.txt" in manifest order plus "manifest.json".
CorpusManifest PrepareCorpus(const PrepareOptions& options);

}  // namespace embias

#endif  // EMBIAS_CORPUS_HPP_
