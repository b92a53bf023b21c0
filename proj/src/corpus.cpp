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

#include "embias/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <thread>

#include "embias/error.hpp"
#include "embias/json_text.hpp"

namespace embias {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
  bool valid;
};

CodePoint Decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1, true};
  std::size_t length = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    length = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    length = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    length = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1, false};
  }
  if (i + length > s.size()) return {0xFFFD, 1, false};
  for (std::size_t k = 1; k < length; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, length, true};
}

void Encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

char32_t ToLower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 32;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130) return 'i';
    if (c == 0x178) return 0xFF;
    if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) {
      return (c % 2 == 1) ? c + 1 : c;
    }
    if (c == 0x131 || c == 0x138 || c == 0x149 || c == 0x17F) return c;
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

bool IsSpace(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == 0xA0 || (c >= 0x2000 && c <= 0x200B) ||
         c == 0x202F || c == 0x205F || c == 0x3000 || c == 0xFEFF;
}

bool IsPunct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E) || c < 0x20 ||
           c == 0x7F;
  }
  if (c >= 0xA1 && c <= 0xBF) {
    // Ordinal indicators, micro sign and superscript digits are word chars.
    return c != 0xAA && c != 0xB5 && c != 0xBA && c != 0xB2 && c != 0xB3 &&
           c != 0xB9 && c != 0xBC && c != 0xBD && c != 0xBE;
  }
  if (c == 0xD7 || c == 0xF7) return true;
  return (c >= 0x2010 && c <= 0x205E) || (c >= 0x3001 && c <= 0x303F) ||
         (c >= 0xFF01 && c <= 0xFF0F) || c == 0xFF1F;
}

bool IsSentenceFinal(char32_t c) {
  return c == '.' || c == '!' || c == '?' || c == 0x2026 || c == 0x203C ||
         c == 0x2047 || c == 0x2048 || c == 0x2049 || c == 0x3002 ||
         c == 0xFF01 || c == 0xFF1F;
}

bool IsDigit(char32_t c) { return c >= '0' && c <= '9'; }

bool IsSentenceTag(std::string_view pos) {
  return pos == "SENT" || pos == "$." || pos == "FS";
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

// Ambiguous lemmas ("a|b") keep the first reading; number placeholders
// count as unknown.
std::string_view ChooseLemma(std::string_view lemma) {
  if (auto bar = lemma.find('|'); bar != std::string_view::npos && bar > 0) {
    lemma = lemma.substr(0, bar);
  }
  return lemma;
}

bool IsUnknownLemma(std::string_view lemma) {
  return lemma.empty() || lemma == kUnknownLemma || lemma == "@card@" ||
         lemma == "@ord@";
}

}  // namespace

std::string LowercaseUtf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    auto cp = Decode(text, i);
    if (cp.valid) {
      Encode(ToLower(cp.value), out);
    } else {
      out += text[i];
    }
    i += cp.length;
  }
  return out;
}

bool IsPunctuationToken(std::string_view token) {
  for (std::size_t i = 0; i < token.size();) {
    auto cp = Decode(token, i);
    if (!cp.valid || (!IsPunct(cp.value) && !IsSpace(cp.value))) return false;
    i += cp.length;
  }
  return true;
}

TokenLines Tokenize(std::string_view text) {
  TokenLines lines;
  std::vector<std::string> sentence;
  std::string token;
  auto flush_token = [&] {
    if (!token.empty()) sentence.push_back(std::move(token));
    token.clear();
  };
  auto flush_sentence = [&] {
    flush_token();
    if (!sentence.empty()) lines.push_back(std::move(sentence));
    sentence.clear();
  };

  for (std::size_t i = 0; i < text.size();) {
    auto cp = Decode(text, i);
    const char32_t c = cp.value;
    if (!cp.valid) {
      token += text[i];
    } else if (IsSpace(c)) {
      flush_token();
    } else if (IsPunct(c)) {
      const bool in_number = (c == '.' || c == ',') && !token.empty() &&
                             IsDigit(static_cast<unsigned char>(token.back())) &&
                             i + 1 < text.size() &&
                             IsDigit(static_cast<unsigned char>(text[i + 1]));
      if (in_number) {
        token += static_cast<char>(c);
      } else if (IsSentenceFinal(c)) {
        flush_sentence();
      } else {
        flush_token();
      }
    } else {
      Encode(ToLower(c), token);
    }
    i += cp.length;
  }
  flush_sentence();
  return lines;
}

CorpusManifest IntersectDocuments(
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        per_language) {
  if (per_language.size() < 2) {
    ThrowData("document intersection needs at least two languages");
  }
  CorpusManifest manifest;
  std::set<std::string> languages;
  std::set<std::string> common;
  bool first = true;
  for (const auto& [language, documents] : per_language) {
    if (!languages.insert(language).second) {
      ThrowData("language '" + language + "' listed twice");
    }
    if (documents.empty()) {
      ThrowData("language '" + language + "' has no documents");
    }
    std::set<std::string> ids(documents.begin(), documents.end());
    if (first) {
      common = std::move(ids);
      first = false;
      continue;
    }
    std::set<std::string> kept;
    std::set_intersection(common.begin(), common.end(), ids.begin(), ids.end(),
                          std::inserter(kept, kept.end()));
    common = std::move(kept);
  }
  if (common.empty()) {
    ThrowData("empty intersection: no document is present in every language");
  }
  manifest.languages.assign(languages.begin(), languages.end());
  manifest.documents.assign(common.begin(), common.end());
  return manifest;
}

std::vector<TaggedSentence> ParseTaggerOutput(std::istream& in,
                                              const std::string& source) {
  std::vector<TaggedSentence> sentences;
  TaggedSentence current;
  auto close = [&] {
    if (!current.empty()) sentences.push_back(std::move(current));
    current.clear();
  };
  const std::string where = source.empty() ? "tagger output" : source;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      close();
      continue;
    }
    auto fields = SplitTabs(line);
    if (fields.size() == 1 && line.front() == '<' && line.back() == '>') {
      close();  // markup such as <s>, </s>, <doc id=...>
      continue;
    }
    if (fields.size() != 3) {
      ThrowData(where + ": line " + std::to_string(line_no) +
                ": expected 3 tab-separated columns, found " +
                std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      ThrowData(where + ": line " + std::to_string(line_no) + ": empty token");
    }
    current.push_back({std::string(fields[0]), std::string(fields[1]),
                       std::string(fields[2])});
    if (IsSentenceTag(fields[1])) close();
  }
  if (in.bad()) ThrowData(where + ": read failure");
  close();
  return sentences;
}

std::vector<TaggedSentence> ParseTaggerOutput(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot open " + path.string());
  return ParseTaggerOutput(in, path.string());
}

void ScrubRules::Validate() const {
  for (const auto& [key, replacement] : replacements) {
    if (key.empty() || replacement.empty()) {
      ThrowData("scrub rule with an empty key or replacement");
    }
    if (replacements.count(replacement)) {
      ThrowData("rule-chain violation: '" + key + "' -> '" + replacement +
                "', but '" + replacement + "' is itself a rule key");
    }
  }
}

ScrubRules ParseScrubRules(std::string_view text, std::string language,
                           MatchLevel level) {
  ScrubRules rules{std::move(language), {}, level};
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    auto fields = SplitTabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      ThrowData("rule file line " + std::to_string(line_no) +
                ": expected \"key<TAB>replacement\"");
    }
    auto key = LowercaseUtf8(fields[0]);
    auto replacement = LowercaseUtf8(fields[1]);
    auto [it, fresh] = rules.replacements.emplace(key, replacement);
    if (!fresh && it->second != replacement) {
      ThrowData("rule file line " + std::to_string(line_no) + ": key '" + key +
                "' already maps to '" + it->second + "'");
    }
  }
  rules.Validate();
  return rules;
}

ScrubRules LoadScrubRules(const std::filesystem::path& path,
                          std::string language, MatchLevel level) {
  try {
    return ParseScrubRules(ReadText(path), std::move(language), level);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

TokenLines LemmatizeCorpus(const std::vector<TaggedSentence>& sentences,
                           const ScrubRules& rules, LemmatizeStats* stats) {
  rules.Validate();
  LemmatizeStats local;
  TokenLines out;
  for (const auto& sentence : sentences) {
    std::vector<std::string> line;
    for (const auto& record : sentence) {
      if (IsPunctuationToken(record.surface)) {
        ++local.punctuation;
        continue;
      }
      ++local.word_tokens;
      const std::string surface = LowercaseUtf8(record.surface);
      const auto lemma = ChooseLemma(record.lemma);
      std::string form;
      if (IsUnknownLemma(lemma)) {
        ++local.unknown_lemmas;
        form = surface;
      } else {
        form = LowercaseUtf8(lemma);
      }
      bool replaced = false;
      if (rules.level == MatchLevel::kSurface) {
        if (auto it = rules.replacements.find(surface);
            it != rules.replacements.end()) {
          form = it->second;
          replaced = true;
        }
      }
      // Applied to the final form in both modes, so no key survives.
      if (auto it = rules.replacements.find(form); it != rules.replacements.end()) {
        form = it->second;
        replaced = true;
      }
      local.replaced += replaced;
      line.push_back(std::move(form));
    }
    local.output_tokens += line.size();
    if (!line.empty()) out.push_back(std::move(line));
  }
  if (stats) *stats = local;
  return out;
}

void WriteTokenLines(const TokenLines& lines, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowData("cannot write " + path.string());
  for (const auto& line : lines) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out << ' ';
      out << line[i];
    }
    out << '\n';
  }
  if (!out.flush()) ThrowData("write failure on " + path.string());
}

void WriteTaggerInput(const TokenLines& lines, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowData("cannot write " + path.string());
  for (const auto& line : lines) {
    out << "<s>\n";
    for (const auto& token : line) out << token << '\n';
    out << "</s>\n";
  }
  if (!out.flush()) ThrowData("write failure on " + path.string());
}

CorpusManifest PrepareCorpus(const PrepareOptions& options) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::string, std::vector<std::string>>> listing;
  // doc id -> file, per language
  std::map<std::string, std::map<std::string, fs::path>> files;
  for (const auto& language : options.languages) {
    const fs::path dir = options.input_root / language;
    if (!fs::is_directory(dir)) {
      ThrowData("no document directory for language '" + language + "' (" +
                dir.string() + ")");
    }
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string id = entry.path().stem().string();
      if (!files[language].emplace(id, entry.path()).second) {
        ThrowData("duplicate document id '" + id + "' in " + dir.string());
      }
      ids.push_back(id);
    }
    listing.emplace_back(language, std::move(ids));
  }
  CorpusManifest manifest = IntersectDocuments(listing);
  fs::create_directories(options.output_dir);

  const std::size_t n_docs = manifest.documents.size();
  for (const auto& language : manifest.languages) {
    const auto& doc_files = files.at(language);
    std::vector<TokenLines> per_doc(n_docs);
    std::vector<std::string> errors(n_docs);
    const unsigned workers = std::max(
        1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_docs)));
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t d = w; d < n_docs; d += workers) {
            try {
              per_doc[d] = Tokenize(
                  ReadText(doc_files.at(manifest.documents[d])));
            } catch (const std::exception& e) {
              errors[d] = e.what();
            }
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) ThrowData(e);
    }
    TokenLines all;
    std::uint64_t tokens = 0;
    for (auto& doc : per_doc) {
      for (auto& line : doc) {
        tokens += line.size();
        all.push_back(std::move(line));
      }
    }
    manifest.token_counts[language] = tokens;
    WriteTokenLines(all, options.output_dir / (language + ".raw.txt"));
    if (options.tagger_input) {
      WriteTaggerInput(all, options.output_dir / (language + ".raw.tagger.txt"));
    }
  }

  nlohmann::ordered_json doc;
  doc["languages"] = manifest.languages;
  doc["documents"] = manifest.documents;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [language, n] : manifest.token_counts) counts[language] = n;
  doc["counts"] = counts;
  WriteJsonFile(doc, options.output_dir / "manifest.json");
  return manifest;
}

}  // namespace embias
