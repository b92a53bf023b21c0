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

#include "embias/embedding_store.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "embias/error.hpp"
#include "json.hpp"

namespace embias {
namespace {

std::string LineError(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

// Splits on runs of spaces/tabs; drops a trailing CR.
std::vector<std::string_view> SplitFields(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

bool ParseSize(std::string_view text, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) ThrowData("read failure on " + path.string());
  return std::move(buffer).str();
}

EmbeddingMeta ReadMeta(const std::filesystem::path& sidecar) {
  EmbeddingMeta meta;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadFile(sidecar));
    meta.language = doc.value("language", "");
    meta.corpus_version =
        ParseCorpusVersion(doc.value("corpus_version", std::string("raw")));
    meta.seed = doc.value("seed", std::int64_t{0});
    meta.source = doc.value("source", "");
    meta.deterministic = doc.value("deterministic", true);
  } catch (const nlohmann::json::exception& e) {
    ThrowData(sidecar.string() + ": " + e.what());
  }
  return meta;
}

}  // namespace

std::string_view ToString(CorpusVersion version) {
  return version == CorpusVersion::kRaw ? "raw" : "lemmatized";
}

CorpusVersion ParseCorpusVersion(std::string_view text) {
  if (text == "raw") return CorpusVersion::kRaw;
  if (text == "lemmatized") return CorpusVersion::kLemmatized;
  ThrowData("unknown corpus version '" + std::string(text) +
            "' (expected raw or lemmatized)");
}

EmbeddingSet::EmbeddingSet(std::vector<std::string> words,
                           std::vector<float> matrix, std::size_t dim,
                           EmbeddingMeta meta)
    : words_(std::move(words)),
      matrix_(std::move(matrix)),
      dim_(dim),
      meta_(std::move(meta)) {
  if (words_.empty()) ThrowData("embedding set has an empty vocabulary");
  if (dim_ == 0) ThrowData("embedding dimension must be at least 1");
  if (matrix_.size() != words_.size() * dim_) {
    ThrowData("matrix has " + std::to_string(matrix_.size()) +
              " values, expected " + std::to_string(words_.size() * dim_));
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) ThrowData("empty word at row " + std::to_string(i));
    if (!index_.emplace(words_[i], i).second) {
      ThrowData("duplicate word '" + words_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < matrix_.size(); ++i) {
    if (!std::isfinite(matrix_[i])) {
      ThrowData("non-finite value for word '" + words_[i / dim_] + "'");
    }
  }
}

std::ptrdiff_t EmbeddingSet::IndexOf(std::string_view word) const {
  auto it = index_.find(word);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

EmbeddingSet ParseTextFormat(std::string_view text, EmbeddingMeta meta) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) ThrowData(LineError(1, "missing header"));
  auto header = SplitFields(line);
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !ParseSize(header[0], vocab_size) ||
      !ParseSize(header[1], dim) || vocab_size == 0 || dim == 0) {
    ThrowData(LineError(1, "malformed header, expected \"<vocab_size> <dim>\""));
  }

  std::vector<std::string> words;
  std::vector<float> matrix;
  words.reserve(vocab_size);
  matrix.reserve(vocab_size * dim);
  std::unordered_map<std::string_view, std::size_t> seen;

  while (next_line(line)) {
    auto fields = SplitFields(line);
    if (fields.empty()) {
      // Tolerate a trailing blank line only.
      if (pos >= text.size()) break;
      ThrowData(LineError(line_no, "blank line"));
    }
    if (words.size() == vocab_size) {
      ThrowData(LineError(line_no, "more rows than the header's " +
                                       std::to_string(vocab_size)));
    }
    if (fields.size() != dim + 1) {
      ThrowData(LineError(line_no, "row arity mismatch: expected " +
                                       std::to_string(dim) + " values, found " +
                                       std::to_string(fields.size() - 1)));
    }
    if (auto [it, fresh] = seen.emplace(fields[0], line_no); !fresh) {
      ThrowData(LineError(line_no, "duplicate word '" + std::string(fields[0]) +
                                       "' (first seen on line " +
                                       std::to_string(it->second) + ")"));
    }
    words.emplace_back(fields[0]);
    for (std::size_t j = 1; j <= dim; ++j) {
      float value = 0.0f;
      auto f = fields[j];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec == std::errc::result_out_of_range) {
        ThrowData(LineError(line_no, "non-finite value '" + std::string(f) + "'"));
      }
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        ThrowData(LineError(line_no, "not a number: '" + std::string(f) + "'"));
      }
      if (!std::isfinite(value)) {
        ThrowData(LineError(line_no, "non-finite value '" + std::string(f) + "'"));
      }
      matrix.push_back(value);
    }
  }
  if (words.size() != vocab_size) {
    ThrowData(LineError(line_no + 1, "expected " + std::to_string(vocab_size) +
                                         " rows, found " +
                                         std::to_string(words.size())));
  }
  return EmbeddingSet(std::move(words), std::move(matrix), dim, std::move(meta));
}

std::filesystem::path MetaSidecarPath(const std::filesystem::path& path) {
  auto sidecar = path;
  sidecar += ".meta.json";
  return sidecar;
}

EmbeddingSet LoadTextFormat(const std::filesystem::path& path) {
  EmbeddingMeta meta;
  auto sidecar = MetaSidecarPath(path);
  if (std::filesystem::exists(sidecar)) meta = ReadMeta(sidecar);
  try {
    return ParseTextFormat(ReadFile(path), std::move(meta));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string FormatText(const EmbeddingSet& set) {
  std::string out;
  out.reserve(set.size() * (set.dim() * 12 + 16));
  out += std::to_string(set.size());
  out += ' ';
  out += std::to_string(set.dim());
  out += '\n';
  char buf[32];
  for (std::size_t i = 0; i < set.size(); ++i) {
    out += set.words()[i];
    for (float v : set.Row(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out += ' ';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

void SaveTextFormat(const EmbeddingSet& set, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) ThrowData("cannot write " + path.string());
    out << FormatText(set);
    if (!out.flush()) ThrowData("write failure on " + path.string());
  }
  const auto& meta = set.meta();
  nlohmann::json doc = {
      {"language", meta.language},
      {"corpus_version", std::string(ToString(meta.corpus_version))},
      {"seed", meta.seed},
      {"source", meta.source},
      {"deterministic", meta.deterministic},
      {"vocab_size", set.size()},
      {"dim", set.dim()},
  };
  std::ofstream out(MetaSidecarPath(path), std::ios::binary | std::ios::trunc);
  if (!out) ThrowData("cannot write " + MetaSidecarPath(path).string());
  out << doc.dump(2) << '\n';
  if (!out.flush()) ThrowData("write failure on " + MetaSidecarPath(path).string());
}

Lookup LookupAll(const EmbeddingSet& set, std::span<const std::string> words,
                 OovPolicy policy) {
  if (words.empty()) ThrowUsage("lookup needs at least one word");
  Lookup result;
  for (const auto& word : words) {
    auto index = set.IndexOf(word);
    if (index < 0) {
      result.missing.push_back(word);
      continue;
    }
    auto row = set.Row(static_cast<std::size_t>(index));
    result.words.push_back(word);
    result.vectors.emplace_back(row.begin(), row.end());
  }
  if (policy == OovPolicy::kStrict && !result.missing.empty()) {
    std::string names;
    for (const auto& m : result.missing) {
      if (!names.empty()) names += ", ";
      names += '"' + m + '"';
    }
    ThrowData("words missing from embedding: " + names);
  }
  return result;
}

}  // namespace embias
