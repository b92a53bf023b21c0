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

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "embias/corpus.hpp"
#include "embias/error.hpp"
#include "embias/json_text.hpp"
#include "test_util.hpp"

using namespace embias;
using embias::testing::TempDir;
using embias::testing::WriteFile;

namespace {

using Listing = std::vector<std::pair<std::string, std::vector<std::string>>>;

std::vector<TaggedSentence> ParseString(const std::string& text) {
  std::istringstream in(text);
  return ParseTaggerOutput(in, "fixture");
}

}  // namespace

TEST_CASE("intersect_documents") {
  auto m = IntersectDocuments({{"L1", {"d1", "d2"}}, {"L2", {"d2", "d3"}}});
  CHECK(m.documents == std::vector<std::string>{"d2"});
  CHECK(m.languages == std::vector<std::string>{"L1", "L2"});

  auto same = IntersectDocuments({{"a", {"x", "y"}}, {"b", {"y", "x"}}});
  CHECK(same.documents == std::vector<std::string>{"x", "y"});

  CHECK_THROWS_WITH_AS(IntersectDocuments({{"a", {"x"}}, {"b", {"y"}}}),
                       doctest::Contains("empty intersection"), Error);
  CHECK_THROWS_AS(IntersectDocuments({{"a", {"x"}}}), Error);
  CHECK_THROWS_AS(IntersectDocuments({{"a", {"x"}}, {"b", {}}}), Error);
}

TEST_CASE("intersection matches a set oracle and ignores language order") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    Listing listing;
    for (const char* lang : {"de", "en", "es", "nl"}) {
      std::vector<std::string> docs;
      for (int d = 0; d < 60; ++d)
        if (rng() % 4 != 0) docs.push_back("doc" + std::to_string(d));
      listing.emplace_back(lang, docs);
    }
    std::set<std::string> oracle(listing[0].second.begin(), listing[0].second.end());
    for (const auto& [lang, docs] : listing) {
      std::set<std::string> here(docs.begin(), docs.end());
      std::set<std::string> keep;
      for (const auto& d : oracle)
        if (here.count(d)) keep.insert(d);
      oracle = keep;
    }
    auto manifest = IntersectDocuments(listing);
    CHECK(manifest.documents ==
          std::vector<std::string>(oracle.begin(), oracle.end()));
    std::shuffle(listing.begin(), listing.end(), rng);
    auto shuffled = IntersectDocuments(listing);
    CHECK(shuffled.documents == manifest.documents);
    CHECK(shuffled.languages == manifest.languages);
  }
}

TEST_CASE("tokenize") {
  auto lines = Tokenize("The sun. The moon!");
  CHECK(lines == TokenLines{{"the", "sun"}, {"the", "moon"}});
  CHECK(Tokenize("").empty());
  CHECK(Tokenize("  ...  !! ").empty());
  CHECK(Tokenize("Él dijo: «¡Hola, Mundo!» ¿Qué?") ==
        TokenLines{{"él", "dijo", "hola", "mundo"}, {"qué"}});
  CHECK(Tokenize("ÄPFEL und ÖL kosten 3.50 Euro… Ende") ==
        TokenLines{{"äpfel", "und", "öl", "kosten", "3.50", "euro"}, {"ende"}});
  CHECK(Tokenize("don't stop") == TokenLines{{"don", "t", "stop"}});
  CHECK(Tokenize("line one\nline two") ==
        TokenLines{{"line", "one", "line", "two"}});
}

TEST_CASE("tokenize count on a fixture paragraph matches a hand count") {
  // Hand count: the '?' inside the quote ends a sentence, giving 9, 4, 3
  // and 4 tokens.
  const char* paragraph =
      "Yesterday, the executive left the office at 5.30 sharp. "
      "\"Where are you going?\" she asked -- quietly. "
      "Home, to the children!";
  auto lines = Tokenize(paragraph);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].size() == 9);
  CHECK(lines[1].size() == 4);
  CHECK(lines[2].size() == 3);
  CHECK(lines[3].size() == 4);
  CHECK(lines[0][7] == "5.30");
}

TEST_CASE("lowercasing covers accented capitals") {
  CHECK(LowercaseUtf8("ÀÉÎÕÜÑ Ÿ ŁĄŻ ΣΑ ДЁ") == "àéîõüñ ÿ łąż σα дё");
  CHECK(LowercaseUtf8("Straße") == "straße");
}

TEST_CASE("parse_tagger_output") {
  auto sentences = ParseString("Tische\tNN\tTisch\nxyzzy\tNN\t<unknown>\n");
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0][0] == TokenRecord{"Tische", "NN", "Tisch"});
  CHECK(sentences[0][1].lemma == kUnknownLemma);

  CHECK_THROWS_WITH_AS(ParseString("a\tDT\ta\nbad\tNN\n"),
                       doctest::Contains("line 2"), Error);
  CHECK_THROWS_WITH_AS(ParseString("a\tb\tc\td\n"),
                       doctest::Contains("found 4"), Error);
}

TEST_CASE("tagger sentence boundaries") {
  auto sentences = ParseString(
      "<s>\nShe\tPP\tshe\ngoes\tVVZ\tgo\n.\tSENT\t.\n"
      "He\tPP\the\n</s>\n\nDie\tART\tdie\nSonne\tNN\tSonne\n");
  REQUIRE(sentences.size() == 3);
  CHECK(sentences[0].size() == 3);
  CHECK(sentences[1].size() == 1);
  CHECK(sentences[2].size() == 2);
}

TEST_CASE("scrub rules parsing and validation") {
  auto rules = ParseScrubRules("# pronouns\nShe\the\n\nher\the\n", "en");
  CHECK(rules.replacements.size() == 2);
  CHECK(rules.replacements.at("she") == "he");
  CHECK_THROWS_WITH_AS(ParseScrubRules("she\the\nhe\tthey\n"),
                       doctest::Contains("rule-chain"), Error);
  CHECK_THROWS_WITH_AS(ParseScrubRules("she he\n"), doctest::Contains("line 1"),
                       Error);
  CHECK_THROWS_AS(ParseScrubRules("she\the\nshe\tit\n"), Error);
  CHECK_NOTHROW(ParseScrubRules("she\the\nshe\the\n"));
}

TEST_CASE("lemmatize with pronoun scrubbing") {
  auto rules = ParseScrubRules("she\the\n", "en");
  auto sentences = ParseString("she\tPP\tshe\ngoes\tVVZ\tgo\n");
  CHECK(LemmatizeCorpus(sentences, rules) == TokenLines{{"he", "go"}});

  auto unknown = ParseString("Xyzzy\tNN\t<unknown>\nruns\tVVZ\trun\n");
  LemmatizeStats stats;
  CHECK(LemmatizeCorpus(unknown, rules, &stats) == TokenLines{{"xyzzy", "run"}});
  CHECK(stats.unknown_lemmas == 1);

  auto ambiguous = ParseString("seinen\tPPOSAT\tsein|seine\n12\tCARD\t@card@\n");
  CHECK(LemmatizeCorpus(ambiguous, rules) == TokenLines{{"sein", "12"}});
}

TEST_CASE("surface-level matching catches forms the lemma hides") {
  auto sentences = ParseString("Her\tPP$\tshe\nbook\tNN\tbook\n");
  auto lemma_rules = ParseScrubRules("her\the\n", "en", MatchLevel::kLemma);
  // Lemma "she" is no key here, so it survives lemma matching.
  CHECK(LemmatizeCorpus(sentences, lemma_rules) == TokenLines{{"she", "book"}});
  auto surface_rules = ParseScrubRules("her\the\n", "en", MatchLevel::kSurface);
  CHECK(LemmatizeCorpus(sentences, surface_rules) == TokenLines{{"he", "book"}});
}

TEST_CASE("scrubbed corpus holds no rule key and keeps word tokens 1:1") {
  auto rules = ParseScrubRules(embias::testing::ReadFile(EMBIAS_DATA_DIR "/scrub/en.tsv"));
  const std::vector<std::string> words{"she", "he", "her", "his", "him",
                                       "herself", "hers", "house", "the",
                                       "runs", "HER", "She"};
  const std::vector<std::string> puncts{".", ",", "!", "--"};
  std::mt19937_64 rng(31);
  std::string tsv;
  std::uint64_t word_records = 0;
  for (int i = 0; i < 5000; ++i) {
    if (rng() % 7 == 0) {
      const auto& p = puncts[rng() % puncts.size()];
      tsv += p + "\t" + (p == "." ? "SENT" : "PUN") + "\t" + p + "\n";
      continue;
    }
    const auto& w = words[rng() % words.size()];
    const std::string lemma = rng() % 5 == 0 ? std::string(kUnknownLemma)
                                              : LowercaseUtf8(w);
    tsv += w + "\tXX\t" + lemma + "\n";
    ++word_records;
  }
  for (auto level : {MatchLevel::kLemma, MatchLevel::kSurface}) {
    rules.level = level;
    LemmatizeStats stats;
    auto out = LemmatizeCorpus(ParseString(tsv), rules, &stats);
    std::uint64_t tokens = 0;
    for (const auto& line : out) {
      for (const auto& t : line) {
        ++tokens;
        CHECK(rules.replacements.count(t) == 0);
      }
    }
    CHECK(tokens == word_records);
    CHECK(stats.word_tokens == word_records);
    CHECK(stats.output_tokens == word_records);
  }
}

TEST_CASE("prepare_corpus writes aligned corpora and a manifest") {
  TempDir dir;
  WriteFile(dir / "in/en/d1.txt", "The sun shines. The moon too!");
  WriteFile(dir / "in/en/d2.txt", "Only in English.");
  WriteFile(dir / "in/de/d1.txt", "Die Sonne scheint. Der Mond auch!");
  WriteFile(dir / "in/de/d3.txt", "Nur Deutsch.");
  PrepareOptions options{dir / "in", {"en", "de"}, dir / "out", true, 2};
  auto manifest = PrepareCorpus(options);
  CHECK(manifest.documents == std::vector<std::string>{"d1"});
  CHECK(manifest.token_counts.at("en") == 6);
  CHECK(embias::testing::ReadFile(dir / "out/en.raw.txt") ==
        "the sun shines\nthe moon too\n");
  CHECK(embias::testing::ReadFile(dir / "out/de.raw.txt") ==
        "die sonne scheint\nder mond auch\n");
  CHECK(embias::testing::ReadFile(dir / "out/en.raw.tagger.txt")
            .starts_with("<s>\nthe\nsun\nshines\n</s>\n"));
  auto doc = ReadJsonFile(dir / "out/manifest.json");
  CHECK(doc["documents"] == nlohmann::ordered_json::array({"d1"}));
  CHECK(doc["counts"]["de"] == 6);

  WriteFile(dir / "disjoint/en/a.txt", "x");
  WriteFile(dir / "disjoint/de/b.txt", "y");
  PrepareOptions disjoint{dir / "disjoint", {"en", "de"}, dir / "out2"};
  CHECK_THROWS_WITH_AS(PrepareCorpus(disjoint),
                       doctest::Contains("empty intersection"), Error);
}

TEST_CASE("prepare_corpus output order does not depend on worker count") {
  TempDir dir;
  for (int d = 0; d < 30; ++d) {
    for (const char* lang : {"en", "nl"}) {
      WriteFile(dir / ("in/" + std::string(lang) + "/doc" + std::to_string(d) + ".txt"),
                std::string(lang) + " document number " + std::to_string(d) + ".");
    }
  }
  PrepareOptions one{dir / "in", {"en", "nl"}, dir / "one", false, 1};
  PrepareOptions four{dir / "in", {"en", "nl"}, dir / "four", false, 4};
  PrepareCorpus(one);
  PrepareCorpus(four);
  CHECK(embias::testing::ReadFile(dir / "one/nl.raw.txt") ==
        embias::testing::ReadFile(dir / "four/nl.raw.txt"));
  CHECK(embias::testing::ReadFile(dir / "one/manifest.json") ==
        embias::testing::ReadFile(dir / "four/manifest.json"));
}
