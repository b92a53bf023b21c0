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

#ifndef EMBIAS_WEAT_HPP_
#define EMBIAS_WEAT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "embias/embedding_store.hpp"
#include "embias/json_text.hpp"
#include "embias/stimuli.hpp"

namespace embias {

using Vector = std::vector<double>;

// (u.v) / (|u||v|). Throws kNumeric on a zero vector, kUsage on a
// dimension mismatch.
double CosineSimilarity(std::span<const double> u, std::span<const double> v);

// s(w, A, B): mean cosine of w to A minus mean cosine of w to B.
double DifferentialAssociation(std::span<const double> w,
                               std::span<const Vector> a,
                               std::span<const Vector> b);

struct WeatLabels {
  std::string x = "X";
  std::string y = "Y";
  std::string a = "A";
  std::string b = "B";

  bool operator==(const WeatLabels&) const = default;
};

struct WeatInput {
  std::vector<Vector> x;
  std::vector<Vector> y;
  std::vector<Vector> a;
  std::vector<Vector> b;
  WeatLabels labels;

  // |X| == |Y| >= 1, |A|, |B| >= 1, equal dimensions, no zero vectors.
  void Validate() const;
};

// s(w, A, B) for each target word, X first then Y.
struct Associations {
  std::vector<double> x;
  std::vector<double> y;
};
Associations ComputeAssociations(const WeatInput& input);

// S = sum over X of s minus sum over Y of s.
double TestStatistic(const WeatInput& input);
double TestStatistic(const Associations& s);

// d = (mean_X s - mean_Y s) / population stddev of s over X u Y.
// Throws kNumeric when the deviation is zero.
double EffectSize(const WeatInput& input);
double EffectSize(const Associations& s);

enum class PermutationMethod { kExact, kMonteCarlo };
std::string_view ToString(PermutationMethod method);

inline constexpr std::uint64_t kDefaultExactCap = 200'000;
inline constexpr std::uint64_t kMinMonteCarloSamples = 100;

struct PermutationOptions {
  PermutationMethod method = PermutationMethod::kExact;
  std::uint64_t samples = 0;  // Monte Carlo draws, excluding the observed one
  std::uint64_t seed = 0;
  std::uint64_t exact_cap = kDefaultExactCap;
  unsigned threads = 1;
};

struct PermutationOutcome {
  double p_value = 1.0;
  std::uint64_t n_partitions = 0;
  PermutationMethod method = PermutationMethod::kExact;
};

// One-sided p = #{partitions with S' >= S_obs} / #partitions, the observed
// partition included. Exact mode walks all C(2n, n) equal-size splits of
// X u Y; Monte Carlo draws `samples` uniform splits on top of the observed
// one. Results do not depend on `threads`.
PermutationOutcome PermutationTest(const Associations& s,
                                   const PermutationOptions& options);
PermutationOutcome PermutationTest(const WeatInput& input,
                                   const PermutationOptions& options);

// C(n, k), saturating at UINT64_MAX.
std::uint64_t BinomialSaturating(std::uint64_t n, std::uint64_t k);

struct WeatResult {
  std::string spec_name;
  std::string spec_language;
  WeatLabels labels;
  double statistic = 0.0;
  double effect_size = 0.0;
  double p_value = 1.0;
  PermutationMethod method = PermutationMethod::kExact;
  std::uint64_t n_partitions = 0;
  std::vector<std::pair<std::string, double>> per_word;  // X words, then Y
  std::vector<std::string> dropped_words;  // skip-OOV policy only
  EmbeddingMeta embedding_meta;
  std::string embedding_path;
};

struct WeatOptions {
  PermutationOptions permutation;
  OovPolicy oov = OovPolicy::kStrict;
};

// Resolves the spec's words against the embedding and runs the full test.
// Under the skip policy X and Y must lose the same number of words, since
// the permutation test needs equal-size targets.
WeatResult RunWeat(const EmbeddingSet& embeddings, const StimulusSpec& spec,
                   const WeatOptions& options);

struct AggregateResult {
  std::string spec_name;
  std::string spec_language;
  WeatLabels labels;
  std::string language;  // from embedding metadata
  CorpusVersion corpus_version = CorpusVersion::kRaw;
  double mean_statistic = 0.0;
  double mean_effect_size = 0.0;
  double mean_p_value = 0.0;
  std::size_t n_runs = 0;
  std::vector<WeatResult> per_run;
};

// Arithmetic means over runs. All runs must share spec, labels, embedding
// language and corpus version.
AggregateResult Aggregate(std::span<const WeatResult> results);

nlohmann::ordered_json ToJson(const WeatResult& result);
nlohmann::ordered_json ToJson(const AggregateResult& aggregate);
WeatResult WeatResultFromJson(const nlohmann::ordered_json& doc);
AggregateResult AggregateFromJson(const nlohmann::ordered_json& doc);

}  // namespace embias

#endif  // EMBIAS_WEAT_HPP_
