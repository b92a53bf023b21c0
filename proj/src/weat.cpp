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

#include "embias/weat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "embias/error.hpp"

namespace embias {
namespace {

// Two partitions whose target-sum differs by less than this (relative to
// the magnitude of the pooled associations) count as tied.
constexpr double kTieTolerance = 1e-12;

// Monte Carlo draws are grouped into fixed-size chunks with their own
// seeded stream, so the result is the same for any worker count.
constexpr std::uint64_t kChunkSize = 4096;

std::mt19937_64 ChunkStream(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk),
                    static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

// Uniform integer in [0, bound), Lemire's multiply-and-reject.
std::uint64_t Bounded(std::mt19937_64& rng, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

template <typename Fn>
void RunWorkers(unsigned threads, std::uint64_t jobs, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(
      std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(jobs, 1)));
  if (workers == 1) {
    fn(0u, workers);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers] { fn(w, workers); });
  }
}

// Lexicographic rank -> n-combination of {0..m-1}.
std::vector<std::uint32_t> Unrank(std::uint64_t rank, std::uint32_t m,
                                  std::uint32_t n) {
  std::vector<std::uint32_t> combo(n);
  std::uint32_t next = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    while (true) {
      std::uint64_t block = BinomialSaturating(m - next - 1, n - i - 1);
      if (rank < block) break;
      rank -= block;
      ++next;
    }
    combo[i] = next++;
  }
  return combo;
}

// Advances to the next combination; returns the first changed position or
// -1 after the last one.
int NextCombination(std::vector<std::uint32_t>& combo, std::uint32_t m) {
  const int n = static_cast<int>(combo.size());
  int i = n - 1;
  while (i >= 0 && combo[i] == m - n + static_cast<std::uint32_t>(i)) --i;
  if (i < 0) return -1;
  ++combo[i];
  for (int j = i + 1; j < n; ++j) combo[j] = combo[j - 1] + 1;
  return i;
}

std::uint64_t CountExact(const std::vector<double>& pooled, std::uint32_t n,
                         double threshold, std::uint64_t begin,
                         std::uint64_t end) {
  const auto m = static_cast<std::uint32_t>(pooled.size());
  auto combo = Unrank(begin, m, n);
  // prefix[i] = sum of pooled over combo[0..i), accumulated left to right.
  std::vector<double> prefix(n + 1, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + pooled[combo[i]];
  std::uint64_t count = 0;
  for (std::uint64_t rank = begin; rank < end; ++rank) {
    if (prefix[n] >= threshold) ++count;
    if (rank + 1 == end) break;
    int changed = NextCombination(combo, m);
    for (std::uint32_t i = static_cast<std::uint32_t>(changed); i < n; ++i) {
      prefix[i + 1] = prefix[i] + pooled[combo[i]];
    }
  }
  return count;
}

std::uint64_t CountMonteCarloChunk(const std::vector<double>& pooled,
                                   std::uint32_t n, double threshold,
                                   std::uint64_t seed, std::uint64_t chunk,
                                   std::uint64_t draws) {
  auto rng = ChunkStream(seed, chunk);
  const auto m = static_cast<std::uint32_t>(pooled.size());
  std::vector<std::uint32_t> order(m);
  for (std::uint32_t i = 0; i < m; ++i) order[i] = i;
  std::uint64_t count = 0;
  for (std::uint64_t d = 0; d < draws; ++d) {
    // Partial Fisher-Yates: the first n slots become a uniform n-subset.
    double sum = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      auto j = i + static_cast<std::uint32_t>(Bounded(rng, m - i));
      std::swap(order[i], order[j]);
      sum += pooled[order[i]];
    }
    if (sum >= threshold) ++count;
  }
  return count;
}

void CheckTargets(std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) ThrowData("target sets must be non-empty");
  if (nx != ny) {
    ThrowData("target sets differ in size (" + std::to_string(nx) + " vs " +
              std::to_string(ny) + "); the permutation test needs |X| = |Y|");
  }
}

}  // namespace

std::uint64_t BinomialSaturating(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(result);
}

double CosineSimilarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    ThrowUsage("cosine of vectors with dimensions " + std::to_string(u.size()) +
               " and " + std::to_string(v.size()));
  }
  const double nu = Norm(u);
  const double nv = Norm(v);
  if (nu == 0.0 || nv == 0.0) ThrowNumeric("cosine of a zero-norm vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

double DifferentialAssociation(std::span<const double> w,
                               std::span<const Vector> a,
                               std::span<const Vector> b) {
  if (a.empty() || b.empty()) ThrowUsage("attribute sets must be non-empty");
  double sum_a = 0.0;
  for (const auto& v : a) sum_a += CosineSimilarity(w, v);
  double sum_b = 0.0;
  for (const auto& v : b) sum_b += CosineSimilarity(w, v);
  return sum_a / static_cast<double>(a.size()) -
         sum_b / static_cast<double>(b.size());
}

void WeatInput::Validate() const {
  CheckTargets(x.size(), y.size());
  if (a.empty() || b.empty()) ThrowData("attribute sets must be non-empty");
  const std::size_t dim = x.front().size();
  if (dim == 0) ThrowData("vectors must have dimension >= 1");
  for (const auto* set : {&x, &y, &a, &b}) {
    for (const auto& v : *set) {
      if (v.size() != dim) ThrowUsage("vectors differ in dimension");
      if (Norm(v) == 0.0) ThrowNumeric("zero vector in WEAT input");
    }
  }
}

Associations ComputeAssociations(const WeatInput& input) {
  input.Validate();
  Associations s;
  s.x.reserve(input.x.size());
  s.y.reserve(input.y.size());
  for (const auto& w : input.x) {
    s.x.push_back(DifferentialAssociation(w, input.a, input.b));
  }
  for (const auto& w : input.y) {
    s.y.push_back(DifferentialAssociation(w, input.a, input.b));
  }
  return s;
}

double TestStatistic(const Associations& s) {
  double sum_x = 0.0;
  for (double v : s.x) sum_x += v;
  double sum_y = 0.0;
  for (double v : s.y) sum_y += v;
  return sum_x - sum_y;
}

double TestStatistic(const WeatInput& input) {
  return TestStatistic(ComputeAssociations(input));
}

double EffectSize(const Associations& s) {
  const std::size_t total = s.x.size() + s.y.size();
  if (s.x.empty() || s.y.empty() || total < 2) {
    ThrowData("effect size needs non-empty X and Y");
  }
  double sum_x = 0.0;
  for (double v : s.x) sum_x += v;
  double sum_y = 0.0;
  for (double v : s.y) sum_y += v;
  const double mean_x = sum_x / static_cast<double>(s.x.size());
  const double mean_y = sum_y / static_cast<double>(s.y.size());
  const double mean = (sum_x + sum_y) / static_cast<double>(total);
  double squares = 0.0;
  double largest = 0.0;
  for (const auto* set : {&s.x, &s.y}) {
    for (double v : *set) {
      squares += (v - mean) * (v - mean);
      largest = std::max(largest, std::abs(v));
    }
  }
  const double sd = std::sqrt(squares / static_cast<double>(total));
  if (sd <= 1e-13 * (1.0 + largest)) {
    ThrowNumeric(
        "effect size undefined: differential associations have zero "
        "standard deviation");
  }
  return (mean_x - mean_y) / sd;
}

double EffectSize(const WeatInput& input) {
  return EffectSize(ComputeAssociations(input));
}

std::string_view ToString(PermutationMethod method) {
  return method == PermutationMethod::kExact ? "exact" : "monte_carlo";
}

PermutationOutcome PermutationTest(const Associations& s,
                                   const PermutationOptions& options) {
  CheckTargets(s.x.size(), s.y.size());
  const auto n = static_cast<std::uint32_t>(s.x.size());
  std::vector<double> pooled(s.x);
  pooled.insert(pooled.end(), s.y.begin(), s.y.end());

  // S' >= S_obs  <=>  sum over X' >= sum over X, since S = 2 sum_X - total.
  double observed = 0.0;
  double magnitude = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) observed += pooled[i];
  for (double v : pooled) magnitude += std::abs(v);
  const double threshold = observed - kTieTolerance * (1.0 + magnitude);

  PermutationOutcome outcome;
  outcome.method = options.method;

  if (options.method == PermutationMethod::kExact) {
    const std::uint64_t total = BinomialSaturating(2ull * n, n);
    if (total > options.exact_cap) {
      ThrowUsage("exact permutation test needs C(" + std::to_string(2 * n) +
                 "," + std::to_string(n) + ") = " +
                 (total == std::numeric_limits<std::uint64_t>::max()
                      ? std::string("more than 2^64")
                      : std::to_string(total)) +
                 " partitions, above the cap of " +
                 std::to_string(options.exact_cap) +
                 "; use Monte Carlo sampling instead (e.g. --permutations "
                 "100000)");
    }
    std::vector<std::uint64_t> counts(std::max(options.threads, 1u), 0);
    RunWorkers(options.threads, total, [&](unsigned w, unsigned workers) {
      const std::uint64_t begin = total * w / workers;
      const std::uint64_t end = total * (w + 1) / workers;
      if (begin < end) counts[w] = CountExact(pooled, n, threshold, begin, end);
    });
    std::uint64_t hits = 0;
    for (auto c : counts) hits += c;
    outcome.n_partitions = total;
    outcome.p_value = static_cast<double>(hits) / static_cast<double>(total);
    return outcome;
  }

  if (options.samples < kMinMonteCarloSamples) {
    ThrowUsage("Monte Carlo permutation test needs at least " +
               std::to_string(kMinMonteCarloSamples) + " samples, got " +
               std::to_string(options.samples));
  }
  const std::uint64_t chunks = (options.samples + kChunkSize - 1) / kChunkSize;
  std::vector<std::uint64_t> counts(chunks, 0);
  RunWorkers(options.threads, chunks, [&](unsigned w, unsigned workers) {
    for (std::uint64_t c = w; c < chunks; c += workers) {
      const std::uint64_t draws =
          std::min(kChunkSize, options.samples - c * kChunkSize);
      counts[c] =
          CountMonteCarloChunk(pooled, n, threshold, options.seed, c, draws);
    }
  });
  std::uint64_t hits = 1;  // the observed partition
  for (auto c : counts) hits += c;
  outcome.n_partitions = options.samples + 1;
  outcome.p_value =
      static_cast<double>(hits) / static_cast<double>(outcome.n_partitions);
  return outcome;
}

PermutationOutcome PermutationTest(const WeatInput& input,
                                   const PermutationOptions& options) {
  return PermutationTest(ComputeAssociations(input), options);
}

WeatResult RunWeat(const EmbeddingSet& embeddings, const StimulusSpec& spec,
                   const WeatOptions& options) {
  spec.Validate();
  WeatResult result;
  result.spec_name = spec.name;
  result.spec_language = spec.language;
  result.labels = {spec.x.label, spec.y.label, spec.a.label, spec.b.label};
  result.embedding_meta = embeddings.meta();

  // Collect every missing word across the four sets before failing.
  Lookup sets[4];
  const WordSet* words[4] = {&spec.x, &spec.y, &spec.a, &spec.b};
  std::vector<std::string> missing;
  for (int i = 0; i < 4; ++i) {
    sets[i] = LookupAll(embeddings, words[i]->words, OovPolicy::kSkip);
    missing.insert(missing.end(), sets[i].missing.begin(),
                   sets[i].missing.end());
  }
  if (!missing.empty() && options.oov == OovPolicy::kStrict) {
    std::string names;
    for (const auto& m : missing) {
      if (!names.empty()) names += ", ";
      names += '"' + m + '"';
    }
    ThrowData("stimulus words missing from embedding: " + names);
  }
  for (int i = 0; i < 4; ++i) {
    if (sets[i].words.empty()) {
      ThrowData("no word of set '" + words[i]->label +
                "' is present in the embedding");
    }
  }
  if (sets[0].words.size() != sets[1].words.size()) {
    ThrowData("after skipping missing words, targets '" + spec.x.label +
              "' and '" + spec.y.label + "' differ in size (" +
              std::to_string(sets[0].words.size()) + " vs " +
              std::to_string(sets[1].words.size()) + ")");
  }
  result.dropped_words = std::move(missing);

  WeatInput input{std::move(sets[0].vectors), std::move(sets[1].vectors),
                  std::move(sets[2].vectors), std::move(sets[3].vectors),
                  result.labels};
  const Associations s = ComputeAssociations(input);
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    result.per_word.emplace_back(sets[0].words[i], s.x[i]);
  }
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    result.per_word.emplace_back(sets[1].words[i], s.y[i]);
  }
  result.statistic = TestStatistic(s);
  result.effect_size = EffectSize(s);
  const auto outcome = PermutationTest(s, options.permutation);
  result.p_value = outcome.p_value;
  result.method = outcome.method;
  result.n_partitions = outcome.n_partitions;
  return result;
}

AggregateResult Aggregate(std::span<const WeatResult> results) {
  if (results.empty()) ThrowData("nothing to aggregate");
  const WeatResult& first = results.front();
  AggregateResult out;
  out.spec_name = first.spec_name;
  out.spec_language = first.spec_language;
  out.labels = first.labels;
  out.language = first.embedding_meta.language;
  out.corpus_version = first.embedding_meta.corpus_version;
  double sum_s = 0.0;
  double sum_d = 0.0;
  double sum_p = 0.0;
  for (const auto& r : results) {
    if (!(r.labels == first.labels) || r.spec_name != first.spec_name) {
      ThrowData("cannot aggregate results of different comparisons ('" +
                first.spec_name + "' vs '" + r.spec_name + "')");
    }
    if (r.embedding_meta.language != out.language ||
        r.embedding_meta.corpus_version != out.corpus_version) {
      ThrowData("cannot aggregate results across embedding languages or "
                "corpus versions");
    }
    sum_s += r.statistic;
    sum_d += r.effect_size;
    sum_p += r.p_value;
  }
  const auto n = static_cast<double>(results.size());
  out.mean_statistic = sum_s / n;
  out.mean_effect_size = sum_d / n;
  out.mean_p_value = sum_p / n;
  out.n_runs = results.size();
  out.per_run.assign(results.begin(), results.end());
  return out;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson LabelsJson(const WeatLabels& l) {
  return {{"X", l.x}, {"Y", l.y}, {"A", l.a}, {"B", l.b}};
}

WeatLabels LabelsFromJson(const ojson& j) {
  return {j.at("X").get<std::string>(), j.at("Y").get<std::string>(),
          j.at("A").get<std::string>(), j.at("B").get<std::string>()};
}

PermutationMethod MethodFromString(const std::string& text) {
  if (text == "exact") return PermutationMethod::kExact;
  if (text == "monte_carlo") return PermutationMethod::kMonteCarlo;
  ThrowData("unknown permutation method '" + text + "'");
}

}  // namespace

ojson ToJson(const WeatResult& r) {
  ojson per_word = ojson::object();
  for (const auto& [word, s] : r.per_word) per_word[word] = s;
  const auto& m = r.embedding_meta;
  return {
      {"kind", "weat_result"},
      {"spec", {{"name", r.spec_name}, {"language", r.spec_language}}},
      {"labels", LabelsJson(r.labels)},
      {"statistic", r.statistic},
      {"effect_size", r.effect_size},
      {"p_value", r.p_value},
      {"method", std::string(ToString(r.method))},
      {"n_partitions_evaluated", r.n_partitions},
      {"per_word", per_word},
      {"dropped_words", r.dropped_words},
      {"embedding_meta",
       {{"language", m.language},
        {"corpus_version", std::string(ToString(m.corpus_version))},
        {"seed", m.seed},
        {"source", m.source},
        {"deterministic", m.deterministic},
        {"path", r.embedding_path}}},
  };
}

WeatResult WeatResultFromJson(const ojson& j) {
  try {
    WeatResult r;
    r.spec_name = j.at("spec").at("name").get<std::string>();
    r.spec_language = j.at("spec").at("language").get<std::string>();
    r.labels = LabelsFromJson(j.at("labels"));
    r.statistic = j.at("statistic").get<double>();
    r.effect_size = j.at("effect_size").get<double>();
    r.p_value = j.at("p_value").get<double>();
    r.method = MethodFromString(j.at("method").get<std::string>());
    r.n_partitions = j.at("n_partitions_evaluated").get<std::uint64_t>();
    for (const auto& [word, s] : j.at("per_word").items()) {
      r.per_word.emplace_back(word, s.get<double>());
    }
    r.dropped_words =
        j.value("dropped_words", std::vector<std::string>{});
    const auto& m = j.at("embedding_meta");
    r.embedding_meta.language = m.value("language", "");
    r.embedding_meta.corpus_version =
        ParseCorpusVersion(m.value("corpus_version", std::string("raw")));
    r.embedding_meta.seed = m.value("seed", std::int64_t{0});
    r.embedding_meta.source = m.value("source", "");
    r.embedding_meta.deterministic = m.value("deterministic", true);
    r.embedding_path = m.value("path", "");
    return r;
  } catch (const ojson::exception& e) {
    ThrowData(std::string("malformed WEAT result JSON: ") + e.what());
  }
}

ojson ToJson(const AggregateResult& a) {
  ojson runs = ojson::array();
  for (const auto& r : a.per_run) runs.push_back(ToJson(r));
  return {
      {"kind", "weat_aggregate"},
      {"spec", {{"name", a.spec_name}, {"language", a.spec_language}}},
      {"labels", LabelsJson(a.labels)},
      {"language", a.language},
      {"corpus_version", std::string(ToString(a.corpus_version))},
      {"mean_statistic", a.mean_statistic},
      {"mean_effect_size", a.mean_effect_size},
      {"mean_p_value", a.mean_p_value},
      {"n_runs", a.n_runs},
      {"per_run", runs},
  };
}

AggregateResult AggregateFromJson(const ojson& j) {
  try {
    if (j.value("kind", "") != "weat_aggregate") {
      ThrowData("not an aggregate result (\"kind\" is not \"weat_aggregate\")");
    }
    AggregateResult a;
    a.spec_name = j.at("spec").at("name").get<std::string>();
    a.spec_language = j.at("spec").at("language").get<std::string>();
    a.labels = LabelsFromJson(j.at("labels"));
    a.language = j.at("language").get<std::string>();
    a.corpus_version =
        ParseCorpusVersion(j.at("corpus_version").get<std::string>());
    a.mean_statistic = j.at("mean_statistic").get<double>();
    a.mean_effect_size = j.at("mean_effect_size").get<double>();
    a.mean_p_value = j.at("mean_p_value").get<double>();
    a.n_runs = j.at("n_runs").get<std::size_t>();
    if (a.n_runs < 1) ThrowData("aggregate with n_runs < 1");
    for (const auto& r : j.value("per_run", ojson::array())) {
      a.per_run.push_back(WeatResultFromJson(r));
    }
    return a;
  } catch (const ojson::exception& e) {
    ThrowData(std::string("malformed aggregate JSON: ") + e.what());
  }
}

}  // namespace embias
