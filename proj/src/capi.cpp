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

#include "embias/embias.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "embias/cbow.hpp"
#include "embias/corpus.hpp"
#include "embias/embedding_store.hpp"
#include "embias/error.hpp"
#include "embias/json_text.hpp"
#include "embias/report.hpp"
#include "embias/stimuli.hpp"
#include "embias/weat.hpp"

struct embias_embedding {
  embias::EmbeddingSet set;
  std::string version;
};
struct embias_stimuli {
  embias::Expansion expansion;
};
struct embias_weat_result {
  embias::WeatResult result;
};
struct embias_aggregate {
  embias::AggregateResult aggregate;
};

namespace {

thread_local std::string g_last_error;

embias_status Fail(embias_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
embias_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return EMBIAS_OK;
  } catch (const embias::Error& e) {
    return Fail(static_cast<embias_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(EMBIAS_E_DATA, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return Fail(EMBIAS_E_DATA, e.what());
  } catch (const std::exception& e) {
    return Fail(EMBIAS_E_DATA, std::string("unexpected error: ") + e.what());
  }
}

void Require(const void* pointer, const char* name) {
  if (pointer == nullptr) embias::ThrowUsage(std::string(name) + " is null");
}

char* CopyString(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

embias::TrainingConfig ToCore(const embias_training_config& c) {
  embias::TrainingConfig config;
  config.dim = c.dim;
  config.window = c.window;
  config.negatives = c.negatives;
  config.epochs = c.epochs;
  config.lr_initial = c.lr_initial;
  config.lr_min = c.lr_min;
  config.min_count = c.min_count;
  config.subsample_t = c.subsample_t;
  config.seed = c.seed;
  return config;
}

embias_training_config FromCore(const embias::TrainingConfig& config) {
  return {config.dim,        config.window,  config.negatives,
          config.epochs,     config.lr_initial, config.lr_min,
          config.min_count,  config.subsample_t, config.seed};
}

}  // namespace

extern "C" {

const char* embias_version(void) { return EMBIAS_VERSION; }

const char* embias_last_error(void) { return g_last_error.c_str(); }

void embias_string_free(char* text) { std::free(text); }

embias_status embias_embedding_load(const char* path, embias_embedding** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = nullptr;
    auto set = embias::LoadTextFormat(path);
    std::string version(embias::ToString(set.meta().corpus_version));
    *out = new embias_embedding{std::move(set), std::move(version)};
  });
}

void embias_embedding_free(embias_embedding* embedding) { delete embedding; }

size_t embias_embedding_size(const embias_embedding* embedding) {
  return embedding ? embedding->set.size() : 0;
}

size_t embias_embedding_dim(const embias_embedding* embedding) {
  return embedding ? embedding->set.dim() : 0;
}

const char* embias_embedding_language(const embias_embedding* embedding) {
  return embedding ? embedding->set.meta().language.c_str() : "";
}

const char* embias_embedding_corpus_version(const embias_embedding* embedding) {
  return embedding ? embedding->version.c_str() : "";
}

int64_t embias_embedding_seed(const embias_embedding* embedding) {
  return embedding ? embedding->set.meta().seed : 0;
}

embias_status embias_embedding_vector(const embias_embedding* embedding,
                                      const char* word, float* out) {
  return Guard([&] {
    Require(embedding, "embedding");
    Require(word, "word");
    Require(out, "out");
    const auto index = embedding->set.IndexOf(word);
    if (index < 0) embias::ThrowData(std::string("word not in embedding: '") + word + "'");
    auto row = embedding->set.Row(static_cast<std::size_t>(index));
    std::memcpy(out, row.data(), row.size() * sizeof(float));
  });
}

embias_status embias_stimuli_load(const char* path, embias_stimuli** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = nullptr;
    *out = new embias_stimuli{embias::ToSpecs(embias::LoadStimuli(path))};
  });
}

void embias_stimuli_free(embias_stimuli* stimuli) { delete stimuli; }

size_t embias_stimuli_count(const embias_stimuli* stimuli) {
  return stimuli ? stimuli->expansion.specs.size() : 0;
}

const char* embias_stimuli_name(const embias_stimuli* stimuli, size_t index) {
  if (!stimuli || index >= stimuli->expansion.specs.size()) return nullptr;
  return stimuli->expansion.specs[index].name.c_str();
}

const char* embias_stimuli_language(const embias_stimuli* stimuli, size_t index) {
  if (!stimuli || index >= stimuli->expansion.specs.size()) return nullptr;
  return stimuli->expansion.specs[index].language.c_str();
}

size_t embias_stimuli_notice_count(const embias_stimuli* stimuli) {
  return stimuli ? stimuli->expansion.notices.size() : 0;
}

const char* embias_stimuli_notice(const embias_stimuli* stimuli, size_t index) {
  if (!stimuli || index >= stimuli->expansion.notices.size()) return nullptr;
  return stimuli->expansion.notices[index].c_str();
}

embias_weat_options embias_weat_options_default(void) {
  return {EMBIAS_PERMUTATION_EXACT, 0, 0, embias::kDefaultExactCap, 1, 0};
}

embias_status embias_weat_run(const embias_embedding* embedding,
                              const char* embedding_path,
                              const embias_stimuli* stimuli, size_t spec_index,
                              const embias_weat_options* options,
                              embias_weat_result** out) {
  return Guard([&] {
    Require(embedding, "embedding");
    Require(stimuli, "stimuli");
    Require(out, "out");
    *out = nullptr;
    if (spec_index >= stimuli->expansion.specs.size()) {
      embias::ThrowUsage("spec index " + std::to_string(spec_index) +
                         " out of range");
    }
    const embias_weat_options opts =
        options ? *options : embias_weat_options_default();
    embias::WeatOptions core;
    switch (opts.method) {
      case EMBIAS_PERMUTATION_EXACT:
        core.permutation.method = embias::PermutationMethod::kExact;
        break;
      case EMBIAS_PERMUTATION_MONTE_CARLO:
        core.permutation.method = embias::PermutationMethod::kMonteCarlo;
        break;
      default:
        embias::ThrowUsage("unknown permutation method");
    }
    core.permutation.samples = opts.samples;
    core.permutation.seed = opts.seed;
    core.permutation.exact_cap = opts.exact_cap;
    core.permutation.threads = opts.threads == 0 ? 1 : opts.threads;
    core.oov = opts.skip_oov ? embias::OovPolicy::kSkip : embias::OovPolicy::kStrict;
    const std::string path = embedding_path ? embedding_path : "";
    try {
      auto result = embias::RunWeat(embedding->set,
                                    stimuli->expansion.specs[spec_index], core);
      result.embedding_path = path;
      *out = new embias_weat_result{std::move(result)};
    } catch (const embias::Error& e) {
      if (path.empty()) throw;
      throw embias::Error(e.code(), path + ": " + e.what());
    }
  });
}

void embias_weat_result_free(embias_weat_result* result) { delete result; }

double embias_weat_result_statistic(const embias_weat_result* result) {
  return result ? result->result.statistic : 0.0;
}

double embias_weat_result_effect_size(const embias_weat_result* result) {
  return result ? result->result.effect_size : 0.0;
}

double embias_weat_result_p_value(const embias_weat_result* result) {
  return result ? result->result.p_value : 1.0;
}

uint64_t embias_weat_result_partitions(const embias_weat_result* result) {
  return result ? result->result.n_partitions : 0;
}

size_t embias_weat_result_dropped_count(const embias_weat_result* result) {
  return result ? result->result.dropped_words.size() : 0;
}

const char* embias_weat_result_dropped(const embias_weat_result* result,
                                       size_t index) {
  if (!result || index >= result->result.dropped_words.size()) return nullptr;
  return result->result.dropped_words[index].c_str();
}

embias_status embias_weat_result_to_json(const embias_weat_result* result,
                                         char** out) {
  return Guard([&] {
    Require(result, "result");
    Require(out, "out");
    *out = CopyString(embias::DumpJson(embias::ToJson(result->result)));
  });
}

embias_status embias_weat_result_save(const embias_weat_result* result,
                                      const char* path) {
  return Guard([&] {
    Require(result, "result");
    Require(path, "path");
    embias::WriteJsonFile(embias::ToJson(result->result), path);
  });
}

embias_status embias_weat_result_load(const char* path, embias_weat_result** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = nullptr;
    *out = new embias_weat_result{embias::WeatResultFromJson(embias::ReadJsonFile(path))};
  });
}

embias_status embias_aggregate_create(const embias_weat_result* const* results,
                                      size_t count, embias_aggregate** out) {
  return Guard([&] {
    Require(out, "out");
    *out = nullptr;
    if (count > 0) Require(results, "results");
    std::vector<embias::WeatResult> runs;
    runs.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      Require(results[i], "result");
      runs.push_back(results[i]->result);
    }
    *out = new embias_aggregate{embias::Aggregate(runs)};
  });
}

void embias_aggregate_free(embias_aggregate* aggregate) { delete aggregate; }

double embias_aggregate_mean_statistic(const embias_aggregate* aggregate) {
  return aggregate ? aggregate->aggregate.mean_statistic : 0.0;
}

double embias_aggregate_mean_effect_size(const embias_aggregate* aggregate) {
  return aggregate ? aggregate->aggregate.mean_effect_size : 0.0;
}

double embias_aggregate_mean_p_value(const embias_aggregate* aggregate) {
  return aggregate ? aggregate->aggregate.mean_p_value : 1.0;
}

size_t embias_aggregate_runs(const embias_aggregate* aggregate) {
  return aggregate ? aggregate->aggregate.n_runs : 0;
}

embias_status embias_aggregate_to_json(const embias_aggregate* aggregate,
                                       char** out) {
  return Guard([&] {
    Require(aggregate, "aggregate");
    Require(out, "out");
    *out = CopyString(embias::DumpJson(embias::ToJson(aggregate->aggregate)));
  });
}

embias_status embias_aggregate_save(const embias_aggregate* aggregate,
                                    const char* path) {
  return Guard([&] {
    Require(aggregate, "aggregate");
    Require(path, "path");
    embias::WriteJsonFile(embias::ToJson(aggregate->aggregate), path);
  });
}

embias_status embias_aggregate_load(const char* path, embias_aggregate** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = nullptr;
    try {
      *out = new embias_aggregate{
          embias::AggregateFromJson(embias::ReadJsonFile(path))};
    } catch (const embias::Error& e) {
      throw embias::Error(e.code(), std::string(path) + ": " + e.what());
    }
  });
}

embias_status embias_report_write(const embias_aggregate* const* aggregates,
                                  size_t count, const char* config_json,
                                  const char* title, const char* output_dir) {
  return Guard([&] {
    Require(output_dir, "output_dir");
    if (count > 0) Require(aggregates, "aggregates");
    std::vector<embias::AggregateResult> rows;
    rows.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      Require(aggregates[i], "aggregate");
      rows.push_back(aggregates[i]->aggregate);
    }
    auto config = nlohmann::ordered_json::object();
    if (config_json != nullptr && *config_json != '\0') {
      try {
        config = nlohmann::ordered_json::parse(config_json);
      } catch (const nlohmann::json::exception& e) {
        embias::ThrowUsage(std::string("config echo is not valid JSON: ") + e.what());
      }
    }
    auto report = embias::BuildReport(rows, std::move(config));
    embias::WriteReport(report, output_dir, title ? title : "");
  });
}

embias_training_config embias_training_config_default(void) {
  return FromCore(embias::TrainingConfig{});
}

embias_status embias_training_config_load(const char* path,
                                          embias_training_config* config) {
  return Guard([&] {
    Require(path, "path");
    Require(config, "config");
    *config = FromCore(embias::LoadTrainingConfig(path, ToCore(*config)));
  });
}

embias_status embias_train(const char* corpus_path,
                           const embias_training_config* config,
                           const char* language, const char* corpus_version,
                           const char* output_path,
                           embias_epoch_callback on_epoch, void* user_data) {
  return Guard([&] {
    Require(corpus_path, "corpus_path");
    Require(config, "config");
    Require(output_path, "output_path");
    embias::EmbeddingMeta meta;
    meta.language = language ? language : "";
    meta.corpus_version = embias::ParseCorpusVersion(
        corpus_version ? corpus_version : "raw");
    meta.source = corpus_path;
    embias::EpochCallback callback;
    if (on_epoch != nullptr) {
      callback = [on_epoch, user_data](std::size_t epoch, double loss) {
        on_epoch(epoch, loss, user_data);
      };
    }
    auto set = embias::TrainFile(corpus_path, ToCore(*config), meta, nullptr,
                                 callback);
    embias::SaveTextFormat(set, output_path);
  });
}

embias_status embias_corpus_prepare(const char* input_root,
                                    const char* const* languages,
                                    size_t language_count,
                                    const char* output_dir, int tagger_input,
                                    unsigned threads, size_t* document_count) {
  return Guard([&] {
    Require(input_root, "input_root");
    Require(output_dir, "output_dir");
    if (language_count > 0) Require(languages, "languages");
    embias::PrepareOptions options;
    options.input_root = input_root;
    for (size_t i = 0; i < language_count; ++i) {
      Require(languages[i], "language");
      options.languages.emplace_back(languages[i]);
    }
    options.output_dir = output_dir;
    options.tagger_input = tagger_input != 0;
    options.threads = threads == 0 ? 1 : threads;
    auto manifest = embias::PrepareCorpus(options);
    if (document_count) *document_count = manifest.documents.size();
  });
}

embias_status embias_corpus_lemmatize(const char* tagged_path,
                                      const char* rules_path,
                                      const char* language, int match_surface,
                                      const char* output_path,
                                      embias_lemmatize_stats* stats) {
  return Guard([&] {
    Require(tagged_path, "tagged_path");
    Require(output_path, "output_path");
    const auto level =
        match_surface ? embias::MatchLevel::kSurface : embias::MatchLevel::kLemma;
    embias::ScrubRules rules;
    rules.language = language ? language : "";
    rules.level = level;
    if (rules_path != nullptr) {
      rules = embias::LoadScrubRules(rules_path, rules.language, level);
    }
    embias::LemmatizeStats core;
    auto lines = embias::LemmatizeCorpus(
        embias::ParseTaggerOutput(std::filesystem::path(tagged_path)), rules, &core);
    embias::WriteTokenLines(lines, output_path);
    if (stats) {
      *stats = {core.word_tokens, core.output_tokens, core.punctuation,
                core.unknown_lemmas, core.replaced};
    }
  });
}

}  // extern "C"
