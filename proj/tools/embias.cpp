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

// embias command-line front end. Talks to the library only through the C
// API. Exit codes: 0 success, 1 usage, 2 data/validation/I-O, 3 numeric.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "embias/embias.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Carries an exit status out of a subcommand.
struct Failure {
  int status;
  std::string message;
};

void Check(embias_status status, const std::string& context = "") {
  if (status == EMBIAS_OK) return;
  std::string message = embias_last_error();
  if (!context.empty()) message = context + ": " + message;
  throw Failure{static_cast<int>(status), message};
}

[[noreturn]] void Usage(const std::string& message) {
  throw Failure{EMBIAS_E_USAGE, message};
}

[[noreturn]] void DataError(const std::string& message) {
  throw Failure{EMBIAS_E_DATA, message};
}

unsigned WorkerCount() {
  const char* value = std::getenv("EMBIAS_THREADS");
  if (value == nullptr || *value == '\0') return 1;
  char* end = nullptr;
  const long parsed = std::strtol(value, &end, 10);
  if (*end != '\0' || parsed < 1 || parsed > 1024) {
    Usage(std::string("EMBIAS_THREADS must be an integer in [1, 1024], got '") +
          value + "'");
  }
  return static_cast<unsigned>(parsed);
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using EmbeddingPtr =
    std::unique_ptr<embias_embedding, Deleter<embias_embedding, embias_embedding_free>>;
using StimuliPtr =
    std::unique_ptr<embias_stimuli, Deleter<embias_stimuli, embias_stimuli_free>>;
using ResultPtr = std::unique_ptr<embias_weat_result,
                                  Deleter<embias_weat_result, embias_weat_result_free>>;
using AggregatePtr =
    std::unique_ptr<embias_aggregate, Deleter<embias_aggregate, embias_aggregate_free>>;

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) DataError("cannot write " + path.string());
}

// Spec names may contain '/'; file names may not.
std::string Slug(const std::string& name) {
  std::string out;
  for (char c : name) out += (c == '/' || c == '\\') ? std::string("__") : std::string(1, c);
  return out;
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
  std::string input;
  std::vector<std::string> languages;
  std::string output;
  bool tagger_input = false;
};

void RunPrepare(const PrepareArgs& args) {
  std::vector<const char*> langs;
  for (const auto& l : args.languages) langs.push_back(l.c_str());
  size_t documents = 0;
  Check(embias_corpus_prepare(args.input.c_str(), langs.data(), langs.size(),
                              args.output.c_str(), args.tagger_input ? 1 : 0,
                              WorkerCount(), &documents));
  std::cout << "prepared " << documents << " shared documents for "
            << langs.size() << " languages in " << args.output << "\n";
}

// -------------------------------------------------------------- lemmatize

struct LemmatizeArgs {
  std::string tagged;
  std::string rules;
  std::string language;
  std::string match = "lemma";
  std::string output;
};

void RunLemmatize(const LemmatizeArgs& args) {
  embias_lemmatize_stats stats{};
  fs::path out(args.output);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  Check(embias_corpus_lemmatize(args.tagged.c_str(),
                                args.rules.empty() ? nullptr : args.rules.c_str(),
                                args.language.c_str(), args.match == "surface",
                                args.output.c_str(), &stats));
  std::cout << "lemmatized " << stats.word_tokens << " word tokens ("
            << stats.replaced << " scrubbed, " << stats.unknown_lemmas
            << " unknown lemmas, " << stats.punctuation
            << " punctuation dropped) into " << args.output << "\n";
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string corpus;
  std::string output_dir;
  std::string config;
  std::string language;
  std::string version;
  size_t runs = 1;
  uint64_t seed_base = 1;
  std::optional<size_t> dim, window, negatives, epochs, min_count;
  std::optional<double> lr, lr_min, subsample;
  bool verbose = false;
};

// "<lang>.<version>.txt" -> (lang, version).
std::pair<std::string, std::string> InferNames(const fs::path& corpus) {
  const std::string stem = corpus.stem().string();
  const auto dot = stem.find('.');
  if (dot == std::string::npos) return {stem, ""};
  return {stem.substr(0, dot), stem.substr(dot + 1)};
}

void PrintEpoch(size_t epoch, double loss, void* user) {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::cerr << *static_cast<const std::string*>(user) << ": epoch " << epoch
            << " mean loss " << loss << "\n";
}

void RunTrain(const TrainArgs& args) {
  auto [language, version] = InferNames(args.corpus);
  if (!args.language.empty()) language = args.language;
  if (!args.version.empty()) version = args.version;
  if (version.empty()) version = "raw";
  if (version != "raw" && version != "lemmatized") {
    Usage("cannot infer corpus version from '" + args.corpus +
          "'; pass --corpus-version raw|lemmatized");
  }
  if (args.runs < 1) Usage("--runs must be at least 1");

  embias_training_config base = embias_training_config_default();
  if (!args.config.empty()) Check(embias_training_config_load(args.config.c_str(), &base));
  if (args.dim) base.dim = *args.dim;
  if (args.window) base.window = *args.window;
  if (args.negatives) base.negatives = *args.negatives;
  if (args.epochs) base.epochs = *args.epochs;
  if (args.min_count) base.min_count = *args.min_count;
  if (args.lr) base.lr_initial = *args.lr;
  if (args.lr_min) base.lr_min = *args.lr_min;
  if (args.subsample) base.subsample_t = *args.subsample;

  fs::create_directories(args.output_dir);
  struct Job {
    uint64_t seed;
    std::string path;
    std::string label;
    embias_status status = EMBIAS_OK;
    std::string error;
  };
  std::vector<Job> jobs;
  for (size_t k = 0; k < args.runs; ++k) {
    const uint64_t seed = args.seed_base + k;
    const std::string name =
        language + "." + version + ".seed" + std::to_string(seed) + ".vec";
    jobs.push_back({seed, (fs::path(args.output_dir) / name).string(), name,
                    EMBIAS_OK, ""});
  }

  // Runs are independent and each is single-threaded, so spreading them
  // over workers does not change any output byte.
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      Job& job = jobs[i];
      embias_training_config config = base;
      config.seed = job.seed;
      job.status = embias_train(args.corpus.c_str(), &config, language.c_str(),
                                version.c_str(), job.path.c_str(),
                                args.verbose ? PrintEpoch : nullptr, &job.label);
      if (job.status != EMBIAS_OK) job.error = embias_last_error();
    }
  };
  const unsigned workers =
      std::min<unsigned>(WorkerCount(), static_cast<unsigned>(jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  for (const auto& job : jobs) {
    if (job.status != EMBIAS_OK) throw Failure{job.status, job.label + ": " + job.error};
    std::cout << job.path << "\n";
  }
}

// ------------------------------------------------------------------- weat

struct WeatArgs {
  std::vector<std::string> embeddings;
  std::vector<std::string> stimuli;
  bool skip_oov = false;
  std::string permutations = "exact";
  uint64_t seed = 0;
  uint64_t exact_cap = 0;
  std::string output_dir;
  std::string report_dir;
  std::string title;
};

struct LoadedEmbedding {
  std::string path;
  std::string stem;
  EmbeddingPtr handle;
};

json WeatConfigEcho(const WeatArgs& args, const embias_weat_options& options) {
  json echo;
  echo["toolkit_version"] = embias_version();
  echo["permutations"] = args.permutations;
  echo["seed"] = options.seed;
  echo["exact_cap"] = options.exact_cap;
  echo["oov_policy"] = args.skip_oov ? "skip" : "strict";
  echo["stimuli"] = args.stimuli;
  echo["embeddings"] = args.embeddings;
  return echo;
}

void RunWeat(const WeatArgs& args) {
  embias_weat_options options = embias_weat_options_default();
  if (args.permutations == "exact") {
    options.method = EMBIAS_PERMUTATION_EXACT;
  } else {
    char* end = nullptr;
    const unsigned long long n = std::strtoull(args.permutations.c_str(), &end, 10);
    if (args.permutations.empty() || *end != '\0' || args.permutations[0] == '-') {
      Usage("--permutations must be 'exact' or a sample count, got '" +
            args.permutations + "'");
    }
    options.method = EMBIAS_PERMUTATION_MONTE_CARLO;
    options.samples = n;
  }
  options.seed = args.seed;
  if (args.exact_cap > 0) options.exact_cap = args.exact_cap;
  options.threads = WorkerCount();
  options.skip_oov = args.skip_oov ? 1 : 0;

  std::vector<LoadedEmbedding> embeddings;
  std::set<std::string> stems;
  for (const auto& path : args.embeddings) {
    embias_embedding* handle = nullptr;
    Check(embias_embedding_load(path.c_str(), &handle), path);
    std::string stem = fs::path(path).stem().string();
    if (!stems.insert(stem).second) {
      Usage("two embedding files share the name '" + stem +
            "'; result files would collide");
    }
    embeddings.push_back({path, stem, EmbeddingPtr(handle)});
  }

  std::vector<StimuliPtr> stimuli;
  for (const auto& path : args.stimuli) {
    embias_stimuli* handle = nullptr;
    Check(embias_stimuli_load(path.c_str(), &handle), path);
    stimuli.emplace_back(handle);
    for (size_t i = 0; i < embias_stimuli_notice_count(handle); ++i) {
      std::cerr << "note: " << path << ": " << embias_stimuli_notice(handle, i) << "\n";
    }
  }

  const fs::path out(args.output_dir);
  fs::create_directories(out / "results");
  fs::create_directories(out / "aggregates");
  const json echo = WeatConfigEcho(args, options);
  WriteText(out / "run_config.json", echo.dump(2) + "\n");

  std::vector<AggregatePtr> aggregates;
  size_t evaluated = 0;
  for (const auto& stim : stimuli) {
    for (size_t s = 0; s < embias_stimuli_count(stim.get()); ++s) {
      const std::string spec = embias_stimuli_name(stim.get(), s);
      const std::string spec_language = embias_stimuli_language(stim.get(), s);
      // (language, version) -> results, in input order.
      std::map<std::pair<std::string, std::string>, std::vector<ResultPtr>> groups;
      for (const auto& e : embeddings) {
        const std::string language = embias_embedding_language(e.handle.get());
        if (!spec_language.empty() && !language.empty() && language != spec_language) {
          continue;
        }
        embias_weat_result* result = nullptr;
        Check(embias_weat_run(e.handle.get(), e.path.c_str(), stim.get(), s,
                              &options, &result));
        ResultPtr owned(result);
        for (size_t i = 0; i < embias_weat_result_dropped_count(result); ++i) {
          std::cerr << "note: " << e.path << ": skipped missing word '"
                    << embias_weat_result_dropped(result, i) << "' in " << spec << "\n";
        }
        const fs::path dir = out / "results" / Slug(spec);
        fs::create_directories(dir);
        Check(embias_weat_result_save(result, (dir / (e.stem + ".json")).c_str()));
        groups[{language, embias_embedding_corpus_version(e.handle.get())}]
            .push_back(std::move(owned));
        ++evaluated;
      }
      if (groups.empty()) {
        std::cerr << "note: no embedding matches language '" << spec_language
                  << "' of spec " << spec << "\n";
      }
      for (const auto& [key, results] : groups) {
        std::vector<const embias_weat_result*> raw;
        for (const auto& r : results) raw.push_back(r.get());
        embias_aggregate* aggregate = nullptr;
        Check(embias_aggregate_create(raw.data(), raw.size(), &aggregate), spec);
        AggregatePtr owned(aggregate);
        const std::string language = key.first.empty() ? "unknown" : key.first;
        const fs::path file = out / "aggregates" /
                              (Slug(spec) + "." + language + "." + key.second + ".json");
        Check(embias_aggregate_save(aggregate, file.c_str()));
        std::printf("%s\t%s\t%s\tm.t.s. %.3f\tm.e.s. %.3f\tm.p.v. %.3f\tn=%zu\n",
                    spec.c_str(), language.c_str(), key.second.c_str(),
                    embias_aggregate_mean_statistic(aggregate),
                    embias_aggregate_mean_effect_size(aggregate),
                    embias_aggregate_mean_p_value(aggregate),
                    embias_aggregate_runs(aggregate));
        aggregates.push_back(std::move(owned));
      }
    }
  }
  if (evaluated == 0) DataError("no (embedding, spec) pair shares a language");

  if (!args.report_dir.empty()) {
    std::vector<const embias_aggregate*> raw;
    for (const auto& a : aggregates) raw.push_back(a.get());
    const std::string config = echo.dump();
    Check(embias_report_write(raw.data(), raw.size(), config.c_str(),
                              args.title.c_str(), args.report_dir.c_str()));
  }
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string output_dir;
  std::string config;
  std::string title;
};

void RunReport(const ReportArgs& args) {
  std::vector<AggregatePtr> aggregates;
  for (const auto& path : args.inputs) {
    embias_aggregate* handle = nullptr;
    Check(embias_aggregate_load(path.c_str(), &handle));
    aggregates.emplace_back(handle);
  }
  std::string config;
  if (!args.config.empty()) {
    try {
      config = json::parse(ReadText(args.config)).dump();
    } catch (const json::exception& e) {
      DataError(args.config + ": " + e.what());
    }
  }
  std::vector<const embias_aggregate*> raw;
  for (const auto& a : aggregates) raw.push_back(a.get());
  Check(embias_report_write(raw.data(), raw.size(), config.c_str(),
                            args.title.c_str(), args.output_dir.c_str()));
  std::cout << "wrote report.tsv, report.md and report.svg to " << args.output_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word embedding association tests across languages and corpus versions"};
  app.set_version_flag("--version", std::string(embias_version()));
  app.require_subcommand(1);

  PrepareArgs prepare;
  auto* cmd_prepare = app.add_subcommand(
      "prepare-corpus", "Intersect parallel documents and tokenize each language");
  cmd_prepare->add_option("--input", prepare.input, "Root holding <lang>/<doc-id>.<ext>")
      ->required()->check(CLI::ExistingDirectory);
  cmd_prepare->add_option("--languages", prepare.languages, "Language codes")
      ->required()->delimiter(',');
  cmd_prepare->add_option("--output", prepare.output, "Output directory")->required();
  cmd_prepare->add_flag("--tagger-input", prepare.tagger_input,
                        "Also write one-token-per-line tagger input");

  LemmatizeArgs lemmatize;
  auto* cmd_lemmatize = app.add_subcommand(
      "lemmatize", "Turn tagger output into a lemmatized, gender-scrubbed corpus");
  cmd_lemmatize->add_option("--tagged", lemmatize.tagged, "surface<TAB>pos<TAB>lemma file")
      ->required();
  cmd_lemmatize->add_option("--rules", lemmatize.rules, "Scrub rules, key<TAB>replacement");
  cmd_lemmatize->add_option("--language", lemmatize.language, "Language code");
  cmd_lemmatize->add_option("--match", lemmatize.match, "Apply rules to lemma or surface")
      ->check(CLI::IsMember({"lemma", "surface"}));
  cmd_lemmatize->add_option("--output", lemmatize.output, "Output corpus file")->required();

  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train", "Train CBOW embeddings, one per seed");
  cmd_train->add_option("--corpus", train.corpus, "One sentence per line")->required();
  cmd_train->add_option("--output-dir", train.output_dir)->required();
  cmd_train->add_option("--runs", train.runs, "Number of seeds")->capture_default_str();
  cmd_train->add_option("--seed-base", train.seed_base, "First seed")->capture_default_str();
  cmd_train->add_option("--language", train.language, "Defaults to the corpus file prefix");
  cmd_train->add_option("--corpus-version", train.version, "raw or lemmatized")
      ->check(CLI::IsMember({"raw", "lemmatized"}));
  cmd_train->add_option("--config", train.config, "key = value hyperparameter file");
  cmd_train->add_option("--dim", train.dim);
  cmd_train->add_option("--window", train.window);
  cmd_train->add_option("--negatives", train.negatives);
  cmd_train->add_option("--epochs", train.epochs);
  cmd_train->add_option("--min-count", train.min_count);
  cmd_train->add_option("--lr", train.lr, "Initial learning rate");
  cmd_train->add_option("--lr-min", train.lr_min, "Final learning rate");
  cmd_train->add_option("--subsample", train.subsample, "Subsampling threshold t");
  cmd_train->add_flag("-v,--verbose", train.verbose, "Print per-epoch loss");

  WeatArgs weat;
  auto* cmd_weat = app.add_subcommand("weat", "Run WEAT comparisons and aggregate over runs");
  cmd_weat->add_option("--embeddings", weat.embeddings, "Embedding files")->required();
  cmd_weat->add_option("--stimuli", weat.stimuli, "Stimulus JSON files")->required();
  cmd_weat->add_flag("--skip-oov", weat.skip_oov, "Drop missing words instead of failing");
  cmd_weat->add_option("--permutations", weat.permutations, "exact or a Monte Carlo sample count")
      ->capture_default_str();
  cmd_weat->add_option("--seed", weat.seed, "Monte Carlo seed")->capture_default_str();
  cmd_weat->add_option("--exact-cap", weat.exact_cap, "Largest exact enumeration");
  cmd_weat->add_option("--output-dir", weat.output_dir)->required();
  cmd_weat->add_option("--report", weat.report_dir, "Also write a report here");
  cmd_weat->add_option("--title", weat.title, "Chart title");

  ReportArgs report;
  auto* cmd_report = app.add_subcommand("report", "Tables and chart from aggregate JSON files");
  cmd_report->add_option("--inputs", report.inputs, "Aggregate JSON files")->required();
  cmd_report->add_option("--output-dir", report.output_dir)->required();
  cmd_report->add_option("--config", report.config, "Config echo, e.g. run_config.json");
  cmd_report->add_option("--title", report.title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : EMBIAS_E_USAGE;
  }

  try {
    if (*cmd_prepare) RunPrepare(prepare);
    else if (*cmd_lemmatize) RunLemmatize(lemmatize);
    else if (*cmd_train) RunTrain(train);
    else if (*cmd_weat) RunWeat(weat);
    else if (*cmd_report) RunReport(report);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.status;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EMBIAS_E_DATA;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EMBIAS_E_DATA;
  }
  return 0;
}
