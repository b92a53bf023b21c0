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

/* C interface to the embias toolkit. All objects are opaque handles owned
 * by the caller and released with the matching *_free function. Every
 * fallible call returns an embias_status; on failure embias_last_error()
 * describes the problem for the calling thread. */

#ifndef EMBIAS_EMBIAS_H_
#define EMBIAS_EMBIAS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(EMBIAS_BUILDING_LIBRARY)
#define EMBIAS_API __attribute__((visibility("default")))
#else
#define EMBIAS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum embias_status {
  EMBIAS_OK = 0,
  EMBIAS_E_USAGE = 1,   /* bad argument or configuration */
  EMBIAS_E_DATA = 2,    /* malformed input, validation failure, I/O */
  EMBIAS_E_NUMERIC = 3  /* undefined or non-finite result */
} embias_status;

typedef struct embias_embedding embias_embedding;
typedef struct embias_stimuli embias_stimuli;
typedef struct embias_weat_result embias_weat_result;
typedef struct embias_aggregate embias_aggregate;

EMBIAS_API const char* embias_version(void);
/* Message of the last failed call on this thread; "" when none. */
EMBIAS_API const char* embias_last_error(void);
/* Frees strings returned through char** out-parameters. */
EMBIAS_API void embias_string_free(char* text);

/* Embeddings ------------------------------------------------------------ */

/* Reads the text format and, when present, its metadata sidecar. */
EMBIAS_API embias_status embias_embedding_load(const char* path,
                                               embias_embedding** out);
EMBIAS_API void embias_embedding_free(embias_embedding* embedding);
EMBIAS_API size_t embias_embedding_size(const embias_embedding* embedding);
EMBIAS_API size_t embias_embedding_dim(const embias_embedding* embedding);
EMBIAS_API const char* embias_embedding_language(const embias_embedding* embedding);
/* "raw" or "lemmatized". */
EMBIAS_API const char* embias_embedding_corpus_version(const embias_embedding* embedding);
EMBIAS_API int64_t embias_embedding_seed(const embias_embedding* embedding);
/* Copies the vector of `word` into `out` (dim floats). EMBIAS_E_DATA when
 * the word is absent. */
EMBIAS_API embias_status embias_embedding_vector(const embias_embedding* embedding,
                                                 const char* word, float* out);

/* Stimuli --------------------------------------------------------------- */

/* Loads a stimulus file; balanced designs are expanded into specs. */
EMBIAS_API embias_status embias_stimuli_load(const char* path,
                                             embias_stimuli** out);
EMBIAS_API void embias_stimuli_free(embias_stimuli* stimuli);
EMBIAS_API size_t embias_stimuli_count(const embias_stimuli* stimuli);
EMBIAS_API const char* embias_stimuli_name(const embias_stimuli* stimuli,
                                           size_t index);
EMBIAS_API const char* embias_stimuli_language(const embias_stimuli* stimuli,
                                               size_t index);
EMBIAS_API size_t embias_stimuli_notice_count(const embias_stimuli* stimuli);
EMBIAS_API const char* embias_stimuli_notice(const embias_stimuli* stimuli,
                                             size_t index);

/* WEAT ------------------------------------------------------------------ */

typedef enum embias_permutation_method {
  EMBIAS_PERMUTATION_EXACT = 0,
  EMBIAS_PERMUTATION_MONTE_CARLO = 1
} embias_permutation_method;

typedef struct embias_weat_options {
  embias_permutation_method method;
  uint64_t samples;    /* Monte Carlo draws */
  uint64_t seed;       /* Monte Carlo seed */
  uint64_t exact_cap;  /* largest partition count enumerated exactly */
  unsigned threads;
  int skip_oov;        /* 0: missing words are an error */
} embias_weat_options;

EMBIAS_API embias_weat_options embias_weat_options_default(void);

/* Runs spec `spec_index` of `stimuli` against `embedding`. `embedding_path`
 * is recorded in the result and named in error messages; may be NULL. */
EMBIAS_API embias_status embias_weat_run(const embias_embedding* embedding,
                                         const char* embedding_path,
                                         const embias_stimuli* stimuli,
                                         size_t spec_index,
                                         const embias_weat_options* options,
                                         embias_weat_result** out);
EMBIAS_API void embias_weat_result_free(embias_weat_result* result);
EMBIAS_API double embias_weat_result_statistic(const embias_weat_result* result);
EMBIAS_API double embias_weat_result_effect_size(const embias_weat_result* result);
EMBIAS_API double embias_weat_result_p_value(const embias_weat_result* result);
EMBIAS_API uint64_t embias_weat_result_partitions(const embias_weat_result* result);
EMBIAS_API size_t embias_weat_result_dropped_count(const embias_weat_result* result);
EMBIAS_API const char* embias_weat_result_dropped(const embias_weat_result* result,
                                                  size_t index);
EMBIAS_API embias_status embias_weat_result_to_json(const embias_weat_result* result,
                                                    char** out);
EMBIAS_API embias_status embias_weat_result_save(const embias_weat_result* result,
                                                 const char* path);
EMBIAS_API embias_status embias_weat_result_load(const char* path,
                                                 embias_weat_result** out);

/* Aggregates ------------------------------------------------------------ */

/* Means over runs of one spec on one language and corpus version. */
EMBIAS_API embias_status embias_aggregate_create(
    const embias_weat_result* const* results, size_t count,
    embias_aggregate** out);
EMBIAS_API void embias_aggregate_free(embias_aggregate* aggregate);
EMBIAS_API double embias_aggregate_mean_statistic(const embias_aggregate* aggregate);
EMBIAS_API double embias_aggregate_mean_effect_size(const embias_aggregate* aggregate);
EMBIAS_API double embias_aggregate_mean_p_value(const embias_aggregate* aggregate);
EMBIAS_API size_t embias_aggregate_runs(const embias_aggregate* aggregate);
EMBIAS_API embias_status embias_aggregate_to_json(const embias_aggregate* aggregate,
                                                  char** out);
EMBIAS_API embias_status embias_aggregate_save(const embias_aggregate* aggregate,
                                               const char* path);
EMBIAS_API embias_status embias_aggregate_load(const char* path,
                                               embias_aggregate** out);

/* Report ---------------------------------------------------------------- */

/* Writes report.tsv, report.md and report.svg into `output_dir`.
 * `config_json` is echoed into report.md; may be NULL. */
EMBIAS_API embias_status embias_report_write(
    const embias_aggregate* const* aggregates, size_t count,
    const char* config_json, const char* title, const char* output_dir);

/* Training -------------------------------------------------------------- */

typedef struct embias_training_config {
  size_t dim;
  size_t window;
  size_t negatives;
  size_t epochs;
  double lr_initial;
  double lr_min;
  size_t min_count;
  double subsample_t;
  uint64_t seed;
} embias_training_config;

EMBIAS_API embias_training_config embias_training_config_default(void);
/* Overlays "key = value" lines from `path` onto `config`. */
EMBIAS_API embias_status embias_training_config_load(const char* path,
                                                     embias_training_config* config);

typedef void (*embias_epoch_callback)(size_t epoch, double mean_loss,
                                      void* user_data);

/* Trains on `corpus_path` (one sentence per line) and writes the input
 * vectors plus metadata sidecar to `output_path`. `corpus_version` is
 * "raw" or "lemmatized". `on_epoch` may be NULL. */
EMBIAS_API embias_status embias_train(const char* corpus_path,
                                      const embias_training_config* config,
                                      const char* language,
                                      const char* corpus_version,
                                      const char* output_path,
                                      embias_epoch_callback on_epoch,
                                      void* user_data);

/* Corpus ---------------------------------------------------------------- */

/* Intersects <input_root>/<lang>/<doc>.* across languages and writes
 * <lang>.raw.txt plus manifest.json under `output_dir`. */
EMBIAS_API embias_status embias_corpus_prepare(const char* input_root,
                                               const char* const* languages,
                                               size_t language_count,
                                               const char* output_dir,
                                               int tagger_input,
                                               unsigned threads,
                                               size_t* document_count);

typedef struct embias_lemmatize_stats {
  uint64_t word_tokens;
  uint64_t output_tokens;
  uint64_t punctuation;
  uint64_t unknown_lemmas;
  uint64_t replaced;
} embias_lemmatize_stats;

/* Converts tagger output to a lemmatized, scrubbed corpus file. `stats`
 * may be NULL. */
EMBIAS_API embias_status embias_corpus_lemmatize(const char* tagged_path,
                                                 const char* rules_path,
                                                 const char* language,
                                                 int match_surface,
                                                 const char* output_path,
                                                 embias_lemmatize_stats* stats);

#ifdef __cplusplus
}
#endif

#endif  /* EMBIAS_EMBIAS_H_ */
