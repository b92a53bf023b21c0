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

#ifndef EMBIAS_CBOW_HPP_
#define EMBIAS_CBOW_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embias/embedding_store.hpp"

namespace embias {

// CBOW + negative sampling hyperparameters. Defaults follow the usual
// word2vec reference values.
struct TrainingConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double lr_initial = 0.025;
  double lr_min = 1e-4;
  std::size_t min_count = 5;
  double subsample_t = 1e-3;
  std::uint64_t seed = 1;

  // Throws kUsage unless lr_initial > lr_min > 0, all counts >= 1 and
  // subsample_t > 0.
  void Validate() const;
};

// Flat "key = value" lines, '#' comments. Keys are the field names above.
TrainingConfig ParseTrainingConfig(std::string_view text,
                                   TrainingConfig base = {});
TrainingConfig LoadTrainingConfig(const std::filesystem::path& path,
                                  TrainingConfig base = {});

// P(w) proportional to count(w)^0.75, normalized.
std::vector<double> NegativeSamplingDistribution(
    std::span<const std::uint64_t> counts);

// min(1, (sqrt(z/t) + 1) * t/z) for relative frequency z.
double SubsampleKeepProbability(double z, double t);

class Vocabulary {
 public:
  // Tokens are whitespace separated; words seen fewer than min_count times
  // are dropped. Order: descending count, ties lexicographic. Throws kData
  // when nothing survives.
  static Vocabulary Build(
      const std::vector<std::vector<std::string>>& sentences,
      std::size_t min_count);

  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }
  const std::vector<double>& distribution() const noexcept { return probs_; }

  // Index of `word`, or -1 when it was not retained.
  std::ptrdiff_t IndexOf(const std::string& word) const;

  // Draws from the negative-sampling distribution.
  std::uint32_t SampleNegative(std::mt19937_64& rng) const;

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Reads one sentence per line, tokens separated by whitespace.
std::vector<std::vector<std::string>> ReadSentences(
    const std::filesystem::path& path);
Vocabulary BuildVocab(const std::filesystem::path& corpus,
                      std::size_t min_count);

// Input (context) and output (target) vectors, row-major.
struct CbowModel {
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
  std::vector<double> input;
  std::vector<double> output;

  CbowModel() = default;
  CbowModel(std::size_t vocab, std::size_t dimension)
      : vocab_size(vocab),
        dim(dimension),
        input(vocab * dimension, 0.0),
        output(vocab * dimension, 0.0) {}

  std::span<double> InputRow(std::size_t i) { return {&input[i * dim], dim}; }
  std::span<double> OutputRow(std::size_t i) { return {&output[i * dim], dim}; }
  std::span<const double> InputRow(std::size_t i) const {
    return {&input[i * dim], dim};
  }
  std::span<const double> OutputRow(std::size_t i) const {
    return {&output[i * dim], dim};
  }
};

// Loss for one (context, center) example:
//   h = mean of context input vectors
//   L = -log s(u_center . h) - sum_k log s(-u_k . h)
double CbowLoss(const CbowModel& model, std::span<const std::uint32_t> context,
                std::uint32_t center, std::span<const std::uint32_t> negatives);

// Dense dL/d(input) and dL/d(output), same layout as the model.
void CbowGradient(const CbowModel& model,
                  std::span<const std::uint32_t> context, std::uint32_t center,
                  std::span<const std::uint32_t> negatives,
                  std::vector<double>& grad_input,
                  std::vector<double>& grad_output);

// One SGD step, parameters -= lr * gradient, touching only the rows
// involved. Returns the loss before the update.
double CbowStep(CbowModel& model, std::span<const std::uint32_t> context,
                std::uint32_t center, std::span<const std::uint32_t> negatives,
                double lr, std::vector<double>& scratch);

struct TrainingReport {
  std::vector<double> epoch_loss;  // mean per-example loss of each epoch
  std::uint64_t updates = 0;
  double final_lr = 0.0;
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

// Full single-threaded, deterministic training loop: vocabulary, frequent
// word subsampling, per-position window shrinking, linear learning-rate
// decay. Windows never cross sentence lines. Exports the input vectors.
EmbeddingSet Train(const std::vector<std::vector<std::string>>& sentences,
                   const TrainingConfig& config, EmbeddingMeta meta = {},
                   TrainingReport* report = nullptr,
                   const EpochCallback& on_epoch = {});
EmbeddingSet TrainFile(const std::filesystem::path& corpus,
                       const TrainingConfig& config, EmbeddingMeta meta = {},
                       TrainingReport* report = nullptr,
                       const EpochCallback& on_epoch = {});

}  // namespace embias

#endif  // EMBIAS_CBOW_HPP_
