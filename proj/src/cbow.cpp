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

#include "embias/cbow.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "embias/error.hpp"

namespace embias {
namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double LogSigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

// Uniform double in [0, 1) from the top 53 bits.
double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
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

void ComputeHidden(const CbowModel& model,
                   std::span<const std::uint32_t> context,
                   std::span<double> hidden) {
  std::fill(hidden.begin(), hidden.end(), 0.0);
  for (auto c : context) {
    auto row = model.InputRow(c);
    for (std::size_t j = 0; j < model.dim; ++j) hidden[j] += row[j];
  }
  const double inv = 1.0 / static_cast<double>(context.size());
  for (auto& v : hidden) v *= inv;
}

template <typename T>
void SetNumber(std::string_view key, std::string_view value, T& out) {
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec == std::errc() && ptr == value.data() + value.size()) return;
  ThrowUsage("config key '" + std::string(key) + "': cannot parse '" +
             std::string(value) + "'");
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

}  // namespace

void TrainingConfig::Validate() const {
  if (dim < 1 || window < 1 || negatives < 1 || epochs < 1 || min_count < 1) {
    ThrowUsage("dim, window, negatives, epochs and min_count must be >= 1");
  }
  if (!(lr_min > 0.0) || !(lr_initial > lr_min) || !std::isfinite(lr_initial)) {
    ThrowUsage("learning rates must satisfy lr_initial > lr_min > 0");
  }
  if (!(subsample_t > 0.0) || !std::isfinite(subsample_t)) {
    ThrowUsage("subsample_t must be a positive number");
  }
}

TrainingConfig ParseTrainingConfig(std::string_view text, TrainingConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto end = text.find('\n');
    auto line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      ThrowUsage("config line " + std::to_string(line_no) +
                 ": expected key=value");
    }
    auto key = Trim(line.substr(0, eq));
    auto value = Trim(line.substr(eq + 1));
    if (key == "dim") SetNumber(key, value, base.dim);
    else if (key == "window") SetNumber(key, value, base.window);
    else if (key == "negatives") SetNumber(key, value, base.negatives);
    else if (key == "epochs") SetNumber(key, value, base.epochs);
    else if (key == "lr_initial") SetNumber(key, value, base.lr_initial);
    else if (key == "lr_min") SetNumber(key, value, base.lr_min);
    else if (key == "min_count") SetNumber(key, value, base.min_count);
    else if (key == "subsample_t") SetNumber(key, value, base.subsample_t);
    else if (key == "seed") SetNumber(key, value, base.seed);
    else ThrowUsage("config line " + std::to_string(line_no) + ": unknown key '" +
                    std::string(key) + "'");
  }
  return base;
}

TrainingConfig LoadTrainingConfig(const std::filesystem::path& path,
                                  TrainingConfig base) {
  std::ifstream in(path);
  if (!in) ThrowUsage("cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseTrainingConfig(buffer.str(), base);
}

std::vector<double> NegativeSamplingDistribution(
    std::span<const std::uint64_t> counts) {
  if (counts.empty()) ThrowData("negative sampling over an empty vocabulary");
  std::vector<double> probs(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs[i] = std::pow(static_cast<double>(counts[i]), 0.75);
    total += probs[i];
  }
  for (auto& p : probs) p /= total;
  return probs;
}

double SubsampleKeepProbability(double z, double t) {
  return std::min(1.0, (std::sqrt(z / t) + 1.0) * (t / z));
}

Vocabulary Vocabulary::Build(
    const std::vector<std::vector<std::string>>& sentences,
    std::size_t min_count) {
  std::unordered_map<std::string, std::uint64_t> raw;
  for (const auto& sentence : sentences)
    for (const auto& token : sentence) ++raw[token];

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [word, count] : raw) {
    if (count >= min_count) kept.emplace_back(word, count);
  }
  if (kept.empty()) {
    ThrowData("empty vocabulary: no word occurs at least " +
              std::to_string(min_count) + " times");
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary vocab;
  vocab.words_.reserve(kept.size());
  vocab.counts_.reserve(kept.size());
  for (auto& [word, count] : kept) {
    vocab.index_.emplace(word, static_cast<std::uint32_t>(vocab.words_.size()));
    vocab.words_.push_back(std::move(word));
    vocab.counts_.push_back(count);
    vocab.total_ += count;
  }
  vocab.probs_ = NegativeSamplingDistribution(vocab.counts_);
  vocab.cumulative_.resize(vocab.probs_.size());
  std::partial_sum(vocab.probs_.begin(), vocab.probs_.end(),
                   vocab.cumulative_.begin());
  vocab.cumulative_.back() = 1.0;
  return vocab;
}

std::ptrdiff_t Vocabulary::IndexOf(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::uint32_t Vocabulary::SampleNegative(std::mt19937_64& rng) const {
  const double u = Uniform01(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto index = static_cast<std::size_t>(it - cumulative_.begin());
  return static_cast<std::uint32_t>(std::min(index, cumulative_.size() - 1));
}

std::vector<std::vector<std::string>> ReadSentences(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) ThrowData("cannot read corpus " + path.string());
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream tokens(line);
    std::vector<std::string> sentence;
    std::string token;
    while (tokens >> token) sentence.push_back(std::move(token));
    sentences.push_back(std::move(sentence));
  }
  if (in.bad()) ThrowData("read failure on " + path.string());
  return sentences;
}

Vocabulary BuildVocab(const std::filesystem::path& corpus,
                      std::size_t min_count) {
  return Vocabulary::Build(ReadSentences(corpus), min_count);
}

double CbowLoss(const CbowModel& model, std::span<const std::uint32_t> context,
                std::uint32_t center, std::span<const std::uint32_t> negatives) {
  std::vector<double> hidden(model.dim);
  ComputeHidden(model, context, hidden);
  double loss = -LogSigmoid(Dot(model.OutputRow(center), hidden));
  for (auto k : negatives) loss -= LogSigmoid(-Dot(model.OutputRow(k), hidden));
  return loss;
}

void CbowGradient(const CbowModel& model,
                  std::span<const std::uint32_t> context, std::uint32_t center,
                  std::span<const std::uint32_t> negatives,
                  std::vector<double>& grad_input,
                  std::vector<double>& grad_output) {
  const std::size_t dim = model.dim;
  grad_input.assign(model.input.size(), 0.0);
  grad_output.assign(model.output.size(), 0.0);
  std::vector<double> hidden(dim);
  ComputeHidden(model, context, hidden);
  std::vector<double> grad_hidden(dim, 0.0);

  // dL/d(score) = sigma(score) - label.
  auto accumulate = [&](std::uint32_t target, double label) {
    auto u = model.OutputRow(target);
    const double coeff = Sigmoid(Dot(u, hidden)) - label;
    for (std::size_t j = 0; j < dim; ++j) {
      grad_output[target * dim + j] += coeff * hidden[j];
      grad_hidden[j] += coeff * u[j];
    }
  };
  accumulate(center, 1.0);
  for (auto k : negatives) accumulate(k, 0.0);

  const double inv = 1.0 / static_cast<double>(context.size());
  for (auto c : context) {
    for (std::size_t j = 0; j < dim; ++j) {
      grad_input[c * dim + j] += grad_hidden[j] * inv;
    }
  }
}

double CbowStep(CbowModel& model, std::span<const std::uint32_t> context,
                std::uint32_t center, std::span<const std::uint32_t> negatives,
                double lr, std::vector<double>& scratch) {
  const std::size_t dim = model.dim;
  const std::size_t targets = negatives.size() + 1;
  // scratch layout: hidden | grad_hidden | per-target coefficients
  scratch.resize(2 * dim + targets);
  std::span<double> hidden(scratch.data(), dim);
  std::span<double> grad_hidden(scratch.data() + dim, dim);
  std::span<double> coeff(scratch.data() + 2 * dim, targets);
  ComputeHidden(model, context, hidden);
  std::fill(grad_hidden.begin(), grad_hidden.end(), 0.0);

  auto target_at = [&](std::size_t t) {
    return t == 0 ? center : negatives[t - 1];
  };

  // All scores are taken before any row moves, so the step is exactly
  // -lr times the gradient even when a row repeats.
  double loss = 0.0;
  for (std::size_t t = 0; t < targets; ++t) {
    auto u = model.OutputRow(target_at(t));
    const double score = Dot(u, hidden);
    const double label = t == 0 ? 1.0 : 0.0;
    loss -= t == 0 ? LogSigmoid(score) : LogSigmoid(-score);
    coeff[t] = Sigmoid(score) - label;
    for (std::size_t j = 0; j < dim; ++j) grad_hidden[j] += coeff[t] * u[j];
  }
  for (std::size_t t = 0; t < targets; ++t) {
    auto u = model.OutputRow(target_at(t));
    const double scale = lr * coeff[t];
    for (std::size_t j = 0; j < dim; ++j) u[j] -= scale * hidden[j];
  }
  const double scale = lr / static_cast<double>(context.size());
  for (auto c : context) {
    auto v = model.InputRow(c);
    for (std::size_t j = 0; j < dim; ++j) v[j] -= scale * grad_hidden[j];
  }
  return loss;
}

EmbeddingSet Train(const std::vector<std::vector<std::string>>& sentences,
                   const TrainingConfig& config, EmbeddingMeta meta,
                   TrainingReport* report, const EpochCallback& on_epoch) {
  config.Validate();
  const Vocabulary vocab = Vocabulary::Build(sentences, config.min_count);
  const std::size_t dim = config.dim;

  std::vector<std::vector<std::uint32_t>> corpus;
  std::uint64_t corpus_tokens = 0;
  for (const auto& sentence : sentences) {
    std::vector<std::uint32_t> ids;
    for (const auto& token : sentence) {
      auto index = vocab.IndexOf(token);
      if (index >= 0) ids.push_back(static_cast<std::uint32_t>(index));
    }
    if (ids.empty()) continue;
    corpus_tokens += ids.size();
    corpus.push_back(std::move(ids));
  }

  std::vector<double> keep(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const double z = static_cast<double>(vocab.counts()[i]) /
                     static_cast<double>(vocab.total());
    keep[i] = SubsampleKeepProbability(z, config.subsample_t);
  }

  std::mt19937_64 rng(config.seed);
  CbowModel model(vocab.size(), dim);
  const double half_range = 0.5 / static_cast<double>(dim);
  for (auto& v : model.input) v = (2.0 * Uniform01(rng) - 1.0) * half_range;

  const double planned =
      static_cast<double>(config.epochs) * static_cast<double>(corpus_tokens);
  std::uint64_t processed = 0;
  double lr = config.lr_initial;
  TrainingReport local;
  std::vector<std::uint32_t> kept_ids;
  std::vector<std::uint32_t> context;
  std::vector<std::uint32_t> negatives;
  std::vector<double> scratch;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::uint64_t examples = 0;
    for (const auto& sentence : corpus) {
      kept_ids.clear();
      for (auto id : sentence) {
        if (keep[id] >= 1.0 || Uniform01(rng) < keep[id]) kept_ids.push_back(id);
      }
      for (std::size_t pos = 0; pos < kept_ids.size(); ++pos) {
        lr = std::max(config.lr_min,
                      config.lr_initial - (config.lr_initial - config.lr_min) *
                                              static_cast<double>(processed) /
                                              planned);
        const std::size_t reach = 1 + UniformBelow(rng, config.window);
        context.clear();
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(kept_ids.size() - 1, pos + reach);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c != pos) context.push_back(kept_ids[c]);
        }
        if (context.empty()) continue;
        const std::uint32_t center = kept_ids[pos];
        negatives.clear();
        if (vocab.size() > 1) {
          while (negatives.size() < config.negatives) {
            auto k = vocab.SampleNegative(rng);
            if (k != center) negatives.push_back(k);
          }
        }
        loss_sum += CbowStep(model, context, center, negatives, lr, scratch);
        ++examples;
        ++local.updates;
      }
      processed += sentence.size();
    }
    const double mean = examples ? loss_sum / static_cast<double>(examples) : 0.0;
    local.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch + 1, mean);
  }
  local.final_lr = lr;

  for (double v : model.input) {
    if (!std::isfinite(v)) ThrowNumeric("training diverged: non-finite weights");
  }
  std::vector<float> matrix(model.input.begin(), model.input.end());
  meta.seed = static_cast<std::int64_t>(config.seed);
  meta.deterministic = true;
  if (report) *report = std::move(local);
  return EmbeddingSet(vocab.words(), std::move(matrix), dim, std::move(meta));
}

EmbeddingSet TrainFile(const std::filesystem::path& corpus,
                       const TrainingConfig& config, EmbeddingMeta meta,
                       TrainingReport* report, const EpochCallback& on_epoch) {
  config.Validate();
  return Train(ReadSentences(corpus), config, std::move(meta), report, on_epoch);
}

}  // namespace embias
