// Copyright 2026 The lsscore Authors.
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

#ifndef LSSCORE_TRAINER_H_
#define LSSCORE_TRAINER_H_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsscore/corpus.h"
#include "lsscore/encoder.h"
#include "lsscore/negatives.h"
#include "lsscore/scoring.h"
#include "lsscore/text.h"

namespace lsscore {

struct TrainConfig {
  size_t epochs = 10;
  size_t batch_size = 8;  // base summaries per step
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;  // global gradient norm; <= 0 disables clipping
  uint64_t seed = 0;
  double validation_fraction = 0.05;
  double margin = 1.0;
  ScoreWeights weights;
  size_t threads = 0;  // 0 = hardware concurrency; never affects results

  // Throws ConfigError.
  void Validate() const;

  // Flat JSON object. Missing keys keep their defaults; "encoder" and
  // "vocab_size" are tolerated for the CLI; anything else is rejected.
  static TrainConfig FromJson(std::string_view json);
  std::string ToJson() const;
};

// A base summary, its three negatives, and the source document.
struct TrainingExample {
  std::string summary;
  NegativeSet negatives;
  std::string document;
};

struct TrainingBatch {
  size_t id = 0;
  std::vector<TrainingExample> examples;
};

struct EpochReport {
  size_t epoch = 0;
  double train_loss = 0.0;       // mean ranking loss per base summary
  double validation_loss = 0.0;  // same, on the held-out split
  double accuracy = 0.0;         // fraction of triples with LS(r) > LS(neg)
  std::array<double, 3> kind_accuracy{};  // indexed by NegativeKind
  size_t triples = 0;            // validation triples scored
  size_t skipped = 0;            // training pairs whose negatives failed

  std::string ToJson() const;
};

// sum over negatives of max(0, margin - (score_r - score_neg)).
double RankingLoss(double score_r, std::span<const double> negatives, double margin = 1.0);

// Ranking loss of one batch, summed over its examples. When `grads` is non-null
// the exact gradient is accumulated into it, backpropagating through both the
// semantic and linguistic paths of the summary and the document encodings.
// Examples run on config.threads workers; each owns its gradient buffer and the
// buffers are summed in example order, so results do not depend on threading.
// A non-zero dropout_seed enables dropout at params.config.dropout.
template <typename T>
double BatchLossAndGradient(const EncoderParams<T>& params, const Vocab& vocab,
                            const TrainingBatch& batch, const TrainConfig& config,
                            EncoderParams<T>* grads, uint64_t dropout_seed = 0);

// Adam with bias correction. Moment buffers mirror the parameter shapes.
template <typename T>
class AdamOptimizer {
 public:
  AdamOptimizer(const EncoderConfig& config, const TrainConfig& train);

  // Clips `grads` to the configured global norm (in place), then updates.
  void Step(EncoderParams<T>& params, EncoderParams<T>& grads);
  size_t steps() const { return steps_; }

 private:
  TrainConfig train_;
  EncoderParams<T> m_, v_;
  size_t steps_ = 0;
};

// One optimizer step on `batch`. Returns the pre-update batch loss. A batch
// whose hinge terms are all inactive has zero gradient and leaves params and
// optimizer state untouched. Throws DivergenceError on a non-finite loss or
// gradient.
template <typename T>
double TrainStep(EncoderParams<T>& params, AdamOptimizer<T>& optimizer, const Vocab& vocab,
                 const TrainingBatch& batch, const TrainConfig& config);

// Scores held-out pairs with frozen params. Negatives are derived from `seed`
// and the pair position, so repeated calls agree exactly. Pairs whose
// negatives cannot be generated are skipped.
EpochReport ValidateModel(const EncoderParams<float>& params, const Vocab& vocab,
                          std::span<const DocRefPair> pairs, uint64_t seed,
                          const TrainConfig& config);

struct TrainResult {
  EncoderParams<float> best;
  size_t best_epoch = 0;  // 1-based
  std::vector<EpochReport> reports;
};

// Seeded 95/5 split, fresh negatives every epoch, model selection on
// validation discrimination accuracy (earliest epoch wins ties).
TrainResult Train(std::span<const DocRefPair> pairs, const Vocab& vocab,
                  const EncoderConfig& encoder, const TrainConfig& config,
                  const std::function<void(const EpochReport&)>& on_epoch = {});

struct PairSplit {
  std::vector<size_t> train;
  std::vector<size_t> validation;
};

// The split Train uses: round(fraction * n) pairs (at least one) held out,
// chosen by a permutation seeded from config.seed.
PairSplit SplitPairs(size_t pair_count, const TrainConfig& config);

}  // namespace lsscore

#endif  // LSSCORE_TRAINER_H_
