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

#include "lsscore/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <nlohmann/json.hpp>

#include "lsscore/error.h"
#include "lsscore/parallel.h"
#include "lsscore/random.h"

namespace lsscore {
namespace {

// Seed-derivation tags.
enum : uint64_t { kSplitTag = 1, kInitTag, kEpochNegTag, kOrderTag, kValidationTag, kDropoutTag };

template <typename T>
double SquaredNorm(const EncoderParams<T>& g) {
  double total = 0.0;
  ForEachTensor(g, [&](const std::string&, const Matrix<T>& m) {
    total += m.template cast<double>().squaredNorm();
  });
  return total;
}

template <typename T>
using Row = RowVector<T>;

// Loss of one example and, optionally, its gradient.
template <typename T>
double ExampleLoss(const EncoderParams<T>& params, const Vocab& vocab,
                   const TrainingExample& ex, const TrainConfig& config,
                   EncoderParams<T>* grads, uint64_t dropout_seed) {
  const T alpha = static_cast<T>(config.weights.alpha);
  const T beta = static_cast<T>(config.weights.beta);
  const T margin = static_cast<T>(config.margin);

  std::optional<Rng> rng;
  if (dropout_seed != 0 && params.config.dropout > 0.0) rng.emplace(dropout_seed);
  Rng* drop = rng ? &*rng : nullptr;

  ForwardPass<T> doc(params, PrepareText(ex.document, vocab), drop);
  const Row<T> cls_doc = doc.hidden().row(0);

  constexpr size_t kCount = 1 + kNegativeKinds.size();
  std::array<InputSequence, kCount> seqs;
  std::array<ForwardPass<T>, kCount> passes;
  std::array<T, kCount> scores{};
  std::array<Row<T>, kCount> d_cls_doc, d_cls_sum;
  for (size_t j = 0; j < kCount; ++j) {
    const std::string& text = j == 0 ? ex.summary : ex.negatives.samples[j - 1].text;
    seqs[j] = PrepareText(text, vocab);
    if (seqs[j].content_count() == 0) throw DataError("empty summary");
    passes[j] = ForwardPass<T>(params, seqs[j], drop);
    const Row<T> cls = passes[j].hidden().row(0);
    const T s = CosineWithGrad<T>(cls_doc, cls, grads ? &d_cls_doc[j] : nullptr,
                                  grads ? &d_cls_sum[j] : nullptr);
    const T l = static_cast<T>(LinguisticScoreFromLogProbs(passes[j].log_probs(), seqs[j]));
    scores[j] = alpha * l + beta * s;
    if (!std::isfinite(scores[j])) return std::numeric_limits<double>::quiet_NaN();
  }

  // Hinge adjoints: d loss / d LS_j.
  std::array<T, kCount> adjoint{};
  T loss = 0;
  for (size_t j = 1; j < kCount; ++j) {
    const T term = margin - (scores[0] - scores[j]);
    if (term > T(0)) {
      loss += term;
      adjoint[0] -= T(1);
      adjoint[j] += T(1);
    }
  }
  if (grads == nullptr) return static_cast<double>(loss);

  const Eigen::Index K = static_cast<Eigen::Index>(params.config.hidden);
  Matrix<T> d_doc = Matrix<T>::Zero(doc.hidden().rows(), K);
  bool doc_touched = false;
  for (size_t j = 0; j < kCount; ++j) {
    if (adjoint[j] == T(0)) continue;
    const T ds = beta * adjoint[j];
    const T dl = alpha * adjoint[j];
    Matrix<T> d_hidden = Matrix<T>::Zero(passes[j].hidden().rows(), K);
    d_hidden.row(0) = ds * d_cls_sum[j];
    d_doc.row(0) += ds * d_cls_doc[j];
    doc_touched = true;
    Matrix<T> d_lp;
    if (dl != T(0)) d_lp = LinguisticScoreAdjoint<T>(passes[j].log_probs(), seqs[j], dl);
    passes[j].Backward(d_hidden, d_lp, *grads);
  }
  if (doc_touched) doc.Backward(d_doc, Matrix<T>(), *grads);
  return static_cast<double>(loss);
}

template <typename T>
void ScaleGradients(EncoderParams<T>& g, T factor) {
  ForEachTensor(g, [&](const std::string&, Matrix<T>& m) { m *= factor; });
}

double ParseNumber(const nlohmann::json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("train config: ") + key + " must be a number");
  return it->get<double>();
}

uint64_t ParseCount(const nlohmann::json& j, const char* key, uint64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_unsigned()) {
    throw ConfigError(std::string("train config: ") + key + " must be a non-negative integer");
  }
  return it->get<uint64_t>();
}

std::vector<std::optional<TrainingExample>> MakeExamples(std::span<const DocRefPair> pairs,
                                                         std::span<const size_t> indices,
                                                         uint64_t seed_base, size_t threads) {
  std::vector<std::optional<TrainingExample>> out(indices.size());
  ParallelFor(indices.size(), threads, [&](size_t i) {
    const DocRefPair& p = pairs[indices[i]];
    try {
      NegativeSet set = GenerateSet(p.reference, p.document,
                                    DeriveSeed(seed_base, {indices[i]}), p.id);
      out[i] = TrainingExample{p.reference, std::move(set), p.document};
    } catch (const DataError&) {
      // Pairs that cannot yield all three negatives are skipped.
    }
  });
  return out;
}

}  // namespace

void TrainConfig::Validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!std::isfinite(clip_norm)) throw ConfigError("clip_norm must be finite");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must be in (0, 1)");
  }
  if (!(margin > 0.0)) throw ConfigError("margin must be positive");
  if (!std::isfinite(weights.alpha) || !std::isfinite(weights.beta)) {
    throw ConfigError("score weights must be finite");
  }
}

TrainConfig TrainConfig::FromJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  static const char* kKnown[] = {"epochs", "batch_size", "learning_rate", "beta1", "beta2",
                                 "epsilon", "clip_norm", "seed", "validation_fraction",
                                 "margin", "alpha", "beta", "threads", "encoder", "vocab_size"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ConfigError("train config: unknown field " + key);
    }
  }
  TrainConfig c;
  c.epochs = ParseCount(j, "epochs", c.epochs);
  c.batch_size = ParseCount(j, "batch_size", c.batch_size);
  c.learning_rate = ParseNumber(j, "learning_rate", c.learning_rate);
  c.beta1 = ParseNumber(j, "beta1", c.beta1);
  c.beta2 = ParseNumber(j, "beta2", c.beta2);
  c.epsilon = ParseNumber(j, "epsilon", c.epsilon);
  c.clip_norm = ParseNumber(j, "clip_norm", c.clip_norm);
  c.seed = ParseCount(j, "seed", c.seed);
  c.validation_fraction = ParseNumber(j, "validation_fraction", c.validation_fraction);
  c.margin = ParseNumber(j, "margin", c.margin);
  c.weights.alpha = ParseNumber(j, "alpha", c.weights.alpha);
  c.weights.beta = ParseNumber(j, "beta", c.weights.beta);
  c.threads = ParseCount(j, "threads", c.threads);
  c.Validate();
  return c;
}

std::string TrainConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["epsilon"] = epsilon;
  j["clip_norm"] = clip_norm;
  j["seed"] = seed;
  j["validation_fraction"] = validation_fraction;
  j["margin"] = margin;
  j["alpha"] = weights.alpha;
  j["beta"] = weights.beta;
  return j.dump();
}

std::string EpochReport::ToJson() const {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["train_loss"] = train_loss;
  j["validation_loss"] = validation_loss;
  j["accuracy"] = accuracy;
  for (NegativeKind k : kNegativeKinds) {
    j["accuracy_" + std::string(KindName(k))] = kind_accuracy[static_cast<size_t>(k)];
  }
  j["triples"] = triples;
  j["skipped"] = skipped;
  return j.dump();
}

double RankingLoss(double score_r, std::span<const double> negatives, double margin) {
  double loss = 0.0;
  for (double s : negatives) loss += std::max(0.0, margin - (score_r - s));
  return loss;
}

template <typename T>
double BatchLossAndGradient(const EncoderParams<T>& params, const Vocab& vocab,
                            const TrainingBatch& batch, const TrainConfig& config,
                            EncoderParams<T>* grads, uint64_t dropout_seed) {
  const size_t n = batch.examples.size();
  std::vector<double> losses(n, 0.0);
  std::vector<std::optional<EncoderParams<T>>> parts(n);
  ParallelFor(n, config.threads, [&](size_t i) {
    const uint64_t seed = dropout_seed == 0 ? 0 : DeriveSeed(dropout_seed, {i});
    EncoderParams<T>* g = nullptr;
    if (grads != nullptr) {
      parts[i].emplace(EncoderParams<T>::Zeros(params.config));
      g = &*parts[i];
    }
    losses[i] = ExampleLoss(params, vocab, batch.examples[i], config, g, seed);
  });
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    total += losses[i];
    if (grads != nullptr) AccumulateGradients(*grads, *parts[i]);
  }
  return total;
}

template <typename T>
AdamOptimizer<T>::AdamOptimizer(const EncoderConfig& config, const TrainConfig& train)
    : train_(train), m_(EncoderParams<T>::Zeros(config)), v_(EncoderParams<T>::Zeros(config)) {}

template <typename T>
void AdamOptimizer<T>::Step(EncoderParams<T>& params, EncoderParams<T>& grads) {
  if (train_.clip_norm > 0.0) {
    const double norm = std::sqrt(SquaredNorm(grads));
    if (norm > train_.clip_norm) ScaleGradients(grads, static_cast<T>(train_.clip_norm / norm));
  }
  ++steps_;
  const T b1 = static_cast<T>(train_.beta1), b2 = static_cast<T>(train_.beta2);
  const T lr = static_cast<T>(train_.learning_rate), eps = static_cast<T>(train_.epsilon);
  const T c1 = T(1) - static_cast<T>(std::pow(train_.beta1, static_cast<double>(steps_)));
  const T c2 = T(1) - static_cast<T>(std::pow(train_.beta2, static_cast<double>(steps_)));

  std::vector<Matrix<T>*> ps, gs, ms, vs;
  auto collect = [](std::vector<Matrix<T>*>& out) {
    return [&out](const std::string&, Matrix<T>& m) { out.push_back(&m); };
  };
  ForEachTensor(params, collect(ps));
  ForEachTensor(grads, collect(gs));
  ForEachTensor(m_, collect(ms));
  ForEachTensor(v_, collect(vs));
  for (size_t t = 0; t < ps.size(); ++t) {
    auto g = gs[t]->array();
    ms[t]->array() = b1 * ms[t]->array() + (T(1) - b1) * g;
    vs[t]->array() = b2 * vs[t]->array() + (T(1) - b2) * g.square();
    ps[t]->array() -= lr * (ms[t]->array() / c1) / ((vs[t]->array() / c2).sqrt() + eps);
  }
}

template <typename T>
double TrainStep(EncoderParams<T>& params, AdamOptimizer<T>& optimizer, const Vocab& vocab,
                 const TrainingBatch& batch, const TrainConfig& config) {
  EncoderParams<T> grads = EncoderParams<T>::Zeros(params.config);
  const uint64_t dropout_seed =
      params.config.dropout > 0.0 ? DeriveSeed(config.seed, {kDropoutTag, batch.id}) : 0;
  const double loss = BatchLossAndGradient(params, vocab, batch, config, &grads, dropout_seed);
  if (!std::isfinite(loss) || !grads.AllFinite()) {
    throw DivergenceError("divergence in batch " + std::to_string(batch.id), batch.id);
  }
  if (loss == 0.0) return loss;
  optimizer.Step(params, grads);
  return loss;
}

EpochReport ValidateModel(const EncoderParams<float>& params, const Vocab& vocab,
                          std::span<const DocRefPair> pairs, uint64_t seed,
                          const TrainConfig& config) {
  if (pairs.empty()) throw DataError("empty validation set");
  std::vector<size_t> idx(pairs.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto examples = MakeExamples(pairs, idx, DeriveSeed(seed, {kValidationTag}), config.threads);

  struct Outcome {
    bool ok = false;
    double loss = 0.0;
    std::array<bool, 3> win{};
  };
  std::vector<Outcome> outcomes(examples.size());
  ParallelFor(examples.size(), config.threads, [&](size_t i) {
    if (!examples[i]) return;
    const TrainingExample& ex = *examples[i];
    HiddenStates<float> doc = Forward(params, PrepareText(ex.document, vocab));
    const double r = ScoreAgainstEncoded(params, vocab, doc, ex.summary, config.weights).ls_score;
    std::array<double, 3> negs{};
    for (size_t k = 0; k < 3; ++k) {
      negs[k] = ScoreAgainstEncoded(params, vocab, doc, ex.negatives.samples[k].text,
                                    config.weights).ls_score;
      outcomes[i].win[k] = r > negs[k];
    }
    outcomes[i].loss = RankingLoss(r, negs, config.margin);
    outcomes[i].ok = true;
  });

  EpochReport report;
  size_t bases = 0, wins = 0;
  std::array<size_t, 3> kind_wins{};
  double loss = 0.0;
  for (const Outcome& o : outcomes) {
    if (!o.ok) continue;
    ++bases;
    loss += o.loss;
    for (size_t k = 0; k < 3; ++k) {
      kind_wins[k] += o.win[k];
      wins += o.win[k];
    }
  }
  if (bases == 0) throw DataError("no validation pair produced negatives");
  report.triples = 3 * bases;
  report.validation_loss = loss / static_cast<double>(bases);
  report.accuracy = static_cast<double>(wins) / static_cast<double>(report.triples);
  for (size_t k = 0; k < 3; ++k) {
    report.kind_accuracy[k] = static_cast<double>(kind_wins[k]) / static_cast<double>(bases);
  }
  return report;
}

PairSplit SplitPairs(size_t pair_count, const TrainConfig& config) {
  std::vector<size_t> order(pair_count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(config.seed, {kSplitTag}));
  std::shuffle(order.begin(), order.end(), rng);
  size_t held = static_cast<size_t>(
      std::floor(config.validation_fraction * static_cast<double>(pair_count) + 0.5));
  held = std::clamp<size_t>(held, 1, pair_count > 1 ? pair_count - 1 : 1);
  PairSplit split;
  split.validation.assign(order.begin(), order.begin() + held);
  split.train.assign(order.begin() + held, order.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

TrainResult Train(std::span<const DocRefPair> pairs, const Vocab& vocab,
                  const EncoderConfig& encoder, const TrainConfig& config,
                  const std::function<void(const EpochReport&)>& on_epoch) {
  config.Validate();
  encoder.Validate();
  if (encoder.vocab_size != vocab.size()) {
    throw ConfigError("encoder vocab_size " + std::to_string(encoder.vocab_size) +
                      " does not match vocabulary size " + std::to_string(vocab.size()));
  }
  if (pairs.size() < 20) throw DataError("training needs at least 20 pairs");

  const PairSplit split = SplitPairs(pairs.size(), config);
  std::vector<DocRefPair> validation;
  for (size_t i : split.validation) validation.push_back(pairs[i]);

  EncoderParams<float> params = InitParams<float>(encoder, DeriveSeed(config.seed, {kInitTag}));
  AdamOptimizer<float> optimizer(encoder, config);

  TrainResult result;
  double best_accuracy = -1.0;
  size_t batch_id = 0;
  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    auto generated = MakeExamples(pairs, split.train,
                                  DeriveSeed(config.seed, {kEpochNegTag, epoch}), config.threads);
    std::vector<TrainingExample> examples;
    for (auto& g : generated) {
      if (g) examples.push_back(std::move(*g));
    }
    if (examples.empty()) throw DataError("no trainable data");
    Rng order_rng(DeriveSeed(config.seed, {kOrderTag, epoch}));
    std::shuffle(examples.begin(), examples.end(), order_rng);

    double epoch_loss = 0.0;
    for (size_t start = 0; start < examples.size(); start += config.batch_size) {
      TrainingBatch batch;
      batch.id = batch_id++;
      const size_t end = std::min(examples.size(), start + config.batch_size);
      batch.examples.assign(std::make_move_iterator(examples.begin() + start),
                            std::make_move_iterator(examples.begin() + end));
      epoch_loss += TrainStep(params, optimizer, vocab, batch, config);
    }

    EpochReport report = ValidateModel(params, vocab, validation, config.seed, config);
    report.epoch = epoch;
    report.train_loss = epoch_loss / static_cast<double>(examples.size());
    report.skipped = split.train.size() - examples.size();
    if (report.accuracy > best_accuracy) {
      best_accuracy = report.accuracy;
      result.best = params;
      result.best_epoch = epoch;
    }
    result.reports.push_back(report);
    if (on_epoch) on_epoch(report);
  }
  return result;
}

template double BatchLossAndGradient<float>(const EncoderParams<float>&, const Vocab&,
                                            const TrainingBatch&, const TrainConfig&,
                                            EncoderParams<float>*, uint64_t);
template double BatchLossAndGradient<double>(const EncoderParams<double>&, const Vocab&,
                                             const TrainingBatch&, const TrainConfig&,
                                             EncoderParams<double>*, uint64_t);
template class AdamOptimizer<float>;
template class AdamOptimizer<double>;
template double TrainStep<float>(EncoderParams<float>&, AdamOptimizer<float>&, const Vocab&,
                                 const TrainingBatch&, const TrainConfig&);
template double TrainStep<double>(EncoderParams<double>&, AdamOptimizer<double>&, const Vocab&,
                                  const TrainingBatch&, const TrainConfig&);

}  // namespace lsscore
