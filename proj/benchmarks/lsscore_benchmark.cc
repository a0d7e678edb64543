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

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "lsscore/encoder.h"
#include "lsscore/harness.h"
#include "lsscore/negatives.h"
#include "lsscore/scoring.h"
#include "lsscore/synthetic.h"
#include "lsscore/trainer.h"

namespace lsscore {
namespace {

EncoderConfig DeskConfig(size_t vocab) {
  EncoderConfig c;
  c.vocab_size = vocab;
  return c;
}

InputSequence RandomInput(size_t length, size_t vocab, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<TokenId> tok(kReservedCount, static_cast<TokenId>(vocab) - 1);
  std::vector<TokenId> ids(length - 2);
  for (auto& t : ids) t = tok(rng);
  return Prepare(ids);
}

void BM_Forward(benchmark::State& state) {
  const auto params = InitParams<float>(DeskConfig(2000), 1);
  const auto input = RandomInput(static_cast<size_t>(state.range(0)), 2000, 2);
  for (auto _ : state) {
    ForwardPass<float> pass(params, input);
    benchmark::DoNotOptimize(pass.log_probs().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto params = InitParams<float>(DeskConfig(2000), 1);
  const auto input = RandomInput(static_cast<size_t>(state.range(0)), 2000, 2);
  auto grads = EncoderParams<float>::Zeros(params.config);
  Matrix<float> d_hidden = Matrix<float>::Ones(state.range(0), 128);
  for (auto _ : state) {
    ForwardPass<float> pass(params, input);
    pass.log_probs();
    pass.Backward(d_hidden, Matrix<float>(), grads);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_BatchGradient(benchmark::State& state) {
  const auto pairs = GenerateSyntheticCorpus(8, 3);
  std::vector<std::string> texts;
  for (const auto& p : pairs) {
    texts.push_back(p.document);
    texts.push_back(p.reference);
  }
  const Vocab vocab = Vocab::Build(texts, 8000);
  const auto params = InitParams<float>(DeskConfig(vocab.size()), 1);
  TrainingBatch batch;
  for (size_t i = 0; i < pairs.size(); ++i) {
    batch.examples.push_back({pairs[i].reference,
                              GenerateSet(pairs[i].reference, pairs[i].document, i),
                              pairs[i].document});
  }
  TrainConfig config;
  config.threads = 1;
  for (auto _ : state) {
    auto grads = EncoderParams<float>::Zeros(params.config);
    benchmark::DoNotOptimize(BatchLossAndGradient(params, vocab, batch, config, &grads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(batch.examples.size()));
}
BENCHMARK(BM_BatchGradient)->Unit(benchmark::kMillisecond);

void BM_Spearman(benchmark::State& state) {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> val(1, 5);
  std::vector<double> a(static_cast<size_t>(state.range(0))), b(a.size());
  for (auto& x : a) x = val(rng);
  for (auto& x : b) x = val(rng);
  for (auto _ : state) benchmark::DoNotOptimize(Spearman(a, b));
}
BENCHMARK(BM_Spearman)->Arg(64)->Arg(4096);

void BM_Rouge(benchmark::State& state) {
  const auto pairs = GenerateSyntheticCorpus(2, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RougeN(pairs[0].document, pairs[1].document, 2));
    benchmark::DoNotOptimize(RougeL(pairs[0].document, pairs[1].document));
  }
}
BENCHMARK(BM_Rouge);

void BM_GenerateSet(benchmark::State& state) {
  const auto pairs = GenerateSyntheticCorpus(1, 6);
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(GenerateSet(pairs[0].reference, pairs[0].document, seed++));
  }
}
BENCHMARK(BM_GenerateSet);

}  // namespace
}  // namespace lsscore

BENCHMARK_MAIN();
