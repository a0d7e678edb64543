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

// Finite-difference check of the batch ranking-loss gradient on a small
// double-precision model. Shared by the unit tests and the acceptance suite.

#ifndef LSSCORE_TESTS_GRADIENT_CHECK_H_
#define LSSCORE_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <string>
#include <vector>

#include "lsscore/encoder.h"
#include "lsscore/negatives.h"
#include "lsscore/synthetic.h"
#include "lsscore/text.h"
#include "lsscore/trainer.h"
#include "oracles.h"

namespace lsscore::testing {

struct GradientCheck {
  size_t checked = 0;
  size_t failures = 0;
  double worst = 0.0;
  std::string worst_name;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  double loss = 0.0;
};

struct GradientFixture {
  Vocab vocab;
  EncoderParams<double> params;
  TrainingBatch batch;
  TrainConfig config;
};

// K=8, two layers, a 50-token vocabulary and one base summary with its three
// negatives (three triples).
inline GradientFixture MakeGradientFixture(uint64_t seed = 1) {
  GradientFixture f;
  const auto pairs = GenerateSyntheticCorpus(4, seed);
  std::vector<std::string> texts;
  for (const auto& p : pairs) {
    texts.push_back(p.document);
    texts.push_back(p.reference);
  }
  f.vocab = Vocab::Build(texts, 50);
  EncoderConfig c;
  c.layers = 2;
  c.hidden = 8;
  c.heads = 2;
  c.ff = 32;
  c.max_positions = 512;
  c.vocab_size = f.vocab.size();
  f.params = InitParams<double>(c, seed);
  // Only the first three document sentences, to keep the sweep cheap.
  const auto sentences = SplitSentences(pairs[0].document);
  std::string doc;
  for (size_t i = 0; i < 3 && i < sentences.size(); ++i) {
    doc += (doc.empty() ? "" : " ") + sentences[i].text;
  }
  TrainingExample ex;
  ex.summary = pairs[0].reference;
  ex.document = doc;
  ex.negatives = GenerateSet(ex.summary, pairs[0].document, seed);
  f.batch.examples.push_back(ex);
  f.config.threads = 1;
  return f;
}

inline GradientCheck CheckBatchGradient(GradientFixture& f, double eps = 1e-4,
                                        double tolerance = 1e-4, double floor = 1e-6) {
  GradientCheck out;
  auto grads = EncoderParams<double>::Zeros(f.params.config);
  out.loss = BatchLossAndGradient(f.params, f.vocab, f.batch, f.config, &grads);
  std::vector<const Matrix<double>*> g;
  ForEachTensor(grads, [&](const std::string&, const Matrix<double>& m) { g.push_back(&m); });
  size_t t = 0;
  ForEachTensor(f.params, [&](const std::string& name, Matrix<double>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      m.data()[i] = saved + eps;
      const double up = BatchLossAndGradient(f.params, f.vocab, f.batch, f.config,
                                             static_cast<EncoderParams<double>*>(nullptr));
      m.data()[i] = saved - eps;
      const double down = BatchLossAndGradient(f.params, f.vocab, f.batch, f.config,
                                               static_cast<EncoderParams<double>*>(nullptr));
      m.data()[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double err = RelativeError(g[t]->data()[i], numeric, floor);
      if (err > out.worst) {
        out.worst = err;
        out.worst_name = name + "[" + std::to_string(i) + "]";
        out.worst_analytic = g[t]->data()[i];
        out.worst_numeric = numeric;
      }
      if (err >= tolerance) ++out.failures;
      ++out.checked;
    }
    ++t;
  });
  return out;
}

}  // namespace lsscore::testing

#endif  // LSSCORE_TESTS_GRADIENT_CHECK_H_
