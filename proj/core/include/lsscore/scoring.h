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

#ifndef LSSCORE_SCORING_H_
#define LSSCORE_SCORING_H_

#include <string_view>

#include "lsscore/encoder.h"
#include "lsscore/text.h"

namespace lsscore {

// LS = alpha * L + beta * S.
struct ScoreWeights {
  double alpha = 0.01;
  double beta = 1.0;
};

struct ScoreBreakdown {
  double l_score = 0.0;   // mean log-probability of the summary's own tokens, <= 0
  double s_score = 0.0;   // cosine of the [CLS] states, in [-1, 1]
  double ls_score = 0.0;  // alpha * l_score + beta * s_score
};

// Cosine similarity of the [CLS] rows. Throws DataError("degenerate
// embedding") if either row has zero norm.
template <typename T>
double SemanticScore(const HiddenStates<T>& doc, const HiddenStates<T>& summary);

// Mean natural-log probability of the true token over content positions
// (everything between [CLS] and [SEP]). Throws DataError("empty summary")
// when there are none.
template <typename T>
double LinguisticScore(const TokenProbs<T>& probs, const InputSequence& input);

// Same quantity from log-probabilities; preferred since it never takes log(0).
template <typename T>
double LinguisticScoreFromLogProbs(const Matrix<T>& log_probs, const InputSequence& input);

inline double CombinedScore(double l_score, double s_score, const ScoreWeights& w) {
  return w.alpha * l_score + w.beta * s_score;
}

InputSequence PrepareText(std::string_view text, const Vocab& vocab);

// tokenize -> prepare -> encode both texts -> S from the [CLS] states,
// L from the head applied to the summary -> combine.
template <typename T>
ScoreBreakdown ScoreSummary(const EncoderParams<T>& params, const Vocab& vocab,
                            std::string_view document, std::string_view summary,
                            const ScoreWeights& weights = {});

// Same pipeline with the document already encoded.
template <typename T>
ScoreBreakdown ScoreAgainstEncoded(const EncoderParams<T>& params, const Vocab& vocab,
                                   const HiddenStates<T>& doc_hidden, std::string_view summary,
                                   const ScoreWeights& weights = {});

// Differentiable pieces used by training.

template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

// Returns cos(a, b); writes d cos / da and d cos / db when non-null.
template <typename T>
T CosineWithGrad(const RowVector<T>& a, const RowVector<T>& b, RowVector<T>* da,
                 RowVector<T>* db);

// Adjoint of LinguisticScoreFromLogProbs with respect to log_probs, times
// `upstream`: upstream / n at the true token of every content position.
template <typename T>
Matrix<T> LinguisticScoreAdjoint(const Matrix<T>& log_probs, const InputSequence& input,
                                 T upstream);

}  // namespace lsscore

#endif  // LSSCORE_SCORING_H_
