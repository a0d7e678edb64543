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

#include "lsscore/scoring.h"

#include <algorithm>
#include <cmath>

#include "lsscore/error.h"

namespace lsscore {
namespace {

void CheckRows(const InputSequence& input, Eigen::Index rows) {
  if (static_cast<size_t>(rows) != input.length()) {
    throw ConfigError("probability rows do not match the input length");
  }
  if (input.content_count() == 0) throw DataError("empty summary");
}

}  // namespace

template <typename T>
double SemanticScore(const HiddenStates<T>& doc, const HiddenStates<T>& summary) {
  if (doc.rows() < 1 || summary.rows() < 1) throw DataError("empty hidden states");
  if (doc.cols() != summary.cols()) throw ConfigError("hidden sizes differ");
  const Eigen::RowVectorXd a = doc.row(0).template cast<double>();
  const Eigen::RowVectorXd b = summary.row(0).template cast<double>();
  const double na = a.squaredNorm(), nb = b.squaredNorm();
  if (na == 0.0 || nb == 0.0) throw DataError("degenerate embedding");
  const double cos = a.dot(b) / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(cos, -1.0, 1.0);
}

template <typename T>
double LinguisticScoreFromLogProbs(const Matrix<T>& log_probs, const InputSequence& input) {
  CheckRows(input, log_probs.rows());
  double total = 0.0;
  const size_t n = input.content_count();
  for (size_t i = 1; i <= n; ++i) total += static_cast<double>(log_probs(i, input.ids[i]));
  return total / static_cast<double>(n);
}

template <typename T>
double LinguisticScore(const TokenProbs<T>& probs, const InputSequence& input) {
  CheckRows(input, probs.rows());
  double total = 0.0;
  const size_t n = input.content_count();
  for (size_t i = 1; i <= n; ++i) total += std::log(static_cast<double>(probs(i, input.ids[i])));
  return total / static_cast<double>(n);
}

InputSequence PrepareText(std::string_view text, const Vocab& vocab) {
  return Prepare(Tokenize(text, vocab));
}

template <typename T>
ScoreBreakdown ScoreAgainstEncoded(const EncoderParams<T>& params, const Vocab& vocab,
                                   const HiddenStates<T>& doc_hidden, std::string_view summary,
                                   const ScoreWeights& weights) {
  InputSequence seq = PrepareText(summary, vocab);
  if (seq.content_count() == 0) throw DataError("empty summary");
  ForwardPass<T> pass(params, seq);
  ScoreBreakdown out;
  out.s_score = SemanticScore(doc_hidden, pass.hidden());
  out.l_score = LinguisticScoreFromLogProbs(pass.log_probs(), seq);
  out.ls_score = CombinedScore(out.l_score, out.s_score, weights);
  return out;
}

template <typename T>
ScoreBreakdown ScoreSummary(const EncoderParams<T>& params, const Vocab& vocab,
                            std::string_view document, std::string_view summary,
                            const ScoreWeights& weights) {
  if (Tokenize(summary, vocab).empty()) throw DataError("empty summary");
  HiddenStates<T> doc = Forward(params, PrepareText(document, vocab));
  return ScoreAgainstEncoded(params, vocab, doc, summary, weights);
}

template <typename T>
T CosineWithGrad(const RowVector<T>& a, const RowVector<T>& b, RowVector<T>* da,
                 RowVector<T>* db) {
  const T na = a.norm(), nb = b.norm();
  if (na == T(0) || nb == T(0)) throw DataError("degenerate embedding");
  const T cos = a.dot(b) / (na * nb);
  if (da) *da = b / (na * nb) - cos * a / (na * na);
  if (db) *db = a / (na * nb) - cos * b / (nb * nb);
  return cos;
}

template <typename T>
Matrix<T> LinguisticScoreAdjoint(const Matrix<T>& log_probs, const InputSequence& input,
                                 T upstream) {
  CheckRows(input, log_probs.rows());
  Matrix<T> adj = Matrix<T>::Zero(log_probs.rows(), log_probs.cols());
  const size_t n = input.content_count();
  const T w = upstream / static_cast<T>(n);
  for (size_t i = 1; i <= n; ++i) adj(i, input.ids[i]) += w;
  return adj;
}

#define LSSCORE_INSTANTIATE(T)                                                             \
  template double SemanticScore<T>(const HiddenStates<T>&, const HiddenStates<T>&);        \
  template double LinguisticScore<T>(const TokenProbs<T>&, const InputSequence&);          \
  template double LinguisticScoreFromLogProbs<T>(const Matrix<T>&, const InputSequence&);  \
  template ScoreBreakdown ScoreSummary<T>(const EncoderParams<T>&, const Vocab&,           \
                                          std::string_view, std::string_view,              \
                                          const ScoreWeights&);                            \
  template ScoreBreakdown ScoreAgainstEncoded<T>(const EncoderParams<T>&, const Vocab&,    \
                                                 const HiddenStates<T>&, std::string_view, \
                                                 const ScoreWeights&);                     \
  template T CosineWithGrad<T>(const RowVector<T>&, const RowVector<T>&, RowVector<T>*,    \
                               RowVector<T>*);                                             \
  template Matrix<T> LinguisticScoreAdjoint<T>(const Matrix<T>&, const InputSequence&, T);

LSSCORE_INSTANTIATE(float)
LSSCORE_INSTANTIATE(double)

#undef LSSCORE_INSTANTIATE

}  // namespace lsscore
