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

#ifndef LSSCORE_HARNESS_H_
#define LSSCORE_HARNESS_H_

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lsscore/corpus.h"
#include "lsscore/encoder.h"
#include "lsscore/scoring.h"
#include "lsscore/text.h"

namespace lsscore {

// Fractional ranks (1-based); tied values share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation of AverageRanks. Throws DataError on length mismatch,
// fewer than two items, or "zero variance".
double Spearman(std::span<const double> xs, std::span<const double> ys);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Clipped n-gram overlap. Throws DataError("reference too short") when the
// reference has fewer than n tokens, and on empty inputs or n outside {1, 2}.
RougeScore RougeN(std::span<const std::string> candidate,
                  std::span<const std::string> reference, size_t n);
RougeScore RougeL(std::span<const std::string> candidate,
                  std::span<const std::string> reference);

// Same, on lowercased SplitTokens output (no stemming, no stopwords).
RougeScore RougeN(std::string_view candidate, std::string_view reference, size_t n);
RougeScore RougeL(std::string_view candidate, std::string_view reference);

enum class Metric { kLsScore, kCosDoc, kRouge1, kRouge2, kRougeL };

// "ls", "cosdoc", "rouge1", "rouge2", "rougel".
std::string_view MetricName(Metric m);
std::optional<Metric> ParseMetric(std::string_view name);
// Comma-separated list; throws DataError on unknown names.
std::vector<Metric> ParseMetricList(std::string_view list);

struct CorrelationCell {
  std::optional<double> rho;  // empty when the human ratings are constant
  size_t n = 0;
};

struct CorrelationTable {
  // (metric name, dimension) -> cell, ordered by metric then dimension.
  std::map<std::pair<std::string, std::string>, CorrelationCell> cells;

  // CSV with header "metric,dimension,rho,n"; undefined cells print
  // "undefined" in the rho column.
  void WriteCsv(std::ostream& out) const;
};

// Pooled summary-level Spearman between per-summary metric values and every
// rating dimension. `references` (doc id -> reference text) is needed only
// for the ROUGE metrics. Records are processed in id order, so the table
// does not depend on input order.
struct CorrelationInputs {
  const EncoderParams<float>* params = nullptr;  // required for ls / cosdoc
  const Vocab* vocab = nullptr;
  ScoreWeights weights;
  const std::map<std::string, std::string>* documents = nullptr;
  const std::map<std::string, std::string>* references = nullptr;
  size_t threads = 0;
};

CorrelationTable EvaluateCorrelations(std::span<const RatedSummary> rated,
                                      std::span<const Metric> metrics,
                                      const CorrelationInputs& inputs);

// Correlation of precomputed metric values (one per rated summary, same
// order) against every rating dimension.
std::map<std::string, CorrelationCell> CorrelateWithRatings(std::span<const RatedSummary> rated,
                                                            std::span<const double> values);

}  // namespace lsscore

#endif  // LSSCORE_HARNESS_H_
