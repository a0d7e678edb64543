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

#include "lsscore/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "lsscore/error.h"
#include "lsscore/parallel.h"

namespace lsscore {
namespace {

std::vector<std::string> LowerTokens(std::string_view text) {
  std::vector<std::string> out = SplitTokens(text);
  for (auto& t : out) t = ToLower(t);
  return out;
}

RougeScore FromCounts(size_t overlap, size_t cand, size_t ref) {
  RougeScore s;
  s.precision = static_cast<double>(overlap) / static_cast<double>(cand);
  s.recall = static_cast<double>(overlap) / static_cast<double>(ref);
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

bool IsConstant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

std::vector<double> AverageRanks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = mean;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("spearman: lists differ in length");
  if (xs.size() < 2) throw DataError("spearman: need at least two items");
  const std::vector<double> rx = AverageRanks(xs), ry = AverageRanks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

RougeScore RougeN(std::span<const std::string> candidate,
                  std::span<const std::string> reference, size_t n) {
  if (n != 1 && n != 2) throw DataError("rouge-n supports n = 1 or 2");
  if (candidate.empty() || reference.empty()) throw DataError("rouge: empty token list");
  if (reference.size() < n) throw DataError("reference too short");
  if (candidate.size() < n) return {};

  auto grams = [n](std::span<const std::string> toks) {
    std::map<std::vector<std::string>, size_t> out;
    for (size_t i = 0; i + n <= toks.size(); ++i) {
      ++out[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
    }
    return out;
  };
  const auto cand = grams(candidate);
  const auto ref = grams(reference);
  size_t overlap = 0;
  for (const auto& [g, c] : cand) {
    auto it = ref.find(g);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  return FromCounts(overlap, candidate.size() - n + 1, reference.size() - n + 1);
}

RougeScore RougeL(std::span<const std::string> candidate,
                  std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) throw DataError("rouge: empty token list");
  std::vector<size_t> prev(reference.size() + 1, 0), cur(reference.size() + 1, 0);
  for (size_t i = 1; i <= candidate.size(); ++i) {
    for (size_t j = 1; j <= reference.size(); ++j) {
      cur[j] = candidate[i - 1] == reference[j - 1] ? prev[j - 1] + 1
                                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return FromCounts(prev[reference.size()], candidate.size(), reference.size());
}

RougeScore RougeN(std::string_view candidate, std::string_view reference, size_t n) {
  return RougeN(LowerTokens(candidate), LowerTokens(reference), n);
}

RougeScore RougeL(std::string_view candidate, std::string_view reference) {
  return RougeL(LowerTokens(candidate), LowerTokens(reference));
}

std::string_view MetricName(Metric m) {
  switch (m) {
    case Metric::kLsScore:
      return "ls";
    case Metric::kCosDoc:
      return "cosdoc";
    case Metric::kRouge1:
      return "rouge1";
    case Metric::kRouge2:
      return "rouge2";
    case Metric::kRougeL:
      return "rougel";
  }
  return "unknown";
}

std::optional<Metric> ParseMetric(std::string_view name) {
  for (Metric m : {Metric::kLsScore, Metric::kCosDoc, Metric::kRouge1, Metric::kRouge2,
                   Metric::kRougeL}) {
    if (MetricName(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<Metric> ParseMetricList(std::string_view list) {
  std::vector<Metric> out;
  size_t start = 0;
  while (start <= list.size()) {
    size_t comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    std::string_view name = list.substr(start, comma - start);
    if (!name.empty()) {
      auto m = ParseMetric(name);
      if (!m) throw DataError("unknown metric " + std::string(name));
      if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    }
    start = comma + 1;
  }
  if (out.empty()) throw DataError("no metrics selected");
  return out;
}

void CorrelationTable::WriteCsv(std::ostream& out) const {
  out << "metric,dimension,rho,n\n";
  char buf[64];
  for (const auto& [key, cell] : cells) {
    out << key.first << ',' << key.second << ',';
    if (cell.rho) {
      std::snprintf(buf, sizeof(buf), "%.6f", *cell.rho);
      out << buf;
    } else {
      out << "undefined";
    }
    out << ',' << cell.n << '\n';
  }
}

std::map<std::string, CorrelationCell> CorrelateWithRatings(std::span<const RatedSummary> rated,
                                                            std::span<const double> values) {
  if (rated.size() != values.size()) throw DataError("one metric value per summary expected");
  std::set<std::string> dims;
  for (const auto& r : rated) {
    for (const auto& [d, _] : r.ratings) dims.insert(d);
  }
  std::map<std::string, CorrelationCell> out;
  for (const auto& dim : dims) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < rated.size(); ++i) {
      auto it = rated[i].ratings.find(dim);
      if (it == rated[i].ratings.end()) continue;
      xs.push_back(values[i]);
      ys.push_back(it->second);
    }
    CorrelationCell cell;
    cell.n = xs.size();
    if (xs.size() >= 2 && !IsConstant(xs) && !IsConstant(ys)) cell.rho = Spearman(xs, ys);
    out[dim] = cell;
  }
  return out;
}

CorrelationTable EvaluateCorrelations(std::span<const RatedSummary> rated,
                                      std::span<const Metric> metrics,
                                      const CorrelationInputs& in) {
  if (rated.size() < 2) throw DataError("need at least two rated summaries");
  std::vector<RatedSummary> sorted(rated.begin(), rated.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const RatedSummary& a, const RatedSummary& b) { return a.id < b.id; });

  const bool neural = std::any_of(metrics.begin(), metrics.end(), [](Metric m) {
    return m == Metric::kLsScore || m == Metric::kCosDoc;
  });
  const bool rouge = std::any_of(metrics.begin(), metrics.end(), [](Metric m) {
    return m == Metric::kRouge1 || m == Metric::kRouge2 || m == Metric::kRougeL;
  });
  if (neural && (in.params == nullptr || in.vocab == nullptr)) {
    throw DataError("ls/cosdoc metrics need weights and a vocabulary");
  }
  if (neural && in.documents == nullptr) throw DataError("ls/cosdoc metrics need documents");
  if (rouge && in.references == nullptr) throw DataError("rouge metrics need references");

  auto lookup = [](const std::map<std::string, std::string>* m, const std::string& id,
                   const char* what) -> const std::string& {
    auto it = m->find(id);
    if (it == m->end()) throw DataError(std::string("unknown ") + what + " id " + id);
    return it->second;
  };
  for (const auto& r : sorted) {
    if (neural) lookup(in.documents, r.doc_id, "document");
    if (rouge) lookup(in.references, r.doc_id, "reference");
  }

  std::map<std::string, HiddenStates<float>> encoded;
  if (neural) {
    std::vector<std::string> ids;
    for (const auto& r : sorted) ids.push_back(r.doc_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<HiddenStates<float>> states(ids.size());
    ParallelFor(ids.size(), in.threads, [&](size_t i) {
      states[i] = Forward(*in.params, PrepareText(lookup(in.documents, ids[i], "document"),
                                                  *in.vocab));
    });
    for (size_t i = 0; i < ids.size(); ++i) encoded.emplace(ids[i], std::move(states[i]));
  }

  // values[metric][summary]
  std::vector<std::vector<double>> values(metrics.size(), std::vector<double>(sorted.size()));
  ParallelFor(sorted.size(), in.threads, [&](size_t i) {
    const RatedSummary& r = sorted[i];
    std::optional<ScoreBreakdown> score;
    if (neural) {
      score = ScoreAgainstEncoded(*in.params, *in.vocab, encoded.at(r.doc_id), r.summary,
                                  in.weights);
    }
    for (size_t m = 0; m < metrics.size(); ++m) {
      switch (metrics[m]) {
        case Metric::kLsScore:
          values[m][i] = score->ls_score;
          break;
        case Metric::kCosDoc:
          values[m][i] = score->s_score;
          break;
        case Metric::kRouge1:
          values[m][i] = RougeN(r.summary, lookup(in.references, r.doc_id, "reference"), 1).f1;
          break;
        case Metric::kRouge2:
          values[m][i] = RougeN(r.summary, lookup(in.references, r.doc_id, "reference"), 2).f1;
          break;
        case Metric::kRougeL:
          values[m][i] = RougeL(r.summary, lookup(in.references, r.doc_id, "reference")).f1;
          break;
      }
    }
  });

  CorrelationTable table;
  for (size_t m = 0; m < metrics.size(); ++m) {
    for (auto& [dim, cell] : CorrelateWithRatings(sorted, values[m])) {
      table.cells[{std::string(MetricName(metrics[m])), dim}] = cell;
    }
  }
  return table;
}

}  // namespace lsscore
