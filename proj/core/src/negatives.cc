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

#include "lsscore/negatives.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "lsscore/random.h"

namespace lsscore {
namespace {

std::vector<std::string> LowerWords(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (!IsPunctToken(t)) out.push_back(ToLower(t));
  }
  return out;
}

std::string JoinSentences(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

}  // namespace

std::string_view KindName(NegativeKind kind) {
  switch (kind) {
    case NegativeKind::kDelete:
      return "delete";
    case NegativeKind::kAddRedundant:
      return "add_redundant";
    case NegativeKind::kShuffle:
      return "shuffle";
  }
  return "unknown";
}

std::optional<NegativeKind> ParseKind(std::string_view name) {
  for (NegativeKind k : kNegativeKinds) {
    if (KindName(k) == name) return k;
  }
  return std::nullopt;
}

size_t DeletionCount(size_t words, double ratio) {
  const auto rounded = static_cast<size_t>(std::floor(ratio * static_cast<double>(words) + 0.5));
  return std::max<size_t>(1, rounded);
}

NegativeSample DeleteWords(std::string_view summary, uint64_t seed, double ratio) {
  const NegativeKind kind = NegativeKind::kDelete;
  std::vector<std::string> tokens = SplitTokens(summary);
  std::vector<size_t> word_positions;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (!IsPunctToken(tokens[i])) word_positions.push_back(i);
  }
  if (word_positions.size() < 2) throw NegativeError(kind, "summary too short");

  const size_t d = DeletionCount(word_positions.size(), ratio);
  Rng rng(seed);
  std::vector<size_t> doomed;
  std::sample(word_positions.begin(), word_positions.end(), std::back_inserter(doomed), d, rng);

  std::vector<std::string> kept;
  kept.reserve(tokens.size() - d);
  size_t next = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (next < doomed.size() && doomed[next] == i) {
      ++next;
      continue;
    }
    kept.push_back(std::move(tokens[i]));
  }
  return {JoinTokens(kept), kind, {}, seed};
}

double UnigramF1(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::string> wa = LowerWords(a), wb = LowerWords(b);
  if (wa.empty() || wb.empty()) return 0.0;
  std::map<std::string, size_t> ca;
  for (const auto& w : wa) ++ca[w];
  size_t overlap = 0;
  for (const auto& w : wb) {
    auto it = ca.find(w);
    if (it != ca.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(wa.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(wb.size());
  return 2 * p * r / (p + r);
}

std::vector<size_t> MostSimilarSentences(std::span<const Sentence> summary,
                                         std::span<const Sentence> document) {
  std::vector<size_t> out;
  if (document.empty()) return out;
  for (const auto& s : summary) {
    size_t best = 0;
    double best_f1 = -1.0;
    for (size_t j = 0; j < document.size(); ++j) {
      double f1 = UnigramF1(s.tokens, document[j].tokens);
      if (f1 > best_f1) {
        best_f1 = f1;
        best = j;
      }
    }
    out.push_back(best);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

NegativeSample AddRedundant(std::string_view summary, std::string_view document,
                            uint64_t seed, size_t k) {
  const NegativeKind kind = NegativeKind::kAddRedundant;
  std::vector<Sentence> sum_sents = SplitSentences(summary);
  std::vector<Sentence> doc_sents = SplitSentences(document);
  if (sum_sents.empty()) throw NegativeError(kind, "empty summary");

  std::vector<size_t> filtered = MostSimilarSentences(sum_sents, doc_sents);
  std::vector<size_t> pool;
  for (size_t j = 0; j < doc_sents.size(); ++j) {
    if (!std::binary_search(filtered.begin(), filtered.end(), j)) pool.push_back(j);
  }
  if (pool.size() < k || k == 0) throw NegativeError(kind, "no redundant candidates");

  Rng rng(seed);
  std::vector<size_t> chosen;
  std::sample(pool.begin(), pool.end(), std::back_inserter(chosen), k, rng);

  std::string prefix(summary);
  while (!prefix.empty() && std::isspace(static_cast<unsigned char>(prefix.back()))) {
    prefix.pop_back();
  }
  std::vector<std::string> parts = {prefix};
  for (size_t j : chosen) parts.push_back(doc_sents[j].text);
  return {JoinSentences(parts), kind, {}, seed};
}

NegativeSample Shuffle(std::string_view summary, uint64_t seed) {
  const NegativeKind kind = NegativeKind::kShuffle;
  const std::vector<std::string> original = SplitTokens(summary);
  if (original.size() < 2) throw NegativeError(kind, "summary too short");
  const std::vector<Sentence> sentences = SplitSentences(summary);

  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (size_t attempt = 0; attempt < kShuffleAttempts; ++attempt) {
    std::vector<std::string> tokens;
    std::vector<std::string> parts;
    if (coin(rng) && sentences.size() >= 2) {
      std::vector<size_t> order(sentences.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      for (size_t i : order) {
        parts.push_back(sentences[i].text);
        tokens.insert(tokens.end(), sentences[i].tokens.begin(), sentences[i].tokens.end());
      }
    } else {
      for (const auto& s : sentences) {
        std::vector<std::string> words = s.tokens;
        auto end = words.end();
        if (IsPunctToken(words.back())) --end;
        std::shuffle(words.begin(), end, rng);
        parts.push_back(JoinTokens(words));
        tokens.insert(tokens.end(), words.begin(), words.end());
      }
    }
    if (tokens != original) return {JoinSentences(parts), kind, {}, seed};
  }
  throw NegativeError(kind, "unshufflable");
}

NegativeSet GenerateSet(std::string_view summary, std::string_view document,
                        uint64_t master_seed, std::string_view source_id) {
  NegativeSet set;
  for (NegativeKind k : kNegativeKinds) {
    const uint64_t seed = DeriveSeed(master_seed, {static_cast<uint64_t>(k)});
    NegativeSample s;
    switch (k) {
      case NegativeKind::kDelete:
        s = DeleteWords(summary, seed);
        break;
      case NegativeKind::kAddRedundant:
        s = AddRedundant(summary, document, seed);
        break;
      case NegativeKind::kShuffle:
        s = Shuffle(summary, seed);
        break;
    }
    s.source_id = std::string(source_id);
    set.samples[static_cast<size_t>(k)] = std::move(s);
  }
  return set;
}

}  // namespace lsscore
