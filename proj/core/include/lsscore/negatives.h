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

#ifndef LSSCORE_NEGATIVES_H_
#define LSSCORE_NEGATIVES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lsscore/error.h"
#include "lsscore/text.h"

namespace lsscore {

enum class NegativeKind { kDelete = 0, kAddRedundant = 1, kShuffle = 2 };

inline constexpr std::array<NegativeKind, 3> kNegativeKinds = {
    NegativeKind::kDelete, NegativeKind::kAddRedundant, NegativeKind::kShuffle};

// "delete", "add_redundant", "shuffle".
std::string_view KindName(NegativeKind kind);
std::optional<NegativeKind> ParseKind(std::string_view name);

struct NegativeSample {
  std::string text;
  NegativeKind kind = NegativeKind::kDelete;
  std::string source_id;
  uint64_t seed = 0;
};

// One sample per kind, indexed by static_cast<size_t>(kind).
struct NegativeSet {
  std::array<NegativeSample, 3> samples;

  const NegativeSample& operator[](NegativeKind k) const {
    return samples[static_cast<size_t>(k)];
  }
};

// A sub-operation failed; carries the kind that failed.
class NegativeError : public DataError {
 public:
  NegativeError(NegativeKind kind, const std::string& what)
      : DataError(std::string(KindName(kind)) + ": " + what), kind_(kind) {}
  NegativeKind kind() const { return kind_; }

 private:
  NegativeKind kind_;
};

inline constexpr double kDeleteRatio = 0.2;
inline constexpr size_t kShuffleAttempts = 10;

// max(1, round-half-up(ratio * words)).
size_t DeletionCount(size_t words, double ratio = kDeleteRatio);

// Removes DeletionCount(w) uniformly chosen word tokens; punctuation stays.
// Throws NegativeError("summary too short") below two words.
NegativeSample DeleteWords(std::string_view summary, uint64_t seed,
                           double ratio = kDeleteRatio);

// Clipped unigram-overlap F1 over lowercased word tokens.
double UnigramF1(std::span<const std::string> a, std::span<const std::string> b);

// For every summary sentence, the index of the document sentence with the
// highest UnigramF1 (lowest index on ties). Sorted, deduplicated.
std::vector<size_t> MostSimilarSentences(std::span<const Sentence> summary,
                                         std::span<const Sentence> document);

// Appends k document sentences drawn uniformly from those left after
// removing MostSimilarSentences. The summary text is kept verbatim as the
// prefix. Throws NegativeError("no redundant candidates") if the pool is
// smaller than k.
NegativeSample AddRedundant(std::string_view summary, std::string_view document,
                            uint64_t seed, size_t k = 1);

// Coin flip between permuting sentence order (needs two sentences) and
// permuting words inside every sentence with the terminal mark pinned.
// Retries up to kShuffleAttempts times for an output whose token stream
// differs from the input, then throws NegativeError("unshufflable").
NegativeSample Shuffle(std::string_view summary, uint64_t seed);

// Independent child seeds per kind derived from master_seed.
NegativeSet GenerateSet(std::string_view summary, std::string_view document,
                        uint64_t master_seed, std::string_view source_id = {});

}  // namespace lsscore

#endif  // LSSCORE_NEGATIVES_H_
