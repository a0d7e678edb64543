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

#ifndef LSSCORE_SYNTHETIC_H_
#define LSSCORE_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lsscore/corpus.h"

namespace lsscore {

// Template-generated news-like (document, reference) pairs. Documents run
// 8-12 sentences; references are 2-3 sentences paraphrasing the key facts.
// Deterministic per seed; ids are "synth-<index>".
std::vector<DocRefPair> GenerateSyntheticCorpus(size_t count, uint64_t seed);

// For every pair, four rated variants with a forced quality order on the
// single dimension "quality": the reference itself (4), its add-redundant
// negative (3), its delete negative (2), its shuffle negative (1). Pairs whose
// negatives cannot be generated are skipped.
std::vector<RatedSummary> BuildOrderedRatedSet(std::span<const DocRefPair> pairs,
                                               uint64_t seed);

// id -> document and id -> reference maps for the correlation harness.
std::map<std::string, std::string> DocumentsById(std::span<const DocRefPair> pairs);
std::map<std::string, std::string> ReferencesById(std::span<const DocRefPair> pairs);

}  // namespace lsscore

#endif  // LSSCORE_SYNTHETIC_H_
