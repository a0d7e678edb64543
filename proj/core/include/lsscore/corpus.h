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

#ifndef LSSCORE_CORPUS_H_
#define LSSCORE_CORPUS_H_

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace lsscore {

struct DocRefPair {
  std::string id;
  std::string document;
  std::string reference;
};

// A system summary with its mean human rating per dimension.
struct RatedSummary {
  std::string id;
  std::string doc_id;
  std::string system;
  std::string summary;
  std::map<std::string, double> ratings;
};

// JSONL readers. One record per line, blank lines skipped, unknown keys
// ignored. Errors are DataError with a "line N: " prefix; duplicate ids are
// rejected.
std::vector<DocRefPair> ReadPairs(std::istream& in);
std::vector<RatedSummary> ReadRated(std::istream& in);
std::vector<DocRefPair> LoadPairs(const std::filesystem::path& path);
std::vector<RatedSummary> LoadRated(const std::filesystem::path& path);

void WritePairs(std::ostream& out, std::span<const DocRefPair> pairs);
void WriteRated(std::ostream& out, std::span<const RatedSummary> rated);

// Per-record averages: sentences and words (punctuation excluded) in
// documents and references.
struct CorpusStats {
  size_t pairs = 0;
  double doc_sentences = 0.0;
  double doc_words = 0.0;
  double ref_sentences = 0.0;
  double ref_words = 0.0;
};

CorpusStats ComputeStats(std::span<const DocRefPair> pairs);

}  // namespace lsscore

#endif  // LSSCORE_CORPUS_H_
