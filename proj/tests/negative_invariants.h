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

// Independent checks of the properties every negative set must satisfy.
// Used by the unit tests and the acceptance suite.

#ifndef LSSCORE_TESTS_NEGATIVE_INVARIANTS_H_
#define LSSCORE_TESTS_NEGATIVE_INVARIANTS_H_

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "lsscore/negatives.h"
#include "oracles.h"

namespace lsscore::testing {

inline size_t ExpectedDeletions(size_t words) {
  return std::max<size_t>(1, (2 * words + 5) / 10);
}

inline bool IsSubsequence(const std::vector<std::string>& small,
                          const std::vector<std::string>& big) {
  size_t j = 0;
  for (const auto& t : big) {
    if (j < small.size() && small[j] == t) ++j;
  }
  return j == small.size();
}

inline std::vector<std::string> CheckDelete(const std::string& summary, const std::string& neg) {
  std::vector<std::string> errors;
  const auto orig = NaiveTokens(summary), got = NaiveTokens(neg);
  const size_t w = NaiveWordCount(summary);
  if (NaiveWordCount(neg) + ExpectedDeletions(w) != w) {
    errors.push_back("delete: expected " + std::to_string(w - ExpectedDeletions(w)) +
                     " words, got " + std::to_string(NaiveWordCount(neg)));
  }
  if (!IsSubsequence(got, orig)) errors.push_back("delete: not a subsequence");
  const auto marks = [](const std::vector<std::string>& v) {
    return std::count_if(v.begin(), v.end(), IsMark);
  };
  if (marks(got) != marks(orig)) errors.push_back("delete: punctuation changed");
  return errors;
}

inline std::vector<std::string> CheckAddRedundant(const std::string& summary,
                                                  const std::string& document,
                                                  const std::string& neg) {
  std::vector<std::string> errors;
  std::string prefix = summary;
  while (!prefix.empty() && std::isspace(static_cast<unsigned char>(prefix.back()))) {
    prefix.pop_back();
  }
  prefix += ' ';
  if (neg.compare(0, prefix.size(), prefix) != 0) {
    errors.push_back("add_redundant: summary is not a prefix");
    return errors;
  }
  const std::string added = neg.substr(prefix.size());
  const auto doc = NaiveSentences(document);
  const auto sums = NaiveSentences(summary);
  std::vector<size_t> excluded;
  for (const auto& s : sums) {
    size_t best = 0;
    double best_f1 = -1;
    for (size_t j = 0; j < doc.size(); ++j) {
      const double f = NaiveUnigramF1(s, doc[j]);
      if (f > best_f1) {
        best_f1 = f;
        best = j;
      }
    }
    excluded.push_back(best);
  }
  bool ok = false;
  for (size_t j = 0; j < doc.size(); ++j) {
    if (doc[j] == added && std::find(excluded.begin(), excluded.end(), j) == excluded.end()) {
      ok = true;
    }
  }
  if (!ok) errors.push_back("add_redundant: appended text is not an eligible document sentence");
  return errors;
}

inline std::vector<std::string> CheckShuffle(const std::string& summary, const std::string& neg) {
  std::vector<std::string> errors;
  auto a = NaiveTokens(summary), b = NaiveTokens(neg);
  if (a == b) errors.push_back("shuffle: token order unchanged");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) errors.push_back("shuffle: token multiset changed");
  return errors;
}

inline std::vector<std::string> CheckNegativeSet(const std::string& summary,
                                                 const std::string& document,
                                                 const NegativeSet& set) {
  std::vector<std::string> errors;
  auto append = [&](std::vector<std::string> more) {
    errors.insert(errors.end(), more.begin(), more.end());
  };
  for (NegativeKind k : kNegativeKinds) {
    if (set[k].kind != k) errors.push_back("kind tag mismatch");
    if (set[k].text == summary) errors.push_back(std::string(KindName(k)) + ": equals summary");
  }
  append(CheckDelete(summary, set[NegativeKind::kDelete].text));
  append(CheckAddRedundant(summary, document, set[NegativeKind::kAddRedundant].text));
  append(CheckShuffle(summary, set[NegativeKind::kShuffle].text));
  return errors;
}

}  // namespace lsscore::testing

#endif  // LSSCORE_TESTS_NEGATIVE_INVARIANTS_H_
