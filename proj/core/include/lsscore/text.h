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

#ifndef LSSCORE_TEXT_H_
#define LSSCORE_TEXT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lsscore {

using TokenId = int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kClsId = 2;
inline constexpr TokenId kSepId = 3;
inline constexpr TokenId kMaskId = 4;
inline constexpr size_t kReservedCount = 5;

// Longest sequence the encoder accepts, special tokens included.
inline constexpr size_t kMaxSequenceLength = 512;

// Word-level vocabulary. Ids 0-4 are [PAD] [UNK] [CLS] [SEP] [MASK]; the rest
// are lowercased tokens. Immutable once built.
class Vocab {
 public:
  // Reserved tokens only.
  Vocab();

  // Most frequent tokens of `corpus` (as produced by SplitTokens, lowercased)
  // fill ids 5..max_size-1. Ties are broken lexicographically, so the result
  // does not depend on corpus order.
  static Vocab Build(std::span<const std::string> corpus, size_t max_size);

  // `tokens` must start with the five reserved names in id order.
  static Vocab FromTokens(std::vector<std::string> tokens);

  // One token per line, line index = id.
  static Vocab Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  // Unknown strings map to [UNK].
  TokenId Id(std::string_view token) const;
  const std::string& Token(TokenId id) const;
  bool Contains(std::string_view token) const;
  size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  explicit Vocab(std::vector<std::string> tokens);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// The six marks detached from the end of whitespace-separated words.
bool IsTerminalPunct(char c);

// True for a token made only of a single detached punctuation mark.
bool IsPunctToken(std::string_view token);

// Whitespace split with trailing . , ! ? ; : peeled off as separate tokens.
// Case is preserved.
std::vector<std::string> SplitTokens(std::string_view text);

// SplitTokens + lowercasing + vocabulary lookup.
std::vector<TokenId> Tokenize(std::string_view text, const Vocab& vocab);

// Joins tokens with single spaces, attaching punctuation tokens to the
// preceding word.
std::string JoinTokens(std::span<const std::string> tokens);
std::string Detokenize(std::span<const TokenId> ids, const Vocab& vocab);

std::string ToLower(std::string_view s);

// Number of non-punctuation tokens.
size_t CountWords(std::span<const std::string> tokens);

struct Sentence {
  std::string text;                 // trimmed span of the source text
  std::vector<std::string> tokens;  // SplitTokens(text), never empty
};

// Splits after . ! ? when followed by whitespace or end of text.
std::vector<Sentence> SplitSentences(std::string_view text);

struct InputSequence {
  std::vector<TokenId> ids;   // [CLS] content... [SEP]
  size_t original_count = 0;  // content tokens before truncation

  size_t length() const { return ids.size(); }
  size_t content_count() const { return ids.size() >= 2 ? ids.size() - 2 : 0; }
};

// [CLS] + first min(|tokens|, max_len - 2) tokens + [SEP].
InputSequence Prepare(std::span<const TokenId> tokens,
                      size_t max_len = kMaxSequenceLength);

}  // namespace lsscore

#endif  // LSSCORE_TEXT_H_
