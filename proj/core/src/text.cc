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

#include "lsscore/text.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <stdexcept>

#include "lsscore/error.h"

namespace lsscore {
namespace {

constexpr const char* kReservedNames[kReservedCount] = {
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

Vocab::Vocab()
    : Vocab(std::vector<std::string>(std::begin(kReservedNames), std::end(kReservedNames))) {}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < kReservedCount) {
    throw DataError("vocabulary has fewer than 5 entries");
  }
  for (size_t i = 0; i < kReservedCount; ++i) {
    if (tokens_[i] != kReservedNames[i]) {
      throw DataError("vocabulary entry " + std::to_string(i) + " must be " +
                      kReservedNames[i]);
    }
  }
  index_.reserve(tokens_.size());
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) {
      throw DataError("vocabulary entry " + std::to_string(i) + " is empty");
    }
    auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) throw DataError("duplicate vocabulary entry: " + tokens_[i]);
  }
}

Vocab Vocab::Build(std::span<const std::string> corpus, size_t max_size) {
  if (max_size < kReservedCount) {
    throw ConfigError("vocabulary size must be at least 5");
  }
  if (corpus.empty()) throw DataError("empty corpus");

  std::map<std::string, size_t> counts;
  for (const auto& text : corpus) {
    for (const auto& tok : SplitTokens(text)) ++counts[ToLower(tok)];
  }
  for (const char* name : kReservedNames) counts.erase(name);

  std::vector<std::pair<std::string, size_t>> ranked(counts.begin(),
                                                     counts.end());
  // counts is already in lexicographic order; a stable sort on frequency
  // keeps that as the tie-break.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens(kReservedNames, kReservedNames + kReservedCount);
  size_t room = max_size - kReservedCount;
  for (size_t i = 0; i < ranked.size() && i < room; ++i) {
    tokens.push_back(std::move(ranked[i].first));
  }
  return Vocab(std::move(tokens));
}

Vocab Vocab::FromTokens(std::vector<std::string> tokens) {
  return Vocab(std::move(tokens));
}

Vocab Vocab::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return Vocab(std::move(tokens));
}

void Vocab::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary file " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
  if (!out) throw DataError("failed writing vocabulary file " + path.string());
}

TokenId Vocab::Id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocab::Token(TokenId id) const {
  if (id < 0 || static_cast<size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("token id out of range");
  }
  return tokens_[id];
}

bool Vocab::Contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

bool IsTerminalPunct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':':
      return true;
    default:
      return false;
  }
}

bool IsPunctToken(std::string_view token) {
  return token.size() == 1 && IsTerminalPunct(token[0]);
}

std::vector<std::string> SplitTokens(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (start == i) break;
    std::string_view word = text.substr(start, i - start);
    size_t core = word.size();
    while (core > 0 && IsTerminalPunct(word[core - 1])) --core;
    if (core > 0) out.emplace_back(word.substr(0, core));
    for (size_t p = core; p < word.size(); ++p) out.emplace_back(1, word[p]);
  }
  return out;
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<TokenId> Tokenize(std::string_view text, const Vocab& vocab) {
  std::vector<TokenId> ids;
  for (const auto& tok : SplitTokens(text)) ids.push_back(vocab.Id(ToLower(tok)));
  return ids;
}

std::string JoinTokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty() && !IsPunctToken(t)) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string Detokenize(std::span<const TokenId> ids, const Vocab& vocab) {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (TokenId id : ids) tokens.push_back(vocab.Token(id));
  return JoinTokens(tokens);
}

size_t CountWords(std::span<const std::string> tokens) {
  return std::count_if(tokens.begin(), tokens.end(),
                       [](const std::string& t) { return !IsPunctToken(t); });
}

std::vector<Sentence> SplitSentences(std::string_view text) {
  std::vector<Sentence> out;
  auto emit = [&](std::string_view span) {
    span = Trim(span);
    auto tokens = SplitTokens(span);
    if (!tokens.empty()) out.push_back({std::string(span), std::move(tokens)});
  };
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == text.size() || IsSpace(text[i + 1]))) {
      emit(text.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  if (start < text.size()) emit(text.substr(start));
  return out;
}

InputSequence Prepare(std::span<const TokenId> tokens, size_t max_len) {
  if (max_len < 3) throw ConfigError("max_len must be at least 3");
  size_t keep = std::min(tokens.size(), max_len - 2);
  InputSequence seq;
  seq.original_count = tokens.size();
  seq.ids.reserve(keep + 2);
  seq.ids.push_back(kClsId);
  seq.ids.insert(seq.ids.end(), tokens.begin(), tokens.begin() + keep);
  seq.ids.push_back(kSepId);
  return seq;
}

}  // namespace lsscore
