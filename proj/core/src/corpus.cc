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

#include "lsscore/corpus.h"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "lsscore/error.h"
#include "lsscore/text.h"

namespace lsscore {
namespace {

using nlohmann::json;

std::string Where(size_t line) { return "line " + std::to_string(line) + ": "; }

std::string StringField(const json& j, const char* key, size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(Where(line) + "missing field " + key);
  if (!it->is_string()) throw DataError(Where(line) + "field " + key + " must be a string");
  return it->get<std::string>();
}

// Calls fn(json object, line number) for every non-blank line.
template <typename Fn>
void ForEachRecord(std::istream& in, Fn&& fn) {
  std::string text;
  size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DataError(Where(line) + "malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError(Where(line) + "record must be a JSON object");
    fn(j, line);
  }
}

void CheckUnique(std::set<std::string>& seen, const std::string& id, size_t line) {
  if (!seen.insert(id).second) throw DataError(Where(line) + "duplicate id " + id);
}

std::ifstream Open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<DocRefPair> ReadPairs(std::istream& in) {
  std::vector<DocRefPair> out;
  std::set<std::string> seen;
  ForEachRecord(in, [&](const json& j, size_t line) {
    DocRefPair p;
    p.id = StringField(j, "id", line);
    p.document = StringField(j, "document", line);
    p.reference = StringField(j, "reference", line);
    if (p.document.empty()) throw DataError(Where(line) + "empty document");
    if (p.reference.empty()) throw DataError(Where(line) + "empty reference");
    CheckUnique(seen, p.id, line);
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<RatedSummary> ReadRated(std::istream& in) {
  std::vector<RatedSummary> out;
  std::set<std::string> seen;
  ForEachRecord(in, [&](const json& j, size_t line) {
    RatedSummary r;
    r.id = StringField(j, "id", line);
    r.doc_id = StringField(j, "doc_id", line);
    r.system = StringField(j, "system", line);
    r.summary = StringField(j, "summary", line);
    auto it = j.find("ratings");
    if (it == j.end()) throw DataError(Where(line) + "missing field ratings");
    if (!it->is_object() || it->empty()) {
      throw DataError(Where(line) + "ratings must be a non-empty object");
    }
    for (const auto& [dim, value] : it->items()) {
      if (!value.is_number() || !std::isfinite(value.get<double>())) {
        throw DataError(Where(line) + "rating " + dim + " must be a finite number");
      }
      r.ratings[dim] = value.get<double>();
    }
    CheckUnique(seen, r.id, line);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<DocRefPair> LoadPairs(const std::filesystem::path& path) {
  auto in = Open(path);
  return ReadPairs(in);
}

std::vector<RatedSummary> LoadRated(const std::filesystem::path& path) {
  auto in = Open(path);
  return ReadRated(in);
}

void WritePairs(std::ostream& out, std::span<const DocRefPair> pairs) {
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["document"] = p.document;
    j["reference"] = p.reference;
    out << j.dump() << '\n';
  }
}

void WriteRated(std::ostream& out, std::span<const RatedSummary> rated) {
  for (const auto& r : rated) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["doc_id"] = r.doc_id;
    j["system"] = r.system;
    j["summary"] = r.summary;
    j["ratings"] = r.ratings;
    out << j.dump() << '\n';
  }
}

CorpusStats ComputeStats(std::span<const DocRefPair> pairs) {
  CorpusStats s;
  s.pairs = pairs.size();
  if (pairs.empty()) return s;
  for (const auto& p : pairs) {
    s.doc_sentences += static_cast<double>(SplitSentences(p.document).size());
    s.doc_words += static_cast<double>(CountWords(SplitTokens(p.document)));
    s.ref_sentences += static_cast<double>(SplitSentences(p.reference).size());
    s.ref_words += static_cast<double>(CountWords(SplitTokens(p.reference)));
  }
  const double n = static_cast<double>(pairs.size());
  s.doc_sentences /= n;
  s.doc_words /= n;
  s.ref_sentences /= n;
  s.ref_words /= n;
  return s;
}

}  // namespace lsscore
