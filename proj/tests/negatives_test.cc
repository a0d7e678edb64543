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

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "lsscore/synthetic.h"
#include "negative_invariants.h"
#include "oracles.h"

namespace lsscore {
namespace {

using testing::NaiveTokens;
using testing::NaiveWordCount;

constexpr char kDocument[] =
    "Kristina Patrick from Alaska filmed her German Shepherd Pakak performing a trick. "
    "The dog is three years old. Footage shows the pup taking the ball from her mouth. "
    "The video has been viewed many times. She then lowers it back down.";

TEST(KindTest, NamesRoundTrip) {
  for (NegativeKind k : kNegativeKinds) EXPECT_EQ(ParseKind(KindName(k)), k);
  EXPECT_EQ(KindName(NegativeKind::kAddRedundant), "add_redundant");
  EXPECT_FALSE(ParseKind("swap"));
}

TEST(DeleteTest, Counts) {
  EXPECT_EQ(DeletionCount(10), 2u);
  EXPECT_EQ(DeletionCount(3), 1u);
  EXPECT_EQ(DeletionCount(2), 1u);
  EXPECT_EQ(DeletionCount(49), 10u);
  EXPECT_EQ(DeletionCount(12), 2u);
  EXPECT_EQ(DeletionCount(13), 3u);
  for (size_t w = 1; w < 300; ++w) EXPECT_EQ(DeletionCount(w), testing::ExpectedDeletions(w));
}

TEST(DeleteTest, TenWords) {
  const std::string s = "one two three four five six seven eight nine ten.";
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto neg = DeleteWords(s, seed);
    EXPECT_EQ(NaiveWordCount(neg.text), 8u);
    EXPECT_TRUE(testing::CheckDelete(s, neg.text).empty());
    EXPECT_EQ(neg.text.back(), '.');
    EXPECT_EQ(neg.kind, NegativeKind::kDelete);
    EXPECT_EQ(neg.seed, seed);
  }
}

TEST(DeleteTest, ThreeWordsLoseOne) {
  const auto neg = DeleteWords("The cat sat.", 4);
  EXPECT_EQ(NaiveWordCount(neg.text), 2u);
}

TEST(DeleteTest, PetTrickSummary) {
  const std::string s = testing::kPetTrickSummary;
  const auto neg = DeleteWords(s, 11);
  EXPECT_EQ(NaiveWordCount(neg.text), 39u);
  EXPECT_TRUE(testing::CheckDelete(s, neg.text).empty());
}

TEST(DeleteTest, TooShort) {
  EXPECT_THROW(DeleteWords("Hello.", 1), NegativeError);
  try {
    DeleteWords("", 1);
    FAIL();
  } catch (const NegativeError& e) {
    EXPECT_EQ(e.kind(), NegativeKind::kDelete);
    EXPECT_EQ(std::string(e.what()).rfind("delete: ", 0), 0u);
  }
}

TEST(DeleteTest, SeedDeterminism) {
  const std::string s = testing::kPetTrickSummary;
  EXPECT_EQ(DeleteWords(s, 5).text, DeleteWords(s, 5).text);
  std::set<std::string> outs;
  for (uint64_t seed = 0; seed < 10; ++seed) outs.insert(DeleteWords(s, seed).text);
  EXPECT_GT(outs.size(), 5u);
}

TEST(UnigramF1Test, MatchesOracle) {
  const std::vector<std::string> texts = {"The cat sat.", "the cat sat on the mat.",
                                          "Dogs bark.", "The the the."};
  for (const auto& a : texts) {
    for (const auto& b : texts) {
      EXPECT_NEAR(UnigramF1(SplitTokens(a), SplitTokens(b)), testing::NaiveUnigramF1(a, b),
                  1e-15)
          << a << " | " << b;
    }
  }
}

TEST(MostSimilarTest, LowestIndexOnTies) {
  const auto sum = SplitSentences("A b c.");
  const auto doc = SplitSentences("x y. a b c. a b c. z.");
  EXPECT_EQ(MostSimilarSentences(sum, doc), (std::vector<size_t>{1}));
}

TEST(AddRedundantTest, ForcedPool) {
  const std::string summary = "The dog plays ball.";
  const std::string doc = "The dog plays ball in the yard. Rain fell in the city.";
  for (uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_EQ(AddRedundant(summary, doc, seed).text,
              "The dog plays ball. Rain fell in the city.");
  }
}

TEST(AddRedundantTest, TrailingWhitespaceTrimmed) {
  EXPECT_EQ(AddRedundant("The dog plays ball.  ", "The dog plays. Cats sleep.", 0).text,
            "The dog plays ball. Cats sleep.");
}

TEST(AddRedundantTest, InvariantOnDocument) {
  const std::string s = "Footage shows the pup taking the ball.";
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const auto neg = AddRedundant(s, kDocument, seed);
    EXPECT_TRUE(testing::CheckAddRedundant(s, kDocument, neg.text).empty()) << neg.text;
    EXPECT_EQ(testing::NaiveSentences(neg.text).size(), 2u);
  }
}

TEST(AddRedundantTest, NoCandidates) {
  EXPECT_THROW(AddRedundant("The dog plays.", "The dog plays ball.", 0), NegativeError);
  EXPECT_THROW(AddRedundant("The dog.", "", 0), NegativeError);
  EXPECT_THROW(AddRedundant("", kDocument, 0), NegativeError);
}

TEST(ShuffleTest, TwoWords) {
  for (uint64_t seed = 0; seed < 10; ++seed) EXPECT_EQ(Shuffle("a b.", seed).text, "b a.");
}

TEST(ShuffleTest, PreservesMultiset) {
  const std::string s = testing::kPetTrickSummary;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto neg = Shuffle(s, seed);
    EXPECT_TRUE(testing::CheckShuffle(s, neg.text).empty()) << neg.text;
    EXPECT_EQ(NaiveTokens(neg.text).size(), 52u);
  }
}

TEST(ShuffleTest, UsesBothModes) {
  // Sentence mode keeps every sentence intact; word mode keeps none.
  const std::string s = "Alpha beta gamma delta. Epsilon zeta eta theta. Iota kappa lambda mu.";
  const auto sents = testing::NaiveSentences(s);
  size_t sentence_mode = 0, word_mode = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const auto out = testing::NaiveSentences(Shuffle(s, seed).text);
    ASSERT_EQ(out.size(), 3u);
    if (std::is_permutation(out.begin(), out.end(), sents.begin())) {
      ++sentence_mode;
    } else {
      ++word_mode;
      // Sentence-final marks stay at the end of each sentence.
      for (const auto& o : out) EXPECT_EQ(o.back(), '.');
    }
  }
  EXPECT_GT(sentence_mode, 20u);
  EXPECT_GT(word_mode, 20u);
}

TEST(ShuffleTest, Unshufflable) {
  EXPECT_THROW(Shuffle("Hi.", 0), NegativeError);
  EXPECT_THROW(Shuffle("a a a.", 0), NegativeError);
}

TEST(GenerateSetTest, DeterministicAndTagged) {
  const std::string s = "Footage shows the pup taking the ball. She then lowers it.";
  const auto a = GenerateSet(s, kDocument, 42, "x1");
  const auto b = GenerateSet(s, kDocument, 42, "x1");
  for (NegativeKind k : kNegativeKinds) {
    EXPECT_EQ(a[k].text, b[k].text);
    EXPECT_EQ(a[k].seed, b[k].seed);
    EXPECT_EQ(a[k].kind, k);
    EXPECT_EQ(a[k].source_id, "x1");
  }
  EXPECT_NE(a[NegativeKind::kDelete].seed, a[NegativeKind::kShuffle].seed);
  EXPECT_TRUE(testing::CheckNegativeSet(s, kDocument, a).empty());
}

TEST(GenerateSetTest, SyntheticCorpusInvariants) {
  const auto pairs = GenerateSyntheticCorpus(60, 3);
  size_t checked = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    for (uint64_t seed = 0; seed < 5; ++seed) {
      const auto set = GenerateSet(pairs[i].reference, pairs[i].document, seed * 1000 + i);
      const auto errors = testing::CheckNegativeSet(pairs[i].reference, pairs[i].document, set);
      EXPECT_TRUE(errors.empty()) << pairs[i].id << ": " << errors.front();
      ++checked;
    }
  }
  EXPECT_EQ(checked, 300u);
}

}  // namespace
}  // namespace lsscore
