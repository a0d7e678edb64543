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

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace lsscore::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t Lines(const std::string& s) { return static_cast<size_t>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "lsscore_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    pairs_ = (dir_ / "pairs.jsonl").string();
    weights_ = (dir_ / "model.bin").string();
    const fs::path config = dir_ / "train.json";
    std::ofstream(config) << R"({"epochs": 1, "learning_rate": 0.001, "vocab_size": 300,
        "encoder": {"layers": 1, "hidden": 16, "heads": 2, "ff": 32}})";
    ASSERT_EQ(Call({"synth-corpus", "--count", "24", "--seed", "3", "--out", pairs_}).code, 0);
    const auto r = Call({"train", "--pairs", pairs_, "--config", config.string(), "--out",
                         weights_, "--log", (dir_ / "log.jsonl").string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static fs::path dir_;
  static std::string pairs_, weights_;
};

fs::path CliTest::dir_;
std::string CliTest::pairs_, CliTest::weights_;

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Call({}).code, kUsage);
  EXPECT_EQ(Call({"frobnicate"}).code, kUsage);
  EXPECT_EQ(Call({"score"}).code, kUsage);
  EXPECT_EQ(Call({"score", "--weights", weights_}).code, kUsage);
  EXPECT_EQ(Call({"score", "--weights", weights_, "--doc", "x"}).code, kUsage);
}

TEST_F(CliTest, Help) {
  const auto r = Call({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("eval-corr"), std::string::npos);
}

TEST_F(CliTest, DataErrors) {
  const auto missing = Call({"gen-negatives", "--pairs", (dir_ / "nope.jsonl").string()});
  EXPECT_EQ(missing.code, kDataError);
  EXPECT_NE(missing.err.find("nope.jsonl"), std::string::npos);
  const fs::path bad = dir_ / "bad.jsonl";
  std::ofstream(bad) << "{\"id\":\"a\",\"reference\":\"r\"}\n";
  const auto r = Call({"build-vocab", "--corpus", bad.string(), "--out", (dir_ / "v").string()});
  EXPECT_EQ(r.code, kDataError);
  EXPECT_NE(r.err.find("line 1: missing field document"), std::string::npos);
  EXPECT_EQ(Call({"score", "--weights", pairs_, "--vocab", weights_ + ".vocab", "--doc", "a",
                  "--summary", "b"})
                .code,
            kDataError);
}

TEST_F(CliTest, TrainWroteArtifacts) {
  EXPECT_TRUE(fs::exists(weights_ + ".vocab"));
  EXPECT_EQ(Lines(Slurp(dir_ / "log.jsonl")), 1u);
  const auto r = Call({"inspect-weights", "--weights", weights_});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("head.output.bias"), std::string::npos);
}

TEST_F(CliTest, ScoreJson) {
  const auto r = Call({"score", "--weights", weights_, "--doc",
                       "The storm hit the town on Monday. Roads were closed.", "--summary",
                       "A storm closed roads."});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const double l = j.at("l_score"), s = j.at("s_score"), ls = j.at("ls_score");
  EXPECT_LE(l, 0.0);
  EXPECT_EQ(ls, 0.01 * l + s);

  const auto each = Call({"score", "--weights", weights_, "--pairs", pairs_});
  ASSERT_EQ(each.code, kOk) << each.err;
  EXPECT_EQ(Lines(each.out), 24u);
}

TEST_F(CliTest, NegativesAndVocab) {
  const auto r = Call({"gen-negatives", "--pairs", pairs_, "--seed", "4"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(Lines(r.out), 72u);
  EXPECT_EQ(r.out, Call({"gen-negatives", "--pairs", pairs_, "--seed", "4"}).out);
  const auto first = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_EQ(first.at("summary_id"), "synth-0");
  EXPECT_EQ(first.at("kind"), "delete");

  const fs::path vocab = dir_ / "small.vocab";
  ASSERT_EQ(Call({"build-vocab", "--corpus", pairs_, "--max-size", "40", "--out",
                  vocab.string()})
                .code,
            kOk);
  EXPECT_EQ(Lines(Slurp(vocab)), 40u);
}

TEST_F(CliTest, EvalCorr) {
  const std::string rated = (dir_ / "rated.jsonl").string();
  ASSERT_EQ(Call({"synth-rated", "--pairs", pairs_, "--out", rated}).code, kOk);
  const std::string csv = (dir_ / "corr.csv").string();
  const auto r = Call({"eval-corr", "--rated", rated, "--pairs", pairs_, "--weights", weights_,
                       "--out", csv});
  ASSERT_EQ(r.code, kOk) << r.err;
  const std::string table = Slurp(csv);
  EXPECT_EQ(table.rfind("metric,dimension,rho,n\n", 0), 0u);
  EXPECT_EQ(Lines(table), 6u);
  EXPECT_NE(table.find("ls,quality,"), std::string::npos);
  EXPECT_NE(table.find(",96\n"), std::string::npos);

  const auto rouge_only = Call({"eval-corr", "--rated", rated, "--pairs", pairs_, "--metrics",
                                "rouge1,rouge2"});
  EXPECT_EQ(rouge_only.code, kOk) << rouge_only.err;
  EXPECT_EQ(Lines(rouge_only.out), 3u);
  EXPECT_EQ(Call({"eval-corr", "--rated", rated, "--metrics", "ls"}).code, kDataError);
}

}  // namespace
}  // namespace lsscore::cli
