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

#include "lsscore/encoder.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "lsscore/error.h"
#include "oracles.h"

namespace lsscore {
namespace {

EncoderConfig TinyConfig(size_t vocab = 20) {
  EncoderConfig c;
  c.layers = 2;
  c.hidden = 8;
  c.heads = 2;
  c.ff = 16;
  c.max_positions = 16;
  c.vocab_size = vocab;
  return c;
}

InputSequence Seq(std::vector<TokenId> content) { return Prepare(content); }

template <typename T>
Matrix<T> RandomMatrix(Eigen::Index r, Eigen::Index c, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix<T> m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(u(rng));
  return m;
}

TEST(EncoderConfigTest, Validation) {
  EncoderConfig c = TinyConfig();
  EXPECT_NO_THROW(c.Validate());
  c.heads = 3;
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_THROW(InitParams<float>(c, 1), ConfigError);
}

TEST(EncoderConfigTest, JsonRoundTripAndStrictness) {
  EncoderConfig c = TinyConfig();
  c.dropout = 0.125;
  EXPECT_EQ(EncoderConfig::FromJson(c.ToJson()), c);
  EXPECT_THROW(EncoderConfig::FromJson(R"({"layers":2})"), ConfigError);
  std::string extra = c.ToJson();
  extra.insert(extra.size() - 1, R"(,"bogus":1)");
  EXPECT_THROW(EncoderConfig::FromJson(extra), ConfigError);
}

TEST(InitTest, DeterministicPerSeed) {
  auto a = InitParams<float>(TinyConfig(), 42);
  auto b = InitParams<float>(TinyConfig(), 42);
  auto c = InitParams<float>(TinyConfig(), 43);
  std::vector<float> va, vb, vc;
  auto flat = [](const EncoderParams<float>& p, std::vector<float>& out) {
    ForEachTensor(p, [&](const std::string&, const Matrix<float>& m) {
      out.insert(out.end(), m.data(), m.data() + m.size());
    });
  };
  flat(a, va);
  flat(b, vb);
  flat(c, vc);
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
}

TEST(InitTest, NormGainsOneBiasesZero) {
  auto p = InitParams<float>(TinyConfig(), 1);
  EXPECT_TRUE((p.embed_norm_gain.array() == 1.0f).all());
  for (const auto& L : p.layers) {
    EXPECT_TRUE((L.attn_norm_gain.array() == 1.0f).all());
    EXPECT_TRUE((L.ff_norm_gain.array() == 1.0f).all());
    EXPECT_TRUE((L.query_bias.array() == 0.0f).all());
    EXPECT_TRUE((L.ff_in_bias.array() == 0.0f).all());
  }
  EXPECT_TRUE((p.head_output_bias.array() == 0.0f).all());
}

TEST(InitTest, TruncatedNormalStatistics) {
  EncoderConfig c = TinyConfig(800);
  c.hidden = 128;
  c.heads = 4;
  auto p = InitParams<double>(c, 2024);
  const auto& e = p.token_embeddings;
  ASSERT_GE(e.size(), 100000);
  EXPECT_NEAR(e.mean(), 0.0, 0.005);
  EXPECT_LE(e.cwiseAbs().maxCoeff(), 0.04);
  // Std of N(0, 0.02^2) truncated at 2 sigma is about 0.0176.
  const double sd = std::sqrt((e.array() - e.mean()).square().mean());
  EXPECT_NEAR(sd, 0.0176, 0.001);
}

TEST(ForwardTest, ShapeAndFinite) {
  EncoderConfig c = TinyConfig(50);
  c.hidden = 128;
  c.heads = 4;
  c.ff = 64;
  auto p = InitParams<float>(c, 3);
  auto h = Forward(p, Seq({5, 6, 7}));
  EXPECT_EQ(h.rows(), 5);
  EXPECT_EQ(h.cols(), 128);
  EXPECT_TRUE(h.allFinite());
}

TEST(ForwardTest, RejectsOverLength) {
  auto p = InitParams<float>(TinyConfig(), 3);
  std::vector<TokenId> content(20, 6);
  EXPECT_THROW(Forward(p, Seq(content)), ConfigError);
  EXPECT_THROW(Forward(p, Seq({99})), ConfigError);
}

TEST(ForwardTest, Deterministic) {
  auto p = InitParams<float>(TinyConfig(), 9);
  auto a = Forward(p, Seq({5, 9, 11, 6}));
  auto b = Forward(p, Seq({5, 9, 11, 6}));
  EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(float) * a.size()), 0);
}

TEST(ForwardTest, PermutationEquivariantWithoutPositions) {
  auto p = InitParams<double>(TinyConfig(), 5);
  p.position_embeddings.setZero();
  auto a = Forward(p, Seq({7, 8, 9}));
  auto b = Forward(p, Seq({8, 7, 9}));
  auto rows = [](const Matrix<double>& m) {
    std::vector<std::vector<double>> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out.emplace_back(m.row(i).data(), m.row(i).data() + m.cols());
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto ra = rows(a), rb = rows(b);
  ASSERT_EQ(ra.size(), rb.size());
  for (size_t i = 0; i < ra.size(); ++i) {
    for (size_t j = 0; j < ra[i].size(); ++j) EXPECT_NEAR(ra[i][j], rb[i][j], 1e-12);
  }
  // And the swapped tokens swap rows.
  EXPECT_NEAR((a.row(1) - b.row(2)).norm(), 0.0, 1e-12);
}

TEST(ForwardTest, DistinctInputsGiveDistinctCls) {
  auto p = InitParams<float>(TinyConfig(40), 11);
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> tok(5, 39), len(1, 8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TokenId> x(len(rng)), y;
    for (auto& t : x) t = tok(rng);
    do {
      y.assign(len(rng), 0);
      for (auto& t : y) t = tok(rng);
    } while (y == x);
    auto hx = Forward(p, Seq(x));
    auto hy = Forward(p, Seq(y));
    EXPECT_GT((hx.row(0) - hy.row(0)).norm(), 0.0f) << trial;
  }
}

TEST(HeadTest, ZeroOutputWeightsGiveUniform) {
  EncoderConfig c = TinyConfig(25);
  auto p = InitParams<double>(c, 4);
  p.head_output.setZero();
  p.head_output_bias.setZero();
  auto probs = MlmProbs(p, Forward(p, Seq({5, 6})));
  for (Eigen::Index i = 0; i < probs.size(); ++i) EXPECT_DOUBLE_EQ(probs.data()[i], 1.0 / 25);
}

TEST(HeadTest, RowsSumToOne) {
  auto p = InitParams<float>(TinyConfig(30), 8);
  std::mt19937 rng(2);
  // Inflate the head so the distribution is far from uniform.
  p.head_output = RandomMatrix<float>(8, 30, rng) * 10.0f;
  auto probs = MlmProbs(p, Forward(p, Seq({5, 6, 7, 8, 9})));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    EXPECT_NEAR(probs.row(i).sum(), 1.0f, 1e-6);
    EXPECT_GT(probs.row(i).minCoeff(), 0.0f);
    EXPECT_LT(probs.row(i).maxCoeff(), 1.0f);
  }
}

// Two positions, K=2, V=5, hand-specified weights; the expected rows come
// from plain scalar arithmetic.
TEST(HeadTest, HandComputedFixture) {
  EncoderConfig c;
  c.layers = 1;
  c.hidden = 2;
  c.heads = 1;
  c.ff = 2;
  c.max_positions = 4;
  c.vocab_size = 5;
  auto p = EncoderParams<double>::Zeros(c);
  p.head_transform << 1, 2, 0, 1;
  p.head_transform_bias << 0, 0.5;
  p.head_output << 1, 0, -1, 0.5, 2, 0, 1, 1, -0.5, 0;
  p.head_output_bias << 0.1, 0, 0, 0, -0.1;
  Matrix<double> h(2, 2);
  h << 1, 0, 0.5, -1;

  const double W0[2][2] = {{1, 2}, {0, 1}}, b0[2] = {0, 0.5};
  const double W1[2][5] = {{1, 0, -1, 0.5, 2}, {0, 1, 1, -0.5, 0}};
  const double b1[5] = {0.1, 0, 0, 0, -0.1};
  const double H[2][2] = {{1, 0}, {0.5, -1}};
  auto gelu = [](double x) { return 0.5 * x * (1 + std::erf(x / std::sqrt(2.0))); };

  auto probs = MlmProbs(p, h);
  for (int r = 0; r < 2; ++r) {
    double u[2];
    for (int k = 0; k < 2; ++k) u[k] = gelu(H[r][0] * W0[0][k] + H[r][1] * W0[1][k] + b0[k]);
    double z[5], total = 0;
    for (int v = 0; v < 5; ++v) {
      z[v] = std::exp(u[0] * W1[0][v] + u[1] * W1[1][v] + b1[v]);
      total += z[v];
    }
    for (int v = 0; v < 5; ++v) EXPECT_NEAR(probs(r, v), z[v] / total, 1e-14) << r << "," << v;
  }
}

TEST(BackwardTest, RequiresForward) {
  auto p = InitParams<double>(TinyConfig(), 1);
  auto g = EncoderParams<double>::Zeros(p.config);
  ForwardPass<double> empty;
  EXPECT_THROW(empty.Backward(Matrix<double>(), Matrix<double>(), g), StateError);
  EXPECT_THROW(empty.hidden(), StateError);
}

TEST(BackwardTest, UnusedEmbeddingsGetZeroGradient) {
  auto p = InitParams<double>(TinyConfig(), 1);
  auto g = EncoderParams<double>::Zeros(p.config);
  ForwardPass<double> pass(p, Seq({5, 6, 7}));
  std::mt19937 rng(4);
  pass.log_probs();
  pass.Backward(RandomMatrix<double>(5, 8, rng), RandomMatrix<double>(5, 20, rng), g);
  EXPECT_EQ(g.token_embeddings.row(kPadId).norm(), 0.0);
  EXPECT_EQ(g.token_embeddings.row(10).norm(), 0.0);
  EXPECT_EQ(g.position_embeddings.bottomRows(16 - 5).norm(), 0.0);
  EXPECT_GT(g.token_embeddings.row(5).norm(), 0.0);
}

// Central differences on a random linear functional of the hidden states and
// log-probabilities, in double precision, against every parameter.
TEST(BackwardTest, MatchesFiniteDifferences) {
  EncoderConfig c = TinyConfig(20);
  auto p = InitParams<double>(c, 17);
  // Larger weights than the init scale exercise the nonlinearities.
  std::mt19937 rng(5);
  ForEachTensor(p, [&](const std::string&, Matrix<double>& m) {
    m += RandomMatrix<double>(m.rows(), m.cols(), rng) * 0.3;
  });
  const InputSequence input = Seq({5, 9, 13, 6});  // N = 6
  const Matrix<double> wh = RandomMatrix<double>(6, 8, rng);
  const Matrix<double> wl = RandomMatrix<double>(6, 20, rng);

  auto loss = [&](const EncoderParams<double>& q) {
    ForwardPass<double> f(q, input);
    return (f.hidden().array() * wh.array()).sum() + (f.log_probs().array() * wl.array()).sum();
  };

  auto g = EncoderParams<double>::Zeros(c);
  ForwardPass<double> pass(p, input);
  pass.log_probs();
  pass.Backward(wh, wl, g);

  std::vector<Matrix<double>*> grads;
  ForEachTensor(g, [&](const std::string&, Matrix<double>& m) { grads.push_back(&m); });
  const double eps = 1e-4;
  size_t t = 0, checked = 0;
  double worst = 0;
  ForEachTensor(p, [&](const std::string& name, Matrix<double>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      m.data()[i] = saved + eps;
      const double up = loss(p);
      m.data()[i] = saved - eps;
      const double down = loss(p);
      m.data()[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double err = testing::RelativeError(grads[t]->data()[i], numeric);
      worst = std::max(worst, err);
      EXPECT_LT(err, 1e-4) << name << "[" << i << "] analytic=" << grads[t]->data()[i]
                           << " numeric=" << numeric;
      ++checked;
    }
    ++t;
  });
  EXPECT_EQ(checked, p.ParameterCount());
  RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(WeightsIoTest, RoundTripIsBitwise) {
  auto p = InitParams<float>(TinyConfig(), 21);
  auto path = std::filesystem::temp_directory_path() / "lsscore_weights_rt.bin";
  SaveParams(p, path);
  EXPECT_EQ(std::filesystem::file_size(path), kWeightsHeaderBytes + 4 * p.ParameterCount());
  auto q = LoadParams(path, p.config);
  EXPECT_EQ(q.config, p.config);
  std::vector<const Matrix<float>*> a;
  ForEachTensor(p, [&](const std::string&, const Matrix<float>& m) { a.push_back(&m); });
  size_t i = 0;
  ForEachTensor(q, [&](const std::string&, const Matrix<float>& m) {
    ASSERT_EQ(m.rows(), a[i]->rows());
    EXPECT_EQ(std::memcmp(m.data(), a[i]->data(), sizeof(float) * m.size()), 0);
    ++i;
  });
  std::filesystem::remove(path);
}

TEST(WeightsIoTest, FileSizeFromConfig) {
  EncoderConfig c = TinyConfig(20);
  // Hand count for K=8, F=16, V=20, P=16, 2 layers.
  const size_t K = 8, F = 16, V = 20, P = 16;
  const size_t per_layer = 4 * (K * K + K) + 2 * K + (K * F + F) + (F * K + K) + 2 * K;
  const size_t total = V * K + P * K + 2 * K + 2 * per_layer + (K * K + K) + (K * V + V);
  auto p = InitParams<float>(c, 1);
  EXPECT_EQ(p.ParameterCount(), total);
  auto path = std::filesystem::temp_directory_path() / "lsscore_weights_size.bin";
  SaveParams(p, path);
  EXPECT_EQ(std::filesystem::file_size(path), 36 + 4 * total);
  std::filesystem::remove(path);
}

TEST(WeightsIoTest, DistinctErrors) {
  auto p = InitParams<float>(TinyConfig(), 21);
  auto dir = std::filesystem::temp_directory_path();
  auto good = dir / "lsscore_weights_good.bin";
  SaveParams(p, good);
  std::ifstream in(good, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  auto write = [&](const std::filesystem::path& path, const std::string& b) {
    std::ofstream out(path, std::ios::binary);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
  };
  auto kind_of = [](const std::filesystem::path& path, const EncoderConfig* expected) {
    try {
      if (expected) {
        LoadParams(path, *expected);
      } else {
        LoadParams(path);
      }
    } catch (const WeightsLoadError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error for " << path;
    return WeightsLoadError::Kind::kIo;
  };

  auto bad = dir / "lsscore_weights_bad.bin";
  std::string corrupted = bytes;
  corrupted[0] = 'X';
  write(bad, corrupted);
  EXPECT_EQ(kind_of(bad, nullptr), WeightsLoadError::Kind::kBadMagic);
  try {
    LoadParams(bad);
  } catch (const WeightsLoadError& e) {
    EXPECT_NE(std::string(e.what()).find("bad magic"), std::string::npos);
  }

  write(bad, bytes.substr(0, bytes.size() - 3));
  EXPECT_EQ(kind_of(bad, nullptr), WeightsLoadError::Kind::kTruncated);
  write(bad, bytes.substr(0, 20));
  EXPECT_EQ(kind_of(bad, nullptr), WeightsLoadError::Kind::kTruncated);

  write(bad, bytes + "xxxx");
  EXPECT_EQ(kind_of(bad, nullptr), WeightsLoadError::Kind::kShapeMismatch);
  EncoderConfig other = p.config;
  other.vocab_size = 21;
  EXPECT_EQ(kind_of(good, &other), WeightsLoadError::Kind::kShapeMismatch);

  EXPECT_EQ(kind_of(dir / "lsscore_no_such_file.bin", nullptr), WeightsLoadError::Kind::kIo);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

}  // namespace
}  // namespace lsscore
