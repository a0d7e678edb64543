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
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "lsscore/error.h"

namespace lsscore {
namespace {

constexpr double kInitStddev = 0.02;
constexpr double kNormEpsilon = 1e-12;

template <typename T>
using Column = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
T Gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x / std::sqrt(T(2))));
}

template <typename T>
T GeluGrad(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x / std::sqrt(T(2))));
  const T pdf = std::exp(T(-0.5) * x * x) / std::sqrt(T(2) * std::numbers::pi_v<T>);
  return cdf + x * pdf;
}

template <typename T>
void AddBias(Matrix<T>& m, const Matrix<T>& bias) {
  m.rowwise() += bias.row(0);
}

template <typename T>
Matrix<T> Affine(const Matrix<T>& x, const Matrix<T>& w, const Matrix<T>& b) {
  Matrix<T> out(x.rows(), w.cols());
  out.noalias() = x * w;
  AddBias(out, b);
  return out;
}

// Post-norm layer normalization over each row.
template <typename T, typename Cache>
Matrix<T> NormForward(const Matrix<T>& x, const Matrix<T>& gain,
                      const Matrix<T>& bias, Cache& cache) {
  const Eigen::Index n = x.rows(), k = x.cols();
  cache.normalized.resize(n, k);
  cache.rstd.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const T mean = x.row(i).mean();
    const T var = (x.row(i).array() - mean).square().mean();
    const T rstd = T(1) / std::sqrt(var + T(kNormEpsilon));
    cache.rstd(i) = rstd;
    cache.normalized.row(i) = (x.row(i).array() - mean) * rstd;
  }
  Matrix<T> y = cache.normalized.array().rowwise() * gain.row(0).array();
  AddBias(y, bias);
  return y;
}

template <typename T, typename Cache>
Matrix<T> NormBackward(const Matrix<T>& dy, const Matrix<T>& gain,
                       const Cache& cache, Matrix<T>& d_gain, Matrix<T>& d_bias) {
  d_gain += (dy.array() * cache.normalized.array()).colwise().sum().matrix();
  d_bias += dy.colwise().sum();
  Matrix<T> dxhat = dy.array().rowwise() * gain.row(0).array();
  Matrix<T> dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const T mean_d = dxhat.row(i).mean();
    const T mean_dx = (dxhat.row(i).array() * cache.normalized.row(i).array()).mean();
    dx.row(i) = cache.rstd(i) *
                (dxhat.row(i).array() - mean_d - cache.normalized.row(i).array() * mean_dx);
  }
  return dx;
}

template <typename T>
Matrix<T> DropoutMask(Eigen::Index rows, Eigen::Index cols, double rate, Rng* rng) {
  if (rng == nullptr || rate <= 0.0) return {};
  std::bernoulli_distribution keep(1.0 - rate);
  const T scale = T(1.0 / (1.0 - rate));
  Matrix<T> mask(rows, cols);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(*rng) ? scale : T(0);
  }
  return mask;
}

template <typename T>
void ApplyMask(Matrix<T>& m, const Matrix<T>& mask) {
  if (mask.size() != 0) m.array() *= mask.array();
}

template <typename T>
Matrix<T> ZeroMatrix(size_t rows, size_t cols) {
  return Matrix<T>::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

template <typename T>
void FillTruncatedNormal(Matrix<T>& m, Rng& rng) {
  std::normal_distribution<double> normal(0.0, kInitStddev);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double x;
    do {
      x = normal(rng);
    } while (std::abs(x) > 2 * kInitStddev);
    m.data()[i] = static_cast<T>(x);
  }
}

template <typename T>
Matrix<T> LogSoftmaxRows(const Matrix<T>& logits) {
  Matrix<T> out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const T mx = logits.row(i).maxCoeff();
    const T lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

}  // namespace

void EncoderConfig::Validate() const {
  if (layers == 0) throw ConfigError("layers must be positive");
  if (hidden == 0) throw ConfigError("hidden size must be positive");
  if (heads == 0) throw ConfigError("heads must be positive");
  if (hidden % heads != 0) {
    throw ConfigError("hidden size " + std::to_string(hidden) +
                      " is not divisible by heads " + std::to_string(heads));
  }
  if (ff == 0) throw ConfigError("feed-forward size must be positive");
  if (max_positions < 3) throw ConfigError("max_positions must be at least 3");
  if (vocab_size < kReservedCount) throw ConfigError("vocab_size must be at least 5");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
}

std::string EncoderConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["layers"] = layers;
  j["hidden"] = hidden;
  j["heads"] = heads;
  j["ff"] = ff;
  j["max_positions"] = max_positions;
  j["vocab_size"] = vocab_size;
  j["dropout"] = dropout;
  return j.dump();
}

EncoderConfig EncoderConfig::FromJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("encoder config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("encoder config must be a JSON object");
  static const char* kFields[] = {"layers", "hidden", "heads", "ff",
                                  "max_positions", "vocab_size", "dropout"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kFields), std::end(kFields), key) == std::end(kFields)) {
      throw ConfigError("encoder config: unknown field " + key);
    }
  }
  auto count = [&](const char* key) -> size_t {
    if (!j.contains(key)) throw ConfigError(std::string("encoder config: missing field ") + key);
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(std::string("encoder config: ") + key + " must be a non-negative integer");
    }
    return v.get<size_t>();
  };
  EncoderConfig c;
  c.layers = count("layers");
  c.hidden = count("hidden");
  c.heads = count("heads");
  c.ff = count("ff");
  c.max_positions = count("max_positions");
  c.vocab_size = count("vocab_size");
  if (!j.contains("dropout") || !j.at("dropout").is_number()) {
    throw ConfigError("encoder config: missing field dropout");
  }
  c.dropout = j.at("dropout").get<double>();
  c.Validate();
  return c;
}

template <typename T>
EncoderParams<T> EncoderParams<T>::Zeros(const EncoderConfig& c) {
  c.Validate();
  const size_t K = c.hidden, V = c.vocab_size, F = c.ff;
  EncoderParams<T> p;
  p.config = c;
  p.token_embeddings = ZeroMatrix<T>(V, K);
  p.position_embeddings = ZeroMatrix<T>(c.max_positions, K);
  p.embed_norm_gain = ZeroMatrix<T>(1, K);
  p.embed_norm_bias = ZeroMatrix<T>(1, K);
  p.layers.resize(c.layers);
  for (auto& L : p.layers) {
    for (Matrix<T>* w : {&L.query, &L.key, &L.value, &L.attn_out}) *w = ZeroMatrix<T>(K, K);
    for (Matrix<T>* b : {&L.query_bias, &L.key_bias, &L.value_bias, &L.attn_out_bias,
                         &L.attn_norm_gain, &L.attn_norm_bias, &L.ff_out_bias,
                         &L.ff_norm_gain, &L.ff_norm_bias}) {
      *b = ZeroMatrix<T>(1, K);
    }
    L.ff_in = ZeroMatrix<T>(K, F);
    L.ff_in_bias = ZeroMatrix<T>(1, F);
    L.ff_out = ZeroMatrix<T>(F, K);
  }
  p.head_transform = ZeroMatrix<T>(K, K);
  p.head_transform_bias = ZeroMatrix<T>(1, K);
  p.head_output = ZeroMatrix<T>(K, V);
  p.head_output_bias = ZeroMatrix<T>(1, V);
  return p;
}

template <typename T>
size_t EncoderParams<T>::ParameterCount() const {
  size_t n = 0;
  ForEachTensor(*this, [&](const std::string&, const Matrix<T>& m) { n += m.size(); });
  return n;
}

template <typename T>
bool EncoderParams<T>::AllFinite() const {
  bool ok = true;
  ForEachTensor(*this, [&](const std::string&, const Matrix<T>& m) {
    ok = ok && m.allFinite();
  });
  return ok;
}

template <typename T>
EncoderParams<T> InitParams(const EncoderConfig& config, uint64_t seed) {
  EncoderParams<T> p = EncoderParams<T>::Zeros(config);
  Rng rng(seed);
  FillTruncatedNormal(p.token_embeddings, rng);
  FillTruncatedNormal(p.position_embeddings, rng);
  p.embed_norm_gain.setOnes();
  for (auto& L : p.layers) {
    FillTruncatedNormal(L.query, rng);
    FillTruncatedNormal(L.key, rng);
    FillTruncatedNormal(L.value, rng);
    FillTruncatedNormal(L.attn_out, rng);
    L.attn_norm_gain.setOnes();
    FillTruncatedNormal(L.ff_in, rng);
    FillTruncatedNormal(L.ff_out, rng);
    L.ff_norm_gain.setOnes();
  }
  FillTruncatedNormal(p.head_transform, rng);
  FillTruncatedNormal(p.head_output, rng);
  return p;
}

template <typename T>
Matrix<T> HeadLogits(const EncoderParams<T>& params, const HiddenStates<T>& hidden) {
  if (static_cast<size_t>(hidden.cols()) != params.config.hidden) {
    throw ConfigError("hidden states width does not match the encoder");
  }
  Matrix<T> act = Affine(hidden, params.head_transform, params.head_transform_bias)
                      .unaryExpr([](T x) { return Gelu(x); });
  return Affine(act, params.head_output, params.head_output_bias);
}

template <typename T>
Matrix<T> HeadLogProbs(const EncoderParams<T>& params, const HiddenStates<T>& hidden) {
  return LogSoftmaxRows(HeadLogits(params, hidden));
}

template <typename T>
TokenProbs<T> MlmProbs(const EncoderParams<T>& params, const HiddenStates<T>& hidden) {
  return HeadLogProbs(params, hidden).array().exp();
}

template <typename T>
ForwardPass<T>::ForwardPass(const EncoderParams<T>& params, const InputSequence& input,
                            Rng* dropout_rng) {
  const EncoderConfig& c = params.config;
  const Eigen::Index n = static_cast<Eigen::Index>(input.length());
  const Eigen::Index K = static_cast<Eigen::Index>(c.hidden);
  if (input.length() == 0) throw ConfigError("empty input sequence");
  if (input.length() > c.max_positions) {
    throw ConfigError("input length " + std::to_string(input.length()) +
                      " exceeds max positions " + std::to_string(c.max_positions));
  }
  for (TokenId id : input.ids) {
    if (id < 0 || static_cast<size_t>(id) >= c.vocab_size) {
      throw ConfigError("token id " + std::to_string(id) + " outside vocabulary");
    }
  }
  ids_ = input.ids;
  const double rate = c.dropout;

  Matrix<T> x(n, K);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = params.token_embeddings.row(ids_[i]) + params.position_embeddings.row(i);
  }
  x = NormForward(x, params.embed_norm_gain, params.embed_norm_bias, embed_norm_);
  embed_drop_ = DropoutMask<T>(n, K, rate, dropout_rng);
  ApplyMask(x, embed_drop_);

  const Eigen::Index heads = static_cast<Eigen::Index>(c.heads);
  const Eigen::Index d = K / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(d));

  layers_.resize(c.layers);
  for (size_t l = 0; l < c.layers; ++l) {
    const LayerParams<T>& L = params.layers[l];
    LayerCache& lc = layers_[l];
    lc.input = std::move(x);
    lc.q = Affine(lc.input, L.query, L.query_bias);
    lc.k = Affine(lc.input, L.key, L.key_bias);
    lc.v = Affine(lc.input, L.value, L.value_bias);
    lc.context.resize(n, K);
    lc.attn.resize(heads);
    for (Eigen::Index h = 0; h < heads; ++h) {
      Matrix<T> s(n, n);
      s.noalias() = lc.q.middleCols(h * d, d) * lc.k.middleCols(h * d, d).transpose();
      s *= scale;
      for (Eigen::Index i = 0; i < n; ++i) {
        const T mx = s.row(i).maxCoeff();
        s.row(i) = (s.row(i).array() - mx).exp();
        s.row(i) /= s.row(i).sum();
      }
      lc.context.middleCols(h * d, d).noalias() = s * lc.v.middleCols(h * d, d);
      lc.attn[h] = std::move(s);
    }
    Matrix<T> attn_out = Affine(lc.context, L.attn_out, L.attn_out_bias);
    lc.attn_drop = DropoutMask<T>(n, K, rate, dropout_rng);
    ApplyMask(attn_out, lc.attn_drop);
    attn_out += lc.input;
    lc.mid = NormForward(attn_out, L.attn_norm_gain, L.attn_norm_bias, lc.attn_norm);

    lc.ff_pre = Affine(lc.mid, L.ff_in, L.ff_in_bias);
    lc.ff_act = lc.ff_pre.unaryExpr([](T v) { return Gelu(v); });
    Matrix<T> ff_out = Affine(lc.ff_act, L.ff_out, L.ff_out_bias);
    lc.ff_drop = DropoutMask<T>(n, K, rate, dropout_rng);
    ApplyMask(ff_out, lc.ff_drop);
    ff_out += lc.mid;
    x = NormForward(ff_out, L.ff_norm_gain, L.ff_norm_bias, lc.ff_norm);
  }
  hidden_ = std::move(x);
  params_ = &params;
}

template <typename T>
const HiddenStates<T>& ForwardPass<T>::hidden() const {
  if (!has_run()) throw StateError("no forward pass has run");
  return hidden_;
}

template <typename T>
const Matrix<T>& ForwardPass<T>::log_probs() {
  if (!has_run()) throw StateError("no forward pass has run");
  if (log_probs_.size() == 0) {
    head_pre_ = Affine(hidden_, params_->head_transform, params_->head_transform_bias);
    head_act_ = head_pre_.unaryExpr([](T v) { return Gelu(v); });
    log_probs_ = LogSoftmaxRows(Affine(head_act_, params_->head_output, params_->head_output_bias));
  }
  return log_probs_;
}

template <typename T>
void ForwardPass<T>::Backward(const Matrix<T>& d_hidden, const Matrix<T>& d_log_probs,
                              EncoderParams<T>& grads) const {
  if (!has_run()) throw StateError("gradient requested before any forward pass");
  const EncoderParams<T>& P = *params_;
  const Eigen::Index n = hidden_.rows(), K = hidden_.cols();

  Matrix<T> dx = d_hidden.size() != 0 ? d_hidden : Matrix<T>::Zero(n, K);
  if (dx.rows() != n || dx.cols() != K) throw ConfigError("d_hidden has the wrong shape");

  if (d_log_probs.size() != 0) {
    if (log_probs_.size() == 0) throw StateError("log_probs() was never computed");
    if (d_log_probs.rows() != n || d_log_probs.cols() != log_probs_.cols()) {
      throw ConfigError("d_log_probs has the wrong shape");
    }
    // Through the log-softmax: dz = dlp - softmax * rowsum(dlp).
    Matrix<T> d_logits = d_log_probs;
    for (Eigen::Index i = 0; i < n; ++i) {
      const T total = d_log_probs.row(i).sum();
      if (total != T(0)) d_logits.row(i).array() -= log_probs_.row(i).array().exp() * total;
    }
    grads.head_output.noalias() += head_act_.transpose() * d_logits;
    grads.head_output_bias += d_logits.colwise().sum();
    Matrix<T> d_act = d_logits * P.head_output.transpose();
    Matrix<T> d_pre = d_act.array() * head_pre_.unaryExpr([](T v) { return GeluGrad(v); }).array();
    grads.head_transform.noalias() += hidden_.transpose() * d_pre;
    grads.head_transform_bias += d_pre.colwise().sum();
    dx.noalias() += d_pre * P.head_transform.transpose();
  }

  const Eigen::Index heads = static_cast<Eigen::Index>(P.config.heads);
  const Eigen::Index d = K / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(d));

  for (size_t li = layers_.size(); li-- > 0;) {
    const LayerParams<T>& L = P.layers[li];
    LayerParams<T>& G = grads.layers[li];
    const LayerCache& lc = layers_[li];

    // Feed-forward block.
    Matrix<T> d_sum = NormBackward(dx, L.ff_norm_gain, lc.ff_norm, G.ff_norm_gain, G.ff_norm_bias);
    Matrix<T> d_mid = d_sum;
    ApplyMask(d_sum, lc.ff_drop);
    G.ff_out.noalias() += lc.ff_act.transpose() * d_sum;
    G.ff_out_bias += d_sum.colwise().sum();
    Matrix<T> d_pre = (d_sum * L.ff_out.transpose()).array() *
                      lc.ff_pre.unaryExpr([](T v) { return GeluGrad(v); }).array();
    G.ff_in.noalias() += lc.mid.transpose() * d_pre;
    G.ff_in_bias += d_pre.colwise().sum();
    d_mid.noalias() += d_pre * L.ff_in.transpose();

    // Attention block.
    d_sum = NormBackward(d_mid, L.attn_norm_gain, lc.attn_norm, G.attn_norm_gain, G.attn_norm_bias);
    Matrix<T> d_input = d_sum;
    ApplyMask(d_sum, lc.attn_drop);
    G.attn_out.noalias() += lc.context.transpose() * d_sum;
    G.attn_out_bias += d_sum.colwise().sum();
    Matrix<T> d_context = d_sum * L.attn_out.transpose();

    Matrix<T> dq(n, K), dk(n, K), dv(n, K);
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Matrix<T>& a = lc.attn[h];
      auto dc = d_context.middleCols(h * d, d);
      dv.middleCols(h * d, d).noalias() = a.transpose() * dc;
      Matrix<T> da = dc * lc.v.middleCols(h * d, d).transpose();
      Matrix<T> ds(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const T dot = (da.row(i).array() * a.row(i).array()).sum();
        ds.row(i) = a.row(i).array() * (da.row(i).array() - dot);
      }
      ds *= scale;
      dq.middleCols(h * d, d).noalias() = ds * lc.k.middleCols(h * d, d);
      dk.middleCols(h * d, d).noalias() = ds.transpose() * lc.q.middleCols(h * d, d);
    }
    G.query.noalias() += lc.input.transpose() * dq;
    G.query_bias += dq.colwise().sum();
    G.key.noalias() += lc.input.transpose() * dk;
    G.key_bias += dk.colwise().sum();
    G.value.noalias() += lc.input.transpose() * dv;
    G.value_bias += dv.colwise().sum();
    d_input.noalias() += dq * L.query.transpose();
    d_input.noalias() += dk * L.key.transpose();
    d_input.noalias() += dv * L.value.transpose();
    dx = std::move(d_input);
  }

  ApplyMask(dx, embed_drop_);
  Matrix<T> d_embed = NormBackward(dx, P.embed_norm_gain, embed_norm_,
                                   grads.embed_norm_gain, grads.embed_norm_bias);
  for (Eigen::Index i = 0; i < n; ++i) {
    grads.token_embeddings.row(ids_[i]) += d_embed.row(i);
    grads.position_embeddings.row(i) += d_embed.row(i);
  }
}

template <typename T>
HiddenStates<T> Forward(const EncoderParams<T>& params, const InputSequence& input) {
  ForwardPass<T> pass(params, input);
  return pass.hidden();
}

template <typename T>
void AccumulateGradients(EncoderParams<T>& dst, const EncoderParams<T>& src) {
  std::vector<const Matrix<T>*> s;
  ForEachTensor(src, [&](const std::string&, const Matrix<T>& m) { s.push_back(&m); });
  size_t i = 0;
  ForEachTensor(dst, [&](const std::string&, Matrix<T>& m) { m += *s[i++]; });
}

#define LSSCORE_INSTANTIATE(T)                                                     \
  template struct EncoderParams<T>;                                                \
  template EncoderParams<T> InitParams<T>(const EncoderConfig&, uint64_t);         \
  template Matrix<T> HeadLogits<T>(const EncoderParams<T>&, const HiddenStates<T>&); \
  template Matrix<T> HeadLogProbs<T>(const EncoderParams<T>&, const HiddenStates<T>&); \
  template TokenProbs<T> MlmProbs<T>(const EncoderParams<T>&, const HiddenStates<T>&); \
  template class ForwardPass<T>;                                                   \
  template HiddenStates<T> Forward<T>(const EncoderParams<T>&, const InputSequence&); \
  template void AccumulateGradients<T>(EncoderParams<T>&, const EncoderParams<T>&);

LSSCORE_INSTANTIATE(float)
LSSCORE_INSTANTIATE(double)

#undef LSSCORE_INSTANTIATE

}  // namespace lsscore
