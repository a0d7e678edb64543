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

#ifndef LSSCORE_ENCODER_H_
#define LSSCORE_ENCODER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lsscore/random.h"
#include "lsscore/text.h"

namespace lsscore {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// N x K per-token states; row 0 belongs to [CLS].
template <typename T>
using HiddenStates = Matrix<T>;

// N x V per-position distributions over the vocabulary.
template <typename T>
using TokenProbs = Matrix<T>;

struct EncoderConfig {
  size_t layers = 2;
  size_t hidden = 128;
  size_t heads = 4;
  size_t ff = 512;
  size_t max_positions = kMaxSequenceLength;
  size_t vocab_size = 0;
  double dropout = 0.0;

  // Throws ConfigError.
  void Validate() const;

  // JSON object with exactly the fields above; unknown or missing keys are
  // rejected.
  std::string ToJson() const;
  static EncoderConfig FromJson(std::string_view json);

  bool operator==(const EncoderConfig&) const = default;
};

template <typename T>
struct LayerParams {
  Matrix<T> query, query_bias;
  Matrix<T> key, key_bias;
  Matrix<T> value, value_bias;
  Matrix<T> attn_out, attn_out_bias;
  Matrix<T> attn_norm_gain, attn_norm_bias;
  Matrix<T> ff_in, ff_in_bias;
  Matrix<T> ff_out, ff_out_bias;
  Matrix<T> ff_norm_gain, ff_norm_bias;
};

// Every trainable tensor. Biases and norm parameters are stored as 1 x n
// matrices so all tensors share one type.
template <typename T>
struct EncoderParams {
  EncoderConfig config;
  Matrix<T> token_embeddings;     // V x K
  Matrix<T> position_embeddings;  // max_positions x K
  Matrix<T> embed_norm_gain, embed_norm_bias;
  std::vector<LayerParams<T>> layers;
  Matrix<T> head_transform, head_transform_bias;  // K x K, 1 x K
  Matrix<T> head_output, head_output_bias;        // K x V, 1 x V

  // Correctly shaped, all zeros. Used for gradient accumulators.
  static EncoderParams Zeros(const EncoderConfig& config);

  size_t ParameterCount() const;
  bool AllFinite() const;

  template <typename U>
  EncoderParams<U> Cast() const;
};

// Visits every tensor in declared (serialization) order as fn(name, tensor).
// Works for const and non-const params.
template <typename Params, typename Fn>
void ForEachTensor(Params& p, Fn&& fn) {
  fn("token_embeddings", p.token_embeddings);
  fn("position_embeddings", p.position_embeddings);
  fn("embed_norm.gain", p.embed_norm_gain);
  fn("embed_norm.bias", p.embed_norm_bias);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& L = p.layers[l];
    const std::string pre = "layer" + std::to_string(l) + ".";
    fn(pre + "query.weight", L.query);
    fn(pre + "query.bias", L.query_bias);
    fn(pre + "key.weight", L.key);
    fn(pre + "key.bias", L.key_bias);
    fn(pre + "value.weight", L.value);
    fn(pre + "value.bias", L.value_bias);
    fn(pre + "attn_out.weight", L.attn_out);
    fn(pre + "attn_out.bias", L.attn_out_bias);
    fn(pre + "attn_norm.gain", L.attn_norm_gain);
    fn(pre + "attn_norm.bias", L.attn_norm_bias);
    fn(pre + "ff_in.weight", L.ff_in);
    fn(pre + "ff_in.bias", L.ff_in_bias);
    fn(pre + "ff_out.weight", L.ff_out);
    fn(pre + "ff_out.bias", L.ff_out_bias);
    fn(pre + "ff_norm.gain", L.ff_norm_gain);
    fn(pre + "ff_norm.bias", L.ff_norm_bias);
  }
  fn("head.transform.weight", p.head_transform);
  fn("head.transform.bias", p.head_transform_bias);
  fn("head.output.weight", p.head_output);
  fn("head.output.bias", p.head_output_bias);
}

template <typename T>
template <typename U>
EncoderParams<U> EncoderParams<T>::Cast() const {
  EncoderParams<U> out = EncoderParams<U>::Zeros(config);
  std::vector<const Matrix<T>*> src;
  ForEachTensor(*this, [&](const std::string&, const Matrix<T>& m) { src.push_back(&m); });
  size_t i = 0;
  ForEachTensor(out, [&](const std::string&, Matrix<U>& m) { m = src[i++]->template cast<U>(); });
  return out;
}

// Weights ~ N(0, 0.02^2) truncated at +-2 sigma; norm gains 1; biases 0.
template <typename T>
EncoderParams<T> InitParams(const EncoderConfig& config, uint64_t seed);

// Head pre-activation: W_1^T GELU(W_0^T h + b_0) + b_1 for every row of H.
template <typename T>
Matrix<T> HeadLogits(const EncoderParams<T>& params, const HiddenStates<T>& hidden);

// Row-wise log-softmax of HeadLogits, computed with the max-shift so no
// log(0) can occur.
template <typename T>
Matrix<T> HeadLogProbs(const EncoderParams<T>& params, const HiddenStates<T>& hidden);

// Row-wise softmax of HeadLogits.
template <typename T>
TokenProbs<T> MlmProbs(const EncoderParams<T>& params, const HiddenStates<T>& hidden);

// One encoder application that keeps the activations needed for reverse-mode
// differentiation. Holds a pointer to `params`, which must outlive it and stay
// unchanged until Backward returns.
template <typename T>
class ForwardPass {
 public:
  ForwardPass() = default;

  // Throws ConfigError when the input is longer than max_positions or holds
  // an id outside the vocabulary. A non-null rng turns on dropout at
  // config.dropout; otherwise the pass is deterministic.
  ForwardPass(const EncoderParams<T>& params, const InputSequence& input,
              Rng* dropout_rng = nullptr);

  bool has_run() const { return params_ != nullptr; }
  const HiddenStates<T>& hidden() const;

  // Token-probability head over every position; computed once and cached.
  const Matrix<T>& log_probs();

  // Accumulates into `grads` the gradient of a scalar loss whose adjoints are
  // d_hidden (N x K, or empty for zero) and d_log_probs (N x V, or empty).
  // A non-empty d_log_probs requires log_probs() to have been called.
  // Throws StateError if no forward pass has run.
  void Backward(const Matrix<T>& d_hidden, const Matrix<T>& d_log_probs,
                EncoderParams<T>& grads) const;

 private:
  struct NormCache {
    Matrix<T> normalized;  // (x - mean) * rstd
    Eigen::Matrix<T, Eigen::Dynamic, 1> rstd;
  };
  struct LayerCache {
    Matrix<T> input;
    Matrix<T> q, k, v;
    std::vector<Matrix<T>> attn;  // per head, N x N
    Matrix<T> context;
    Matrix<T> attn_drop;  // empty when dropout is off
    NormCache attn_norm;
    Matrix<T> mid;  // attention block output, input to the feed-forward
    Matrix<T> ff_pre, ff_act;
    Matrix<T> ff_drop;
    NormCache ff_norm;
  };

  const EncoderParams<T>* params_ = nullptr;
  std::vector<TokenId> ids_;
  NormCache embed_norm_;
  Matrix<T> embed_drop_;
  std::vector<LayerCache> layers_;
  HiddenStates<T> hidden_;
  // Head activations.
  Matrix<T> head_pre_, head_act_, log_probs_;
};

// Inference: ForwardPass(params, input).hidden().
template <typename T>
HiddenStates<T> Forward(const EncoderParams<T>& params, const InputSequence& input);

// Adds `src` into `dst` tensor by tensor.
template <typename T>
void AccumulateGradients(EncoderParams<T>& dst, const EncoderParams<T>& src);

// Binary weight file: "LSSCORE1", six little-endian uint32 config fields
// (layers, hidden, heads, ff, max_positions, vocab_size), float32 dropout,
// then every tensor in ForEachTensor order as little-endian float32.
inline constexpr char kWeightsMagic[8] = {'L', 'S', 'S', 'C', 'O', 'R', 'E', '1'};
inline constexpr size_t kWeightsHeaderBytes = 8 + 6 * 4 + 4;

class WeightsLoadError : public std::runtime_error {
 public:
  enum class Kind { kIo, kBadMagic, kShapeMismatch, kTruncated };
  WeightsLoadError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

template <typename T>
void SaveParams(const EncoderParams<T>& params, const std::filesystem::path& path);

EncoderParams<float> LoadParams(const std::filesystem::path& path);

// Also checks the stored config against `expected`.
EncoderParams<float> LoadParams(const std::filesystem::path& path,
                                const EncoderConfig& expected);

}  // namespace lsscore

#endif  // LSSCORE_ENCODER_H_
