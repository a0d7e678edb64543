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

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "lsscore/encoder.h"
#include "lsscore/error.h"

namespace lsscore {
namespace {

void PutU32(std::vector<char>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutF32(std::vector<char>& out, float f) { PutU32(out, std::bit_cast<uint32_t>(f)); }

uint32_t GetU32(const unsigned char* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

uint32_t CheckedU32(size_t v, const char* what) {
  if (v > UINT32_MAX) throw ConfigError(std::string(what) + " does not fit the weight header");
  return static_cast<uint32_t>(v);
}

using LoadKind = WeightsLoadError::Kind;

}  // namespace

template <typename T>
void SaveParams(const EncoderParams<T>& params, const std::filesystem::path& path) {
  const EncoderConfig& c = params.config;
  std::vector<char> buf(std::begin(kWeightsMagic), std::end(kWeightsMagic));
  buf.reserve(kWeightsHeaderBytes + 4 * params.ParameterCount());
  PutU32(buf, CheckedU32(c.layers, "layers"));
  PutU32(buf, CheckedU32(c.hidden, "hidden"));
  PutU32(buf, CheckedU32(c.heads, "heads"));
  PutU32(buf, CheckedU32(c.ff, "ff"));
  PutU32(buf, CheckedU32(c.max_positions, "max_positions"));
  PutU32(buf, CheckedU32(c.vocab_size, "vocab_size"));
  PutF32(buf, static_cast<float>(c.dropout));
  ForEachTensor(params, [&](const std::string&, const Matrix<T>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) PutF32(buf, static_cast<float>(m.data()[i]));
  });
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write weights file " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("failed writing weights file " + path.string());
}

EncoderParams<float> LoadParams(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightsLoadError(LoadKind::kIo, "cannot open weights file " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kWeightsMagic) ||
      std::memcmp(buf.data(), kWeightsMagic, sizeof(kWeightsMagic)) != 0) {
    throw WeightsLoadError(LoadKind::kBadMagic, "bad magic in " + path.string());
  }
  if (buf.size() < kWeightsHeaderBytes) {
    throw WeightsLoadError(LoadKind::kTruncated, "truncated header in " + path.string());
  }
  const unsigned char* p = buf.data() + sizeof(kWeightsMagic);
  EncoderConfig c;
  c.layers = GetU32(p);
  c.hidden = GetU32(p + 4);
  c.heads = GetU32(p + 8);
  c.ff = GetU32(p + 12);
  c.max_positions = GetU32(p + 16);
  c.vocab_size = GetU32(p + 20);
  c.dropout = std::bit_cast<float>(GetU32(p + 24));
  try {
    c.Validate();
  } catch (const ConfigError& e) {
    throw WeightsLoadError(LoadKind::kShapeMismatch,
                           "invalid config header in " + path.string() + ": " + e.what());
  }

  EncoderParams<float> params = EncoderParams<float>::Zeros(c);
  const size_t expected = kWeightsHeaderBytes + 4 * params.ParameterCount();
  if (buf.size() < expected) {
    throw WeightsLoadError(LoadKind::kTruncated,
                           "truncated weights file " + path.string() + ": expected " +
                               std::to_string(expected) + " bytes, found " +
                               std::to_string(buf.size()));
  }
  if (buf.size() > expected) {
    throw WeightsLoadError(LoadKind::kShapeMismatch,
                           "weights file " + path.string() + " is larger than its header implies");
  }
  size_t offset = kWeightsHeaderBytes;
  ForEachTensor(params, [&](const std::string&, Matrix<float>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i, offset += 4) {
      m.data()[i] = std::bit_cast<float>(GetU32(buf.data() + offset));
    }
  });
  return params;
}

EncoderParams<float> LoadParams(const std::filesystem::path& path, const EncoderConfig& expected) {
  EncoderParams<float> params = LoadParams(path);
  EncoderConfig want = expected;
  want.dropout = static_cast<float>(want.dropout);  // stored as float32
  if (!(params.config == want)) {
    throw WeightsLoadError(LoadKind::kShapeMismatch,
                           "weights " + path.string() + " have config " + params.config.ToJson() +
                               ", expected " + expected.ToJson());
  }
  return params;
}

template void SaveParams<float>(const EncoderParams<float>&, const std::filesystem::path&);
template void SaveParams<double>(const EncoderParams<double>&, const std::filesystem::path&);

}  // namespace lsscore
