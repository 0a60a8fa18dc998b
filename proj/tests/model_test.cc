// Copyright 2026 The DLIC Authors.
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

#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include <doctest.h>

#include "dlic/digest.h"
#include "dlic/model.h"
#include "dlic/rans.h"
#include "support.h"

namespace dlic {
namespace {

using testing::CaptureCode;

// Double-precision forward pass used as an independent oracle.
std::vector<double> OracleForward(const DenseModel& m, std::span<const float> x) {
  std::vector<double> a(x.begin(), x.end());
  for (const DenseLayer& l : m.layers()) {
    std::vector<double> z(l.out);
    for (uint32_t o = 0; o < l.out; ++o) {
      double acc = 0;
      for (uint32_t i = 0; i < l.in; ++i) acc += a[i] * l.weights[size_t{i} * l.out + o];
      z[o] = acc + l.bias[o];
      if (l.activation == Activation::kRelu) z[o] = std::max(0.0, z[o]);
    }
    if (l.pool_group) {
      std::vector<double> p(l.out / l.pool_group, 0.0);
      for (uint32_t o = 0; o < l.out; ++o) p[o / l.pool_group] += z[o] / l.pool_group;
      z = p;
    }
    a = z;
  }
  const double mx = *std::max_element(a.begin(), a.end());
  double sum = 0;
  for (double& v : a) sum += (v = std::exp(v - mx));
  for (double& v : a) v /= sum;
  return a;
}

std::vector<float> RandomFeatures(std::mt19937_64& rng, size_t n, double zero_rate) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::bernoulli_distribution zero(zero_rate);
  std::vector<float> f(n);
  for (auto& v : f) v = zero(rng) ? 0.0f : u(rng);
  return f;
}

double CrossEntropy(std::span<const double> p, std::span<const double> q) {
  double h = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) h -= p[i] * std::log2(q[i]);
  }
  return h;
}

TEST_CASE("uniform softmax from zero weights") {
  const DenseModel m = testing::UniformModel(3, 4);
  const std::vector<float> x = {0.1f, 0.5f, 0.9f, 0.0f, 0.0f, 0.0f};
  const auto p = ForwardBatch(m, x, 2, InferenceConfig{});
  CHECK(p.rows == 2);
  for (float v : p.values) CHECK(v == 0.25f);
}

TEST_CASE("bias shifts the softmax") {
  DenseModel zero = testing::UniformModel(2, 4);
  DenseLayer l = zero.layers()[0];
  l.bias = {std::log(2.0f), 0, 0, 0};
  const DenseModel m({l});
  const std::vector<float> x = {0.3f, 0.7f};
  const auto p = ForwardBatch(m, x, 1, InferenceConfig{});
  CHECK(p.values[0] == doctest::Approx(0.4).epsilon(1e-6));
  for (int i = 1; i < 4; ++i) CHECK(p.values[i] == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("forward pass agrees with a double-precision oracle") {
  std::mt19937_64 rng(4);
  const uint32_t hidden[] = {24, 16};
  for (int trial = 0; trial < 5; ++trial) {
    const DenseModel m = testing::RandomModel(10, hidden, 256, 100 + trial, 0.4f);
    const size_t rows = 33;
    const auto x = RandomFeatures(rng, rows * 10, 0.3);
    const auto p = ForwardBatch(m, x, rows, InferenceConfig{});
    const auto fast = ForwardBatch(m, x, rows, InferenceConfig{false, 1});
    for (size_t r = 0; r < rows; ++r) {
      const auto want = OracleForward(m, std::span<const float>(x).subspan(r * 10, 10));
      double sum = 0;
      for (size_t o = 0; o < 256; ++o) {
        CHECK(p.row(r)[o] == doctest::Approx(want[o]).epsilon(1e-4));
        CHECK(fast.row(r)[o] == doctest::Approx(want[o]).epsilon(1e-4));
        sum += p.row(r)[o];
      }
      CHECK(std::abs(sum - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("average pooling layers") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<float> w(-1, 1);
  DenseLayer a{5, 12, Activation::kRelu, 3, {}, {}};
  a.weights.resize(60);
  a.bias.resize(12);
  for (auto& v : a.weights) v = w(rng);
  for (auto& v : a.bias) v = w(rng);
  DenseLayer b{4, 8, Activation::kNone, 2, {}, {}};
  b.weights.resize(32);
  b.bias.resize(8);
  for (auto& v : b.weights) v = w(rng);
  for (auto& v : b.bias) v = w(rng);
  const DenseModel m({a, b});
  CHECK(m.output_size() == 4);
  const auto x = RandomFeatures(rng, 5, 0.0);
  const auto p = ForwardBatch(m, x, 1, InferenceConfig{});
  const auto want = OracleForward(m, x);
  for (size_t o = 0; o < 4; ++o) CHECK(p.values[o] == doctest::Approx(want[o]).epsilon(1e-5));
}

TEST_CASE("batching and worker count do not change bits") {
  std::mt19937_64 rng(9);
  const uint32_t hidden[] = {32, 32};
  const DenseModel m = testing::RandomModel(78, hidden, 256, 7);
  const size_t rows = 257;
  auto x = RandomFeatures(rng, rows * 78, 0.2);
  // Row 1 duplicates row 0.
  std::copy_n(x.begin(), 78, x.begin() + 78);
  const auto base = ForwardBatch(m, x, rows, InferenceConfig{true, 1});
  CHECK(std::memcmp(base.row(0).data(), base.row(1).data(), 256 * sizeof(float)) == 0);
  for (unsigned workers : {1u, 2u, 8u}) {
    for (int rep = 0; rep < 2; ++rep) {
      const auto p = ForwardBatch(m, x, rows, InferenceConfig{true, workers});
      CHECK(std::memcmp(p.values.data(), base.values.data(),
                        base.values.size() * sizeof(float)) == 0);
    }
  }
  // A single row alone gives the same bits as inside the batch.
  const auto single = ForwardBatch(m, std::span<const float>(x).subspan(78 * 5, 78), 1,
                                   InferenceConfig{});
  CHECK(std::memcmp(single.values.data(), base.row(5).data(), 256 * sizeof(float)) == 0);
}

TEST_CASE("shape errors") {
  const DenseModel m = testing::UniformModel(3, 4);
  const std::vector<float> x(5);
  CHECK(CaptureCode([&] { ForwardBatch(m, x, 2, InferenceConfig{}); }) ==
        ErrorCode::kShapeMismatch);
  DenseLayer a{3, 4, Activation::kRelu, 0, std::vector<float>(12), std::vector<float>(4)};
  DenseLayer b{5, 2, Activation::kNone, 0, std::vector<float>(10), std::vector<float>(2)};
  CHECK(CaptureCode([&] { DenseModel({a, b}); }) == ErrorCode::kShapeMismatch);
  DenseLayer bad_pool{3, 4, Activation::kNone, 3, std::vector<float>(12), std::vector<float>(4)};
  CHECK(CaptureCode([&] { DenseModel({bad_pool}); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("quantization examples") {
  const std::vector<float> uniform(256, 1.0f / 256);
  for (uint32_t f : QuantizePdf(uniform).freqs) CHECK(f == 256);
  const std::vector<float> half = {0.5f, 0.5f, 0, 0};
  CHECK(QuantizePdf(half, 4).freqs == std::vector<uint32_t>{7, 7, 1, 1});
  const std::vector<float> one = {1.0f, 0, 0, 0};
  CHECK(QuantizePdf(one, 4).freqs == std::vector<uint32_t>{13, 1, 1, 1});
  // Residual goes to the largest remainders, lower index first.
  const std::vector<float> thirds = {1.0f / 3, 1.0f / 3, 1.0f / 3};
  CHECK(QuantizePdf(thirds, 4).freqs == std::vector<uint32_t>{6, 5, 5});
}

TEST_CASE("quantization errors") {
  const std::vector<float> nan = {std::nanf(""), 1.0f};
  CHECK(CaptureCode([&] { QuantizePdf(nan); }) == ErrorCode::kDegeneratePdf);
  const std::vector<float> neg = {-0.1f, 1.1f};
  CHECK(CaptureCode([&] { QuantizePdf(neg); }) == ErrorCode::kDegeneratePdf);
  const std::vector<float> short_sum = {0.4f, 0.4f};
  CHECK(CaptureCode([&] { QuantizePdf(short_sum); }) == ErrorCode::kDegeneratePdf);
}

TEST_CASE("quantization properties on random distributions") {
  std::mt19937_64 rng(12);
  std::gamma_distribution<double> conc(0.3, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const size_t n = trial % 2 ? 256 : 1 + rng() % 300;
    std::vector<double> p(n);
    double s = 0;
    for (auto& v : p) s += (v = conc(rng));
    std::vector<float> pf(n);
    for (size_t i = 0; i < n; ++i) pf[i] = static_cast<float>(p[i] / s);
    const auto q = QuantizePdf(pf);
    CHECK(std::accumulate(q.freqs.begin(), q.freqs.end(), uint64_t{0}) == 65536);
    CHECK(*std::min_element(q.freqs.begin(), q.freqs.end()) >= 1);
    CHECK(std::max_element(q.freqs.begin(), q.freqs.end()) - q.freqs.begin() ==
          std::max_element(pf.begin(), pf.end()) - pf.begin());
    CHECK_NOTHROW(rans::SymbolTable::Build(q.freqs, 16));
    std::vector<double> pd(pf.begin(), pf.end()), qd(n);
    for (size_t i = 0; i < n; ++i) qd[i] = q.freqs[i] / 65536.0;
    CHECK(CrossEntropy(pd, qd) - CrossEntropy(pd, pd) < 0.02);
  }
}

TEST_CASE("model file round trip") {
  const uint32_t hidden[] = {6};
  const DenseModel m = testing::RandomModel(5, hidden, 4, 3, 0.5f, {{0.5f, 2.0f}});
  const Bytes& bytes = m.Save();
  const DenseModel back = DenseModel::Load(bytes);
  CHECK(back.Save() == bytes);
  CHECK(back.content_hash() == m.content_hash());
  CHECK(back.metadata_ranges() == m.metadata_ranges());
  for (size_t i = 0; i < m.layers().size(); ++i) {
    CHECK(std::memcmp(back.layers()[i].weights.data(), m.layers()[i].weights.data(),
                      m.layers()[i].weights.size() * 4) == 0);
  }
  // Magic + count + per layer (4 + 4 + 1 + 1 + weights + bias) + meta + hash.
  CHECK(bytes.size() == 8 + 2 + (10 + 4 * (5 * 6 + 6)) + (10 + 4 * (6 * 4 + 4)) + 2 + 8 + 32);
  CHECK(m.content_hash() == Sha256(std::span<const uint8_t>(bytes).first(bytes.size() - 32)));
}

TEST_CASE("model file corruption") {
  const uint32_t hidden[] = {6};
  const Bytes bytes = testing::RandomModel(5, hidden, 4, 3).Save();
  for (size_t pos : {size_t{9}, size_t{20}, bytes.size() / 2, bytes.size() - 33}) {
    Bytes flipped = bytes;
    flipped[pos] ^= 0x10;
    CHECK(CaptureCode([&] { DenseModel::Load(flipped); }) == ErrorCode::kCorruptModel);
  }
  Bytes version = bytes;
  version[7] = '2';
  CHECK(CaptureCode([&] { DenseModel::Load(version); }) == ErrorCode::kVersionMismatch);
  const Bytes truncated(bytes.begin(), bytes.end() - 40);
  CHECK(CaptureCode([&] { DenseModel::Load(truncated); }) == ErrorCode::kCorruptModel);
  CHECK(CaptureCode([&] { DenseModel::Load(Bytes{'x'}); }) == ErrorCode::kCorruptModel);
}

TEST_CASE("golden hash of the zero one-layer four-output model") {
  const DenseModel m = testing::UniformModel(1, 4);
  CHECK(ToHex(m.content_hash()) ==
        "bf6765741f68860d1a3130dbd47b74f954e3bf3d8d4f92917c95bd464ba75751");
}

TEST_CASE("architecture presets") {
  auto params = [](const Architecture& a) {
    size_t n = 0, in = a.input_size;
    for (uint32_t h : a.hidden) {
      n += in * h + h;
      in = h;
    }
    return n + in * a.output_size + a.output_size;
  };
  CHECK(params(ArchitecturePreset("small", 78, 256)) == 109184);
  CHECK(params(ArchitecturePreset("medium", 78, 256)) == 349184);
  CHECK(params(ArchitecturePreset("large", 78, 256)) == 1349716);
  CHECK(ArchitecturePreset("large", 78, 256).hidden.size() == 5);
  CHECK(CaptureCode([] { ArchitecturePreset("huge", 1, 2); }) == ErrorCode::kInvalidArgument);
  CHECK(BitDepthForOutputSize(256) == 8);
  CHECK(BitDepthForOutputSize(4096) == 12);
}

TEST_CASE("feature construction") {
  const std::vector<uint16_t> hood = {0, 255, 51};
  const std::vector<float> meta = {0.25f};
  std::vector<float> out(4);
  MakeFeatures(hood, 8, meta, out);
  CHECK(out == std::vector<float>{0.0f, 1.0f, 0.2f, 0.25f});
  const DenseModel m = testing::UniformModel(5, 4, {{1.0f, 3.0f}, {2.0f, 2.0f}});
  const std::vector<float> raw = {2.0f, 9.0f};
  CHECK(NormalizeMetadata(m, raw) == std::vector<float>{0.5f, 0.0f});
  CHECK(m.pixel_feature_count() == 3);
}

}  // namespace
}  // namespace dlic
