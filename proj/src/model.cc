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

#include "dlic/model.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "dlic/error.h"

namespace dlic {
namespace {

constexpr char kModelMagic[] = "DLICMDL1";
constexpr size_t kMagicSize = 8;

void ValidateLayers(const std::vector<DenseLayer>& layers,
                    const std::vector<FeatureRange>& metadata) {
  if (layers.empty()) Fail(ErrorCode::kShapeMismatch, "model has no layers");
  if (layers.size() > 0xffff) Fail(ErrorCode::kShapeMismatch, "too many layers");
  for (size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    const std::string where = "layer " + std::to_string(l) + ": ";
    if (layer.in == 0 || layer.out == 0) {
      Fail(ErrorCode::kShapeMismatch, where + "zero width");
    }
    if (layer.weights.size() != size_t{layer.in} * layer.out ||
        layer.bias.size() != layer.out) {
      Fail(ErrorCode::kShapeMismatch, where + "parameter count mismatch");
    }
    if (layer.activation != Activation::kNone &&
        layer.activation != Activation::kRelu) {
      Fail(ErrorCode::kShapeMismatch, where + "unknown activation");
    }
    if (layer.pool_group != 0 && layer.out % layer.pool_group != 0) {
      Fail(ErrorCode::kShapeMismatch,
           where + "pool group does not divide the layer width");
    }
    if (l > 0 && layers[l - 1].output_width() != layer.in) {
      Fail(ErrorCode::kShapeMismatch,
           where + "input width " + std::to_string(layer.in) +
               " does not match previous output " +
               std::to_string(layers[l - 1].output_width()));
    }
  }
  if (layers.back().output_width() < 2) {
    Fail(ErrorCode::kShapeMismatch, "output alphabet must have >= 2 symbols");
  }
  if (metadata.size() > layers.front().in) {
    Fail(ErrorCode::kShapeMismatch, "more metadata features than inputs");
  }
}

Bytes Serialize(const std::vector<DenseLayer>& layers,
                const std::vector<FeatureRange>& metadata) {
  ByteWriter w;
  w.Append(std::string_view(kModelMagic, kMagicSize));
  w.U16(static_cast<uint16_t>(layers.size()));
  for (const DenseLayer& layer : layers) {
    w.U32(layer.in);
    w.U32(layer.out);
    w.U8(static_cast<uint8_t>(layer.activation));
    w.U8(layer.pool_group);
    for (float v : layer.weights) w.F32(v);
    for (float v : layer.bias) w.F32(v);
  }
  w.U16(static_cast<uint16_t>(metadata.size()));
  for (const FeatureRange& r : metadata) {
    w.F32(r.min);
    w.F32(r.max);
  }
  const Sha256Digest digest = Sha256(w.bytes());
  w.Append(digest);
  return w.Take();
}

// Numerically stable softmax in place; sums in index order.
void SoftmaxInPlace(std::span<float> z) {
  const float m = *std::max_element(z.begin(), z.end());
  float sum = 0.0f;
  for (float& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (float& v : z) v = v / sum;
}

void ActivateAndPool(const DenseLayer& layer, std::span<float> acc,
                     std::span<float> out) {
  if (layer.activation == Activation::kRelu) {
    for (float& v : acc) v = v > 0.0f ? v : 0.0f;
  }
  if (layer.pool_group == 0) {
    std::copy(acc.begin(), acc.end(), out.begin());
    return;
  }
  const uint32_t g = layer.pool_group;
  const float scale = static_cast<float>(g);
  for (uint32_t k = 0; k < layer.out / g; ++k) {
    float s = 0.0f;
    for (uint32_t j = 0; j < g; ++j) s += acc[k * g + j];
    out[k] = s / scale;
  }
}

void StrictForwardRows(const DenseModel& model, std::span<const float> features,
                       size_t begin, size_t end, ProbabilityMatrix& result) {
  const auto& layers = model.layers();
  size_t max_width = model.input_size();
  for (const auto& layer : layers) max_width = std::max<size_t>(max_width, layer.out);
  std::vector<float> x(max_width), acc(max_width), next(max_width);

  for (size_t r = begin; r < end; ++r) {
    const auto in_row = features.subspan(r * model.input_size(), model.input_size());
    std::copy(in_row.begin(), in_row.end(), x.begin());
    for (const DenseLayer& layer : layers) {
      const uint32_t n_out = layer.out;
      std::fill_n(acc.begin(), n_out, 0.0f);
      const float* w = layer.weights.data();
      // Output o accumulates x[0] * w[0][o], x[1] * w[1][o], ... in order.
      for (uint32_t i = 0; i < layer.in; ++i) {
        const float xi = x[i];
        if (xi == 0.0f) continue;
        const float* wi = w + size_t{i} * n_out;
        for (uint32_t o = 0; o < n_out; ++o) acc[o] += xi * wi[o];
      }
      for (uint32_t o = 0; o < n_out; ++o) acc[o] += layer.bias[o];
      ActivateAndPool(layer, std::span<float>(acc.data(), n_out),
                      std::span<float>(next.data(), layer.output_width()));
      std::swap(x, next);
    }
    std::span<float> out(result.values.data() + r * result.cols, result.cols);
    std::copy_n(x.begin(), result.cols, out.begin());
    SoftmaxInPlace(out);
  }
}

ProbabilityMatrix FastForward(const DenseModel& model,
                              std::span<const float> features, size_t rows) {
  using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat x = Eigen::Map<const RowMat>(features.data(), static_cast<Eigen::Index>(rows),
                                      model.input_size());
  for (const DenseLayer& layer : model.layers()) {
    Eigen::Map<const RowMat> w(layer.weights.data(), layer.in, layer.out);
    Eigen::Map<const Eigen::RowVectorXf> b(layer.bias.data(), layer.out);
    RowMat z = x * w;
    z.rowwise() += b;
    RowMat y(z.rows(), layer.output_width());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      ActivateAndPool(layer, std::span<float>(z.row(r).data(), layer.out),
                      std::span<float>(y.row(r).data(), layer.output_width()));
    }
    x = std::move(y);
  }
  ProbabilityMatrix result{rows, model.output_size(),
                           std::vector<float>(x.data(), x.data() + x.size())};
  for (size_t r = 0; r < rows; ++r) {
    SoftmaxInPlace(std::span<float>(result.values.data() + r * result.cols,
                                    result.cols));
  }
  return result;
}

void CheckFeatures(const DenseModel& model, std::span<const float> features,
                   size_t rows) {
  if (features.size() != rows * model.input_size()) {
    Fail(ErrorCode::kShapeMismatch,
         "feature matrix has " + std::to_string(features.size()) +
             " values, expected " + std::to_string(rows) + " x " +
             std::to_string(model.input_size()));
  }
}

}  // namespace

DenseModel::DenseModel(std::vector<DenseLayer> layers,
                       std::vector<FeatureRange> metadata)
    : layers_(std::move(layers)), metadata_(std::move(metadata)) {
  ValidateLayers(layers_, metadata_);
  serialized_ = Serialize(layers_, metadata_);
  std::copy_n(serialized_.end() - 32, 32, hash_.begin());
}

DenseModel DenseModel::Load(std::span<const uint8_t> bytes) {
  if (bytes.size() < kMagicSize + 32) {
    Fail(ErrorCode::kCorruptModel, "model file too short");
  }
  if (std::memcmp(bytes.data(), kModelMagic, kMagicSize - 1) != 0) {
    Fail(ErrorCode::kCorruptModel, "not a model file (bad magic)");
  }
  if (bytes[kMagicSize - 1] != static_cast<uint8_t>(kModelMagic[kMagicSize - 1])) {
    Fail(ErrorCode::kVersionMismatch,
         std::string("unsupported model version '") +
             static_cast<char>(bytes[kMagicSize - 1]) + "'");
  }
  const auto body = bytes.first(bytes.size() - 32);
  const Sha256Digest digest = Sha256(body);
  if (!std::equal(digest.begin(), digest.end(), bytes.end() - 32)) {
    Fail(ErrorCode::kCorruptModel, "model checksum mismatch");
  }

  ByteReader r(body, ErrorCode::kCorruptModel);
  r.Take(kMagicSize);
  const uint16_t layer_count = r.U16();
  std::vector<DenseLayer> layers(layer_count);
  for (DenseLayer& layer : layers) {
    layer.in = r.U32();
    layer.out = r.U32();
    layer.activation = static_cast<Activation>(r.U8());
    layer.pool_group = r.U8();
    const uint64_t n = uint64_t{layer.in} * layer.out;
    if (n > r.remaining() / 4) Fail(ErrorCode::kCorruptModel, "truncated weights");
    layer.weights.resize(n);
    for (float& v : layer.weights) v = r.F32();
    if (layer.out > r.remaining() / 4) Fail(ErrorCode::kCorruptModel, "truncated bias");
    layer.bias.resize(layer.out);
    for (float& v : layer.bias) v = r.F32();
  }
  const uint16_t meta_count = r.U16();
  std::vector<FeatureRange> metadata(meta_count);
  for (FeatureRange& m : metadata) {
    m.min = r.F32();
    m.max = r.F32();
  }
  if (r.remaining() != 0) Fail(ErrorCode::kCorruptModel, "trailing bytes in model");
  try {
    return DenseModel(std::move(layers), std::move(metadata));
  } catch (const Error& e) {
    Fail(ErrorCode::kCorruptModel, std::string("invalid model: ") + e.what());
  }
}

size_t DenseModel::parameter_count() const {
  size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

int BitDepthForOutputSize(uint32_t output_size) {
  if (output_size == 256) return 8;
  if (output_size == 4096) return 12;
  return 0;
}

ProbabilityMatrix ForwardBatch(const DenseModel& model,
                               std::span<const float> features, size_t rows,
                               const InferenceConfig& cfg) {
  CheckFeatures(model, features, rows);
  if (!cfg.strict_mode) return FastForward(model, features, rows);
  ThreadPool pool(cfg.workers);
  return ForwardBatch(model, features, rows, pool);
}

ProbabilityMatrix ForwardBatch(const DenseModel& model,
                               std::span<const float> features, size_t rows,
                               ThreadPool& pool) {
  CheckFeatures(model, features, rows);
  ProbabilityMatrix result{rows, model.output_size(),
                           std::vector<float>(rows * model.output_size())};
  pool.ParallelFor(rows, [&](size_t begin, size_t end) {
    StrictForwardRows(model, features, begin, end, result);
  });
  return result;
}

void MakeFeatures(std::span<const uint16_t> neighborhood, int bit_depth,
                  std::span<const float> normalized_metadata,
                  std::span<float> out) {
  const float scale = static_cast<float>((1u << bit_depth) - 1);
  for (size_t i = 0; i < neighborhood.size(); ++i) {
    out[i] = static_cast<float>(neighborhood[i]) / scale;
  }
  std::copy(normalized_metadata.begin(), normalized_metadata.end(),
            out.begin() + static_cast<std::ptrdiff_t>(neighborhood.size()));
}

std::vector<float> NormalizeMetadata(const DenseModel& model,
                                     std::span<const float> raw) {
  const auto& ranges = model.metadata_ranges();
  if (raw.size() < ranges.size()) {
    Fail(ErrorCode::kShapeMismatch,
         "model needs " + std::to_string(ranges.size()) +
             " metadata features, got " + std::to_string(raw.size()));
  }
  std::vector<float> out(ranges.size());
  for (size_t i = 0; i < ranges.size(); ++i) {
    const float span = ranges[i].max - ranges[i].min;
    out[i] = span > 0.0f ? (raw[i] - ranges[i].min) / span : 0.0f;
  }
  return out;
}

void QuantizePdfInto(std::span<const float> probs, uint32_t precision,
                     std::span<uint32_t> freqs) {
  const size_t n = probs.size();
  if (precision > 16 || n == 0 || n > (size_t{1} << precision) ||
      freqs.size() != n) {
    Fail(ErrorCode::kInvalidArgument, "alphabet does not fit the precision");
  }
  double sum = 0.0;
  for (float p : probs) {
    if (!(p >= 0.0f) || !std::isfinite(p)) {
      Fail(ErrorCode::kDegeneratePdf, "probability is NaN, infinite or negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-4) {
    Fail(ErrorCode::kDegeneratePdf,
         "probabilities sum to " + std::to_string(sum));
  }
  const int64_t total = int64_t{1} << precision;
  std::vector<double> remainder(n);
  int64_t assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    const double scaled = probs[i] / sum * static_cast<double>(total);
    const double fl = std::floor(scaled);
    const uint32_t f = fl < 1.0 ? 1u : static_cast<uint32_t>(fl);
    freqs[i] = f;
    remainder[i] = scaled - f;
    assigned += f;
  }
  int64_t residual = total - assigned;

  std::vector<uint32_t> order;
  if (residual > 0) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    auto by_remainder = [&](uint32_t a, uint32_t b) {
      return remainder[a] != remainder[b] ? remainder[a] > remainder[b] : a < b;
    };
    const size_t top = std::min<size_t>(n, static_cast<size_t>(residual));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top),
                      order.end(), by_remainder);
    for (size_t t = 0; residual > 0; ++t, --residual) {
      if (t == top) {  // more than one pass needed
        std::sort(order.begin(), order.end(), by_remainder);
      }
      ++freqs[order[t % n]];
    }
  }
  while (residual < 0) {
    // One pass over entries > 1 in descending value order.
    order.clear();
    for (uint32_t i = 0; i < n; ++i) {
      if (freqs[i] > 1) order.push_back(static_cast<uint32_t>(i));
    }
    auto by_value = [&](uint32_t a, uint32_t b) {
      return freqs[a] != freqs[b] ? freqs[a] > freqs[b] : a < b;
    };
    const size_t take = std::min<size_t>(order.size(), static_cast<size_t>(-residual));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                      order.end(), by_value);
    for (size_t t = 0; t < take; ++t) --freqs[order[t]];
    residual += static_cast<int64_t>(take);
  }

  // Keep the mode where the model put it (lowest index wins ties).
  const size_t want = static_cast<size_t>(
      std::distance(probs.begin(), std::max_element(probs.begin(), probs.end())));
  for (;;) {
    const size_t have = static_cast<size_t>(
        std::distance(freqs.begin(), std::max_element(freqs.begin(), freqs.end())));
    if (have == want || freqs[have] <= 1) break;
    --freqs[have];
    ++freqs[want];
  }
}

QuantizedPdf QuantizePdf(std::span<const float> probs, uint32_t precision) {
  QuantizedPdf pdf;
  pdf.precision = precision;
  pdf.freqs.resize(probs.size());
  QuantizePdfInto(probs, precision, pdf.freqs);
  return pdf;
}

Architecture ArchitecturePreset(std::string_view name, uint32_t input_size,
                                uint32_t output_size) {
  Architecture arch;
  arch.input_size = input_size;
  arch.output_size = output_size;
  if (name == "tiny") {
    arch.hidden = {32, 32};
  } else if (name == "small") {
    arch.hidden.assign(5, 128);
  } else if (name == "medium") {
    arch.hidden.assign(5, 256);
  } else if (name == "large") {
    arch.hidden.assign(5, 540);
  } else {
    Fail(ErrorCode::kInvalidArgument,
         "unknown model preset '" + std::string(name) + "'");
  }
  return arch;
}

}  // namespace dlic
