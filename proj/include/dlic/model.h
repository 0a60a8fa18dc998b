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

// Dense density estimator: maps a causal neighborhood (plus optional
// metadata features) to a softmax distribution over pixel values.
//
// Encoder and decoder must compute bit-identical distributions, so the
// coding path uses a strict inference routine: binary32 throughout, dot
// products accumulated in input order, no FMA contraction. Rows of a batch
// are computed independently, which makes the result independent of batch
// composition and worker count.

#ifndef DLIC_MODEL_H_
#define DLIC_MODEL_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dlic/byte_io.h"
#include "dlic/digest.h"
#include "dlic/thread_pool.h"

namespace dlic {

enum class Activation : uint8_t { kNone = 0, kRelu = 1 };

struct DenseLayer {
  uint32_t in = 0;
  uint32_t out = 0;
  Activation activation = Activation::kNone;
  // Average pooling over contiguous groups of this many units; 0 = none.
  uint8_t pool_group = 0;
  std::vector<float> weights;  // in x out, row-major: weights[i * out + o]
  std::vector<float> bias;     // out

  uint32_t output_width() const { return pool_group ? out / pool_group : out; }
};

// Min-max normalization constants for one metadata feature.
struct FeatureRange {
  float min = 0.0f;
  float max = 1.0f;
  friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

class DenseModel {
 public:
  // Throws kShapeMismatch if the layer chain is inconsistent.
  DenseModel(std::vector<DenseLayer> layers,
             std::vector<FeatureRange> metadata = {});

  // Throws kCorruptModel / kVersionMismatch.
  static DenseModel Load(std::span<const uint8_t> bytes);
  const Bytes& Save() const { return serialized_; }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  const std::vector<FeatureRange>& metadata_ranges() const { return metadata_; }
  uint32_t input_size() const { return layers_.front().in; }
  uint32_t output_size() const { return layers_.back().output_width(); }
  uint32_t metadata_count() const {
    return static_cast<uint32_t>(metadata_.size());
  }
  uint32_t pixel_feature_count() const {
    return input_size() - metadata_count();
  }
  size_t parameter_count() const;
  const Sha256Digest& content_hash() const { return hash_; }

 private:
  std::vector<DenseLayer> layers_;
  std::vector<FeatureRange> metadata_;
  Bytes serialized_;
  Sha256Digest hash_{};
};

// Bit depth implied by an output width (256 -> 8, 4096 -> 12), 0 otherwise.
int BitDepthForOutputSize(uint32_t output_size);

struct InferenceConfig {
  // Fixed-order binary32 arithmetic. Coding paths require it; when off the
  // forward pass uses a blocked GEMM whose rounding may differ.
  bool strict_mode = true;
  unsigned workers = 1;
};

// Row-major rows x cols probability matrix.
struct ProbabilityMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<float> values;

  std::span<const float> row(size_t i) const {
    return std::span<const float>(values).subspan(i * cols, cols);
  }
};

// `features` is rows x input_size, row-major. Throws kShapeMismatch.
ProbabilityMatrix ForwardBatch(const DenseModel& model,
                               std::span<const float> features, size_t rows,
                               const InferenceConfig& cfg);
// Strict forward pass using an existing pool.
ProbabilityMatrix ForwardBatch(const DenseModel& model,
                               std::span<const float> features, size_t rows,
                               ThreadPool& pool);

// Model input for one neighborhood: pixels scaled by 1 / (2^bit_depth - 1),
// followed by the normalized metadata features.
void MakeFeatures(std::span<const uint16_t> neighborhood, int bit_depth,
                  std::span<const float> normalized_metadata,
                  std::span<float> out);
// Applies the model's stored min-max ranges. Throws kShapeMismatch if fewer
// raw values than metadata features are supplied.
std::vector<float> NormalizeMetadata(const DenseModel& model,
                                     std::span<const float> raw);

struct QuantizedPdf {
  std::vector<uint32_t> freqs;
  uint32_t precision = 16;
};

// Integer frequencies summing to exactly 2^precision, each >= 1, with the
// same argmax (lowest index on ties) as `probs`. Throws kDegeneratePdf on
// NaN / negative entries or a sum away from 1.
QuantizedPdf QuantizePdf(std::span<const float> probs, uint32_t precision = 16);
void QuantizePdfInto(std::span<const float> probs, uint32_t precision,
                     std::span<uint32_t> freqs);

// Hidden-layer layouts. "small", "medium" and "large" use five hidden layers
// of 128, 256 and 540 units (about 0.11M, 0.35M and 1.35M parameters for the
// 78-input 2d-l9 window and 256 outputs); "tiny" is two layers of 32 for
// fast experiments.
struct Architecture {
  uint32_t input_size = 0;
  std::vector<uint32_t> hidden;
  uint32_t output_size = 256;
};
Architecture ArchitecturePreset(std::string_view name, uint32_t input_size,
                                uint32_t output_size);

}  // namespace dlic

#endif  // DLIC_MODEL_H_
