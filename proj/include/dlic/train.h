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

#ifndef DLIC_TRAIN_H_
#define DLIC_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dlic/grid.h"
#include "dlic/model.h"
#include "dlic/wavefront.h"

namespace dlic {

// One training example: normalized features and the pixel value to predict.
struct TrainSample {
  std::vector<float> features;
  uint16_t target = 0;
  friend bool operator==(const TrainSample&, const TrainSample&) = default;
};

// Samples stored as a dense feature matrix plus targets.
struct Dataset {
  size_t width = 0;
  std::vector<float> features;  // size() x width, row-major
  std::vector<uint16_t> targets;

  size_t size() const { return targets.size(); }
  std::span<const float> row(size_t i) const {
    return std::span<const float>(features).subspan(i * width, width);
  }
  TrainSample sample(size_t i) const {
    auto r = row(i);
    return {std::vector<float>(r.begin(), r.end()), targets[i]};
  }
  void Append(std::span<const float> row, uint16_t target);
};

// One sample per pixel in (grid, slice, row, col) order, featurized exactly
// as the codec does. `normalized_metadata`, if nonempty, holds one feature
// vector per grid. Throws kEmptyInput, kInvalidArgument on mixed bit depths.
Dataset BuildDataset(std::span<const Grid> grids, const WindowSpec& window,
                     std::span<const std::vector<float>> normalized_metadata = {});

// Per-feature min/max over a set of raw metadata vectors.
std::vector<FeatureRange> FitFeatureRanges(
    std::span<const std::vector<float>> raw);

struct ValueHistogram {
  std::vector<uint64_t> counts;
  uint64_t total() const;
};

ValueHistogram BuildHistogram(std::span<const Grid> grids);
ValueHistogram TargetHistogram(const Dataset& data, size_t alphabet_size);

// w_v = (N / (K_present * max(count_v, 1)))^alpha; unseen values get the
// largest weight assigned to a seen value.
std::vector<double> ComputeClassWeights(const ValueHistogram& hist,
                                        double alpha);

// Appends (factor - 1) copies of every sample whose target occurs fewer than
// `threshold` times in `hist`, after the original samples.
Dataset UpsampleRare(const Dataset& data, const ValueHistogram& hist,
                     uint64_t threshold, uint32_t factor);

struct TrainConfig {
  double learning_rate = 1e-3;
  size_t batch_size = 64;
  uint32_t epochs = 10;
  uint64_t seed = 1;
  // Loss-weight exponent; 0 disables class weighting.
  double weight_alpha = 0.0;
  // Upsampling of rare values; threshold 0 or factor 1 disables it.
  uint64_t upsample_threshold = 0;
  uint32_t upsample_factor = 1;
};

// Seeded He-uniform initialization: weights ~ U(-sqrt(6/in), sqrt(6/in)),
// zero biases. Hidden layers use ReLU.
DenseModel InitModel(const Architecture& arch, uint64_t seed,
                     std::vector<FeatureRange> metadata = {});

// Double-precision copy of a model's parameters with loss and backprop.
// Parameters are flattened layer by layer, weights (in x out) then bias.
class TrainableNetwork {
 public:
  explicit TrainableNetwork(const DenseModel& model);

  DenseModel ToModel() const;
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Mean over `indices` of weight[target] * -log2 p(target). If `gradient`
  // is non-null it receives d(loss)/d(parameters).
  double Loss(const Dataset& data, std::span<const size_t> indices,
              std::span<const double> class_weights,
              std::vector<double>* gradient) const;

 private:
  struct LayerShape {
    uint32_t in, out;
    Activation activation;
    uint8_t pool_group;
    size_t weight_offset, bias_offset;
  };
  std::vector<LayerShape> shapes_;
  std::vector<double> params_;
  std::vector<FeatureRange> metadata_;
};

struct TrainResult {
  DenseModel model;
  // vloss in bits after each epoch, on `validation` if given, else on the
  // training samples.
  std::vector<double> vloss_history;
};

// Adam on class-weighted categorical cross-entropy. Throws kEmptyInput,
// kShapeMismatch, kDivergedLoss.
TrainResult TrainModel(const DenseModel& initial, const Dataset& samples,
                       const TrainConfig& cfg,
                       const Dataset* validation = nullptr);

// Mean -log2 p(target) under the strict inference path, probabilities
// floored at 2^-30. Throws kEmptyInput, kShapeMismatch.
double EvaluateVloss(const DenseModel& model, const Dataset& samples,
                     unsigned workers = 1);

// Optional dataset cache: "DLICDS1", u32 count, u32 width, then per sample
// width binary32 features and a u16 target.
void SaveDataset(const Dataset& data, const std::filesystem::path& path);
Dataset LoadDataset(const std::filesystem::path& path);

}  // namespace dlic

#endif  // DLIC_TRAIN_H_
