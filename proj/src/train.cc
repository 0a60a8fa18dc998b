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

#include "dlic/train.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "dlic/byte_io.h"
#include "dlic/error.h"

namespace dlic {
namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic>;

constexpr double kLn2 = 0.69314718055994530942;
constexpr char kDatasetMagic[] = "DLICDS1";

}  // namespace

void Dataset::Append(std::span<const float> r, uint16_t target) {
  features.insert(features.end(), r.begin(), r.end());
  targets.push_back(target);
}

Dataset BuildDataset(std::span<const Grid> grids, const WindowSpec& window,
                     std::span<const std::vector<float>> normalized_metadata) {
  if (grids.empty()) Fail(ErrorCode::kEmptyInput, "no grids to build a dataset");
  if (!normalized_metadata.empty() && normalized_metadata.size() != grids.size()) {
    Fail(ErrorCode::kInvalidArgument, "need one metadata vector per grid");
  }
  const int bit_depth = grids.front().bit_depth();
  const size_t meta_width =
      normalized_metadata.empty() ? 0 : normalized_metadata.front().size();
  Dataset data;
  data.width = window.offsets.size() + meta_width;
  size_t total = 0;
  for (const Grid& g : grids) {
    if (g.bit_depth() != bit_depth) {
      Fail(ErrorCode::kInvalidArgument, "grids have different bit depths");
    }
    total += g.dims().count();
  }
  data.features.reserve(total * data.width);
  data.targets.reserve(total);

  std::vector<uint16_t> hood(window.offsets.size());
  std::vector<float> row(data.width);
  for (size_t gi = 0; gi < grids.size(); ++gi) {
    const Grid& g = grids[gi];
    std::span<const float> meta;
    if (!normalized_metadata.empty()) {
      meta = normalized_metadata[gi];
      if (meta.size() != meta_width) {
        Fail(ErrorCode::kInvalidArgument, "metadata vectors differ in length");
      }
    }
    const Dims& d = g.dims();
    for (uint32_t s = 0; s < d.depth; ++s) {
      for (uint32_t r = 0; r < d.height; ++r) {
        for (uint32_t c = 0; c < d.width; ++c) {
          const Position p{s, r, c};
          ExtractNeighborhood(g, p, window, hood);
          MakeFeatures(hood, bit_depth, meta, row);
          data.Append(row, g.at(p));
        }
      }
    }
  }
  return data;
}

std::vector<FeatureRange> FitFeatureRanges(
    std::span<const std::vector<float>> raw) {
  if (raw.empty()) return {};
  std::vector<FeatureRange> ranges(raw.front().size(),
                                   FeatureRange{INFINITY, -INFINITY});
  for (const auto& v : raw) {
    if (v.size() != ranges.size()) {
      Fail(ErrorCode::kInvalidArgument, "metadata vectors differ in length");
    }
    for (size_t i = 0; i < v.size(); ++i) {
      ranges[i].min = std::min(ranges[i].min, v[i]);
      ranges[i].max = std::max(ranges[i].max, v[i]);
    }
  }
  return ranges;
}

uint64_t ValueHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

ValueHistogram BuildHistogram(std::span<const Grid> grids) {
  ValueHistogram hist;
  for (const Grid& g : grids) {
    if (hist.counts.size() < g.alphabet_size()) hist.counts.resize(g.alphabet_size());
    for (uint16_t v : g.values()) ++hist.counts[v];
  }
  return hist;
}

ValueHistogram TargetHistogram(const Dataset& data, size_t alphabet_size) {
  ValueHistogram hist;
  hist.counts.assign(alphabet_size, 0);
  for (uint16_t t : data.targets) {
    if (t >= alphabet_size) {
      Fail(ErrorCode::kShapeMismatch,
           "target " + std::to_string(t) + " outside alphabet");
    }
    ++hist.counts[t];
  }
  return hist;
}

std::vector<double> ComputeClassWeights(const ValueHistogram& hist,
                                        double alpha) {
  if (alpha < 0) Fail(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  std::vector<double> w(hist.counts.size(), 1.0);
  const double total = static_cast<double>(hist.total());
  const auto present = static_cast<double>(
      std::count_if(hist.counts.begin(), hist.counts.end(),
                    [](uint64_t c) { return c > 0; }));
  if (present == 0) return w;
  double max_assigned = 0.0;
  for (size_t v = 0; v < w.size(); ++v) {
    if (hist.counts[v] == 0) continue;
    w[v] = std::pow(total / (present * static_cast<double>(hist.counts[v])), alpha);
    max_assigned = std::max(max_assigned, w[v]);
  }
  for (size_t v = 0; v < w.size(); ++v) {
    if (hist.counts[v] == 0) w[v] = max_assigned;
  }
  return w;
}

Dataset UpsampleRare(const Dataset& data, const ValueHistogram& hist,
                     uint64_t threshold, uint32_t factor) {
  if (factor < 1) Fail(ErrorCode::kInvalidArgument, "upsample factor must be >= 1");
  Dataset out = data;
  if (factor == 1) return out;
  for (size_t i = 0; i < data.size(); ++i) {
    const uint16_t t = data.targets[i];
    const uint64_t count = t < hist.counts.size() ? hist.counts[t] : 0;
    if (count >= threshold) continue;
    for (uint32_t k = 1; k < factor; ++k) out.Append(data.row(i), t);
  }
  return out;
}

DenseModel InitModel(const Architecture& arch, uint64_t seed,
                     std::vector<FeatureRange> metadata) {
  std::mt19937_64 rng(seed);
  std::vector<uint32_t> widths;
  widths.push_back(arch.input_size);
  widths.insert(widths.end(), arch.hidden.begin(), arch.hidden.end());
  widths.push_back(arch.output_size);
  std::vector<DenseLayer> layers;
  for (size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer;
    layer.in = widths[l];
    layer.out = widths[l + 1];
    const bool last = l + 2 == widths.size();
    layer.activation = last ? Activation::kNone : Activation::kRelu;
    const double limit = std::sqrt(6.0 / layer.in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    layer.weights.resize(size_t{layer.in} * layer.out);
    for (float& w : layer.weights) w = static_cast<float>(dist(rng));
    layer.bias.assign(layer.out, 0.0f);
    layers.push_back(std::move(layer));
  }
  return DenseModel(std::move(layers), std::move(metadata));
}

TrainableNetwork::TrainableNetwork(const DenseModel& model)
    : metadata_(model.metadata_ranges()) {
  size_t offset = 0;
  for (const DenseLayer& layer : model.layers()) {
    LayerShape shape{layer.in, layer.out, layer.activation, layer.pool_group,
                     offset, offset + layer.weights.size()};
    shapes_.push_back(shape);
    params_.insert(params_.end(), layer.weights.begin(), layer.weights.end());
    params_.insert(params_.end(), layer.bias.begin(), layer.bias.end());
    offset = params_.size();
  }
}

DenseModel TrainableNetwork::ToModel() const {
  std::vector<DenseLayer> layers;
  for (const LayerShape& s : shapes_) {
    DenseLayer layer;
    layer.in = s.in;
    layer.out = s.out;
    layer.activation = s.activation;
    layer.pool_group = s.pool_group;
    layer.weights.resize(size_t{s.in} * s.out);
    for (size_t i = 0; i < layer.weights.size(); ++i) {
      layer.weights[i] = static_cast<float>(params_[s.weight_offset + i]);
    }
    layer.bias.resize(s.out);
    for (size_t i = 0; i < s.out; ++i) {
      layer.bias[i] = static_cast<float>(params_[s.bias_offset + i]);
    }
    layers.push_back(std::move(layer));
  }
  return DenseModel(std::move(layers), metadata_);
}

double TrainableNetwork::Loss(const Dataset& data,
                              std::span<const size_t> indices,
                              std::span<const double> class_weights,
                              std::vector<double>* gradient) const {
  const auto batch = static_cast<Eigen::Index>(indices.size());
  Mat x(batch, data.width);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const auto r = data.row(indices[static_cast<size_t>(i)]);
    for (size_t j = 0; j < r.size(); ++j) x(i, static_cast<Eigen::Index>(j)) = r[j];
  }

  std::vector<Mat> inputs;
  std::vector<Mat> pre;
  inputs.reserve(shapes_.size());
  pre.reserve(shapes_.size());
  for (const LayerShape& s : shapes_) {
    Eigen::Map<const Mat> w(params_.data() + s.weight_offset, s.in, s.out);
    Eigen::Map<const RowVec> b(params_.data() + s.bias_offset, s.out);
    Mat z = x * w;
    z.rowwise() += b;
    Mat a = s.activation == Activation::kRelu ? Mat(z.cwiseMax(0.0)) : z;
    if (s.pool_group) {
      const Eigen::Index groups = s.out / s.pool_group;
      Mat pooled(batch, groups);
      for (Eigen::Index k = 0; k < groups; ++k) {
        pooled.col(k) = a.middleCols(k * s.pool_group, s.pool_group).rowwise().sum() /
                        static_cast<double>(s.pool_group);
      }
      a = std::move(pooled);
    }
    inputs.push_back(std::move(x));
    pre.push_back(std::move(z));
    x = std::move(a);
  }

  // x now holds logits.
  double loss = 0.0;
  Mat grad_logits(batch, x.cols());
  for (Eigen::Index i = 0; i < batch; ++i) {
    const uint16_t t = data.targets[indices[static_cast<size_t>(i)]];
    const double wt = class_weights.empty() ? 1.0 : class_weights[t];
    const double m = x.row(i).maxCoeff();
    const RowVec e = (x.row(i).array() - m).exp().matrix();
    const double sum = e.sum();
    loss += wt * (std::log(sum) + m - x(i, t)) / kLn2;
    if (gradient) {
      grad_logits.row(i) = e / sum;
      grad_logits(i, t) -= 1.0;
      grad_logits.row(i) *= wt / (kLn2 * static_cast<double>(batch));
    }
  }
  loss /= static_cast<double>(batch);
  if (!gradient) return loss;

  gradient->assign(params_.size(), 0.0);
  Mat g = std::move(grad_logits);
  for (size_t l = shapes_.size(); l-- > 0;) {
    const LayerShape& s = shapes_[l];
    if (s.pool_group) {
      Mat unpooled(batch, s.out);
      for (uint32_t o = 0; o < s.out; ++o) {
        unpooled.col(o) = g.col(o / s.pool_group) / static_cast<double>(s.pool_group);
      }
      g = std::move(unpooled);
    }
    if (s.activation == Activation::kRelu) {
      g = g.cwiseProduct((pre[l].array() > 0.0).cast<double>().matrix());
    }
    Eigen::Map<Mat> dw(gradient->data() + s.weight_offset, s.in, s.out);
    Eigen::Map<RowVec> db(gradient->data() + s.bias_offset, s.out);
    dw.noalias() = inputs[l].transpose() * g;
    db = g.colwise().sum();
    if (l > 0) {
      Eigen::Map<const Mat> w(params_.data() + s.weight_offset, s.in, s.out);
      g = g * w.transpose();
    }
  }
  return loss;
}

TrainResult TrainModel(const DenseModel& initial, const Dataset& samples,
                       const TrainConfig& cfg, const Dataset* validation) {
  if (samples.size() == 0) Fail(ErrorCode::kEmptyInput, "no training samples");
  if (samples.width != initial.input_size()) {
    Fail(ErrorCode::kShapeMismatch,
         "sample width " + std::to_string(samples.width) +
             " != model input " + std::to_string(initial.input_size()));
  }
  if (cfg.batch_size == 0 || cfg.learning_rate <= 0) {
    Fail(ErrorCode::kInvalidArgument, "batch size and learning rate must be positive");
  }
  const ValueHistogram hist = TargetHistogram(samples, initial.output_size());
  const std::vector<double> weights = ComputeClassWeights(hist, cfg.weight_alpha);
  const bool upsample = cfg.upsample_threshold > 0 && cfg.upsample_factor > 1;
  const Dataset upsampled =
      upsample ? UpsampleRare(samples, hist, cfg.upsample_threshold, cfg.upsample_factor)
               : Dataset{};
  const Dataset& data = upsample ? upsampled : samples;

  TrainableNetwork net(initial);
  auto params = net.parameters();
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), grad;
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;

  std::mt19937_64 rng(cfg.seed);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});

  TrainResult result{initial, {}};
  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t n = std::min(cfg.batch_size, order.size() - start);
      const double loss = net.Loss(
          data, std::span<const size_t>(order).subspan(start, n), weights, &grad);
      if (!std::isfinite(loss)) {
        Fail(ErrorCode::kDivergedLoss,
             "loss became non-finite in epoch " + std::to_string(epoch));
      }
      beta1_t *= kBeta1;
      beta2_t *= kBeta2;
      for (size_t i = 0; i < params.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1 - kBeta1) * grad[i];
        v[i] = kBeta2 * v[i] + (1 - kBeta2) * grad[i] * grad[i];
        const double m_hat = m[i] / (1 - beta1_t);
        const double v_hat = v[i] / (1 - beta2_t);
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + kEps);
      }
    }
    result.model = net.ToModel();
    result.vloss_history.push_back(
        EvaluateVloss(result.model, validation ? *validation : samples));
  }
  if (cfg.epochs == 0) result.model = net.ToModel();
  return result;
}

double EvaluateVloss(const DenseModel& model, const Dataset& samples,
                     unsigned workers) {
  if (samples.size() == 0) Fail(ErrorCode::kEmptyInput, "no samples to evaluate");
  if (samples.width != model.input_size()) {
    Fail(ErrorCode::kShapeMismatch, "sample width does not match model input");
  }
  constexpr size_t kChunk = 1024;
  const double floor_p = std::ldexp(1.0, -30);
  ThreadPool pool(workers);
  double total = 0.0;
  for (size_t start = 0; start < samples.size(); start += kChunk) {
    const size_t n = std::min(kChunk, samples.size() - start);
    const auto feats = std::span<const float>(samples.features)
                           .subspan(start * samples.width, n * samples.width);
    const ProbabilityMatrix probs = ForwardBatch(model, feats, n, pool);
    for (size_t i = 0; i < n; ++i) {
      const uint16_t t = samples.targets[start + i];
      if (t >= probs.cols) Fail(ErrorCode::kShapeMismatch, "target outside alphabet");
      total += -std::log2(std::max<double>(probs.row(i)[t], floor_p));
    }
  }
  return total / static_cast<double>(samples.size());
}

void SaveDataset(const Dataset& data, const std::filesystem::path& path) {
  ByteWriter w;
  w.Append(std::string_view(kDatasetMagic, 7));
  w.U32(static_cast<uint32_t>(data.size()));
  w.U32(static_cast<uint32_t>(data.width));
  for (size_t i = 0; i < data.size(); ++i) {
    for (float f : data.row(i)) w.F32(f);
    w.U16(data.targets[i]);
  }
  WriteFile(path, w.bytes());
}

Dataset LoadDataset(const std::filesystem::path& path) {
  const Bytes bytes = ReadFile(path);
  ByteReader r(bytes, ErrorCode::kCorruptModel);
  const auto magic = r.Take(7);
  if (std::memcmp(magic.data(), kDatasetMagic, 7) != 0) {
    Fail(ErrorCode::kCorruptModel, "not a dataset cache: " + path.string());
  }
  const uint32_t count = r.U32();
  Dataset data;
  data.width = r.U32();
  std::vector<float> row(data.width);
  for (uint32_t i = 0; i < count; ++i) {
    for (float& f : row) f = r.F32();
    data.Append(row, r.U16());
  }
  return data;
}

}  // namespace dlic
