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

#include "support.h"

#include <algorithm>
#include <cmath>

#include "dlic/container.h"
#include "dlic/rans.h"

namespace dlic::testing {

Grid RandomGrid(const Dims& dims, int bit_depth, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint32_t> pick(0, (1u << bit_depth) - 1);
  std::vector<uint16_t> v(dims.count());
  for (auto& x : v) x = static_cast<uint16_t>(pick(rng));
  return Grid(dims, bit_depth, std::move(v));
}

Grid ConstantGrid(const Dims& dims, int bit_depth, uint16_t value) {
  return Grid(dims, bit_depth, std::vector<uint16_t>(dims.count(), value));
}

Grid MarkovTexture(uint32_t height, uint32_t width, int spread, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> noise(-spread, spread);
  std::uniform_int_distribution<int> start(64, 192);
  Grid g = Grid::Plane(height, width, 8);
  const int origin = start(rng);
  for (uint32_t r = 0; r < height; ++r) {
    for (uint32_t c = 0; c < width; ++c) {
      const int left = c > 0 ? g.at({0, r, c - 1}) : -1;
      const int up = r > 0 ? g.at({0, r - 1, c}) : -1;
      int base;
      if (left < 0 && up < 0) {
        base = origin;
      } else if (left < 0) {
        base = up;
      } else if (up < 0) {
        base = left;
      } else {
        base = (left + up + 1) / 2;
      }
      g.set({0, r, c}, static_cast<uint16_t>(std::clamp(base + noise(rng), 0, 255)));
    }
  }
  return g;
}

Grid CorrelatedVolume(const Dims& dims, int bit_depth, double flip_rate,
                      uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int max_value = (1 << bit_depth) - 1;
  std::uniform_int_distribution<int> pick(0, max_value);
  std::bernoulli_distribution flip(flip_rate);
  std::bernoulli_distribution up(0.5);
  Grid g(dims, bit_depth);
  for (uint32_t s = 0; s < dims.depth; ++s) {
    for (uint32_t r = 0; r < dims.height; ++r) {
      for (uint32_t c = 0; c < dims.width; ++c) {
        int v;
        if (s == 0) {
          v = pick(rng);
        } else {
          v = g.at({s - 1, r, c});
          if (flip(rng)) v += up(rng) ? 1 : -1;
        }
        g.set({s, r, c}, static_cast<uint16_t>(std::clamp(v, 0, max_value)));
      }
    }
  }
  return g;
}

Grid ExponentialGrid(const Dims& dims, int bit_depth, double mean, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> dist(1.0 / mean);
  const double max_value = (1 << bit_depth) - 1;
  std::vector<uint16_t> v(dims.count());
  for (auto& x : v) {
    x = static_cast<uint16_t>(std::min(std::floor(dist(rng)), max_value));
  }
  return Grid(dims, bit_depth, std::move(v));
}

DenseModel UniformModel(uint32_t inputs, uint32_t outputs,
                        std::vector<FeatureRange> metadata) {
  DenseLayer layer;
  layer.in = inputs;
  layer.out = outputs;
  layer.weights.assign(size_t{inputs} * outputs, 0.0f);
  layer.bias.assign(outputs, 0.0f);
  return DenseModel({layer}, std::move(metadata));
}

DenseModel RandomModel(uint32_t inputs, std::span<const uint32_t> hidden,
                       uint32_t outputs, uint64_t seed, float scale,
                       std::vector<FeatureRange> metadata) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> w(-scale, scale);
  std::vector<DenseLayer> layers;
  uint32_t in = inputs;
  auto add = [&](uint32_t out, Activation act) {
    DenseLayer l;
    l.in = in;
    l.out = out;
    l.activation = act;
    l.weights.resize(size_t{in} * out);
    l.bias.resize(out);
    for (auto& x : l.weights) x = w(rng);
    for (auto& x : l.bias) x = w(rng);
    layers.push_back(std::move(l));
    in = out;
  };
  for (uint32_t h : hidden) add(h, Activation::kRelu);
  add(outputs, Activation::kNone);
  return DenseModel(std::move(layers), std::move(metadata));
}

Grid ReferenceDecode(std::span<const uint8_t> container, const DenseModel& model) {
  const ContainerHeader h = ParseHeader(container);
  if (h.model_hash != model.content_hash()) {
    Fail(ErrorCode::kModelHashMismatch, "reference decoder: model hash differs");
  }
  if (h.lane_bytes.size() != h.dims.rows()) {
    Fail(ErrorCode::kInvalidArgument, "reference decoder needs one stream per lane");
  }
  std::vector<rans::Decoder> lanes;
  size_t offset = h.payload_offset;
  for (uint32_t n : h.lane_bytes) {
    lanes.emplace_back(container.subspan(offset, n));
    offset += n;
  }
  std::vector<float> meta;
  if (model.metadata_count() > 0) {
    meta = NormalizeMetadata(model, MetadataFloats(h.metadata));
  }

  Grid out(h.dims, h.bit_depth);
  std::vector<uint16_t> hood(h.window.offsets.size());
  std::vector<float> features(model.input_size());
  std::vector<uint32_t> freqs(out.alphabet_size());
  for (uint32_t s = 0; s < h.dims.depth; ++s) {
    for (uint32_t r = 0; r < h.dims.height; ++r) {
      rans::Decoder& lane = lanes[size_t{s} * h.dims.height + r];
      for (uint32_t c = 0; c < h.dims.width; ++c) {
        const Position p{s, r, c};
        ExtractNeighborhood(out, p, h.window, hood);
        MakeFeatures(hood, h.bit_depth, meta, features);
        const ProbabilityMatrix probs =
            ForwardBatch(model, features, 1, InferenceConfig{});
        QuantizePdfInto(probs.row(0), rans::kCodecPrecision, freqs);
        const auto table = rans::SymbolTable::Build(freqs, rans::kCodecPrecision);
        out.set(p, static_cast<uint16_t>(lane.Decode(table)));
      }
    }
  }
  for (const auto& lane : lanes) {
    if (!lane.Finished()) Fail(ErrorCode::kCorruptContainer, "lane not fully consumed");
  }
  return out;
}

std::filesystem::path ScratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dlic_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dlic::testing
