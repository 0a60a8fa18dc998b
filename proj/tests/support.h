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

// Shared fixtures for the test binaries: synthetic sources, small models,
// and a sequential reference decoder.

#ifndef DLIC_TESTS_SUPPORT_H_
#define DLIC_TESTS_SUPPORT_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dlic/error.h"
#include "dlic/grid.h"
#include "dlic/model.h"
#include "dlic/wavefront.h"

namespace dlic::testing {

Grid RandomGrid(const Dims& dims, int bit_depth, uint64_t seed);
Grid ConstantGrid(const Dims& dims, int bit_depth, uint16_t value);

// 8-bit texture where each pixel is the rounded mean of its left and upper
// neighbors plus uniform noise in [-spread, spread].
Grid MarkovTexture(uint32_t height, uint32_t width, int spread, uint64_t seed);

// Slice 0 is i.i.d. noise over [0, 2^bit_depth); every later slice copies
// the previous one and perturbs each pixel by +-1 with probability
// `flip_rate`.
Grid CorrelatedVolume(const Dims& dims, int bit_depth, double flip_rate,
                      uint64_t seed);

// Values drawn from a discretized exponential with the given mean, clamped
// to the alphabet: a long-tailed histogram.
Grid ExponentialGrid(const Dims& dims, int bit_depth, double mean, uint64_t seed);

// Single zero layer: uniform softmax over `outputs` symbols.
DenseModel UniformModel(uint32_t inputs, uint32_t outputs,
                        std::vector<FeatureRange> metadata = {});

// ReLU hidden layers with weights uniform in [-scale, scale].
DenseModel RandomModel(uint32_t inputs, std::span<const uint32_t> hidden,
                       uint32_t outputs, uint64_t seed, float scale = 0.5f,
                       std::vector<FeatureRange> metadata = {});

// Raster-order decoder with one forward pass per pixel. Requires one
// stream per lane. Throws kInvalidArgument otherwise.
Grid ReferenceDecode(std::span<const uint8_t> container, const DenseModel& model);

std::filesystem::path ScratchDir(const std::string& name);

template <typename Fn>
ErrorCode CaptureCode(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a dlic::Error");
}

}  // namespace dlic::testing

#endif  // DLIC_TESTS_SUPPORT_H_
