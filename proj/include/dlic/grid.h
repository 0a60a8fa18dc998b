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

#ifndef DLIC_GRID_H_
#define DLIC_GRID_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dlic {

struct Dims {
  uint32_t depth = 1;
  uint32_t height = 0;
  uint32_t width = 0;

  size_t count() const {
    return static_cast<size_t>(depth) * height * width;
  }
  // Number of (slice, row) lanes.
  size_t rows() const { return static_cast<size_t>(depth) * height; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

// Grid coordinate. Ordering is (slice, row, col), i.e. raster order.
struct Position {
  uint32_t slice = 0;
  uint32_t row = 0;
  uint32_t col = 0;
  friend auto operator<=>(const Position&, const Position&) = default;
};

// A 2D image (depth == 1) or a 3D volume of unsigned samples with a declared
// bit depth of 8 or 12. Samples are stored slice-major, then row-major.
class Grid {
 public:
  Grid() = default;
  Grid(Dims dims, int bit_depth);
  Grid(Dims dims, int bit_depth, std::vector<uint16_t> values);

  static Grid Plane(uint32_t height, uint32_t width, int bit_depth) {
    return Grid(Dims{1, height, width}, bit_depth);
  }

  const Dims& dims() const { return dims_; }
  int bit_depth() const { return bit_depth_; }
  uint32_t max_value() const { return (1u << bit_depth_) - 1; }
  size_t alphabet_size() const { return size_t{1} << bit_depth_; }

  size_t Index(const Position& p) const {
    return (static_cast<size_t>(p.slice) * dims_.height + p.row) * dims_.width +
           p.col;
  }
  bool Contains(int64_t slice, int64_t row, int64_t col) const {
    return slice >= 0 && row >= 0 && col >= 0 && slice < dims_.depth &&
           row < dims_.height && col < dims_.width;
  }
  uint16_t at(const Position& p) const { return values_[Index(p)]; }
  void set(const Position& p, uint16_t v) { values_[Index(p)] = v; }

  std::span<const uint16_t> values() const { return values_; }
  std::span<uint16_t> mutable_values() { return values_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Dims dims_;
  int bit_depth_ = 8;
  std::vector<uint16_t> values_;
};

// Acquisition metadata carried alongside a volume (pixel spacing, slice
// spacing, slice thickness).
struct VolumeMetadata {
  float pixel_spacing = 1.0f;
  float slice_spacing = 1.0f;
  float slice_thickness = 1.0f;
  friend bool operator==(const VolumeMetadata&, const VolumeMetadata&) =
      default;
};

struct Volume {
  Grid grid;
  VolumeMetadata metadata;
};

// Packs the three reals as little-endian binary32, the layout the codec
// stores in its metadata block and reads metadata features from.
std::vector<uint8_t> SerializeMetadata(const VolumeMetadata& meta);
VolumeMetadata ParseMetadata(std::span<const uint8_t> bytes);

// Interprets a metadata block as consecutive little-endian binary32 values.
std::vector<float> MetadataFloats(std::span<const uint8_t> bytes);

}  // namespace dlic

#endif  // DLIC_GRID_H_
