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

#include "dlic/grid.h"

#include <string>

#include "dlic/byte_io.h"
#include "dlic/error.h"

namespace dlic {
namespace {

void CheckShape(const Dims& dims, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 12) {
    Fail(ErrorCode::kInvalidArgument,
         "bit depth must be 8 or 12, got " + std::to_string(bit_depth));
  }
  if (dims.depth == 0 || dims.height == 0 || dims.width == 0) {
    Fail(ErrorCode::kInvalidArgument, "grid dimensions must be positive");
  }
}

}  // namespace

Grid::Grid(Dims dims, int bit_depth)
    : dims_(dims), bit_depth_(bit_depth), values_(dims.count(), 0) {
  CheckShape(dims, bit_depth);
}

Grid::Grid(Dims dims, int bit_depth, std::vector<uint16_t> values)
    : dims_(dims), bit_depth_(bit_depth), values_(std::move(values)) {
  CheckShape(dims, bit_depth);
  if (values_.size() != dims.count()) {
    Fail(ErrorCode::kShapeMismatch,
         "grid has " + std::to_string(values_.size()) + " samples, dims need " +
             std::to_string(dims.count()));
  }
  const uint32_t limit = 1u << bit_depth;
  for (uint16_t v : values_) {
    if (v >= limit) {
      Fail(ErrorCode::kInvalidArgument,
           "sample " + std::to_string(v) + " exceeds " +
               std::to_string(bit_depth) + "-bit range");
    }
  }
}

std::vector<uint8_t> SerializeMetadata(const VolumeMetadata& meta) {
  ByteWriter w;
  w.F32(meta.pixel_spacing);
  w.F32(meta.slice_spacing);
  w.F32(meta.slice_thickness);
  return w.Take();
}

VolumeMetadata ParseMetadata(std::span<const uint8_t> bytes) {
  ByteReader r(bytes, ErrorCode::kHeaderMismatch);
  VolumeMetadata meta;
  meta.pixel_spacing = r.F32();
  meta.slice_spacing = r.F32();
  meta.slice_thickness = r.F32();
  return meta;
}

std::vector<float> MetadataFloats(std::span<const uint8_t> bytes) {
  ByteReader r(bytes, ErrorCode::kCorruptContainer);
  std::vector<float> out;
  while (r.remaining() >= 4) out.push_back(r.F32());
  return out;
}

}  // namespace dlic
