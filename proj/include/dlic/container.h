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

// End-to-end codec and the container format.
//
// Layout (little-endian):
//   "DLIC" u8 version=1
//   u32 width, u32 height, u32 depth, u8 bit_depth
//   window block (see SerializeWindow)
//   32-byte SHA-256 of the model file
//   u32 metadata length, metadata bytes (stored uncompressed)
//   u32 lane count, u32 byte length per lane, u32 CRC-32 per lane
//   lane streams, concatenated
//
// Row (slice, row) with global index slice * height + row is coded into
// stream (index % lane_count). Within a stream, symbols appear in wavefront
// step order and, inside a step, in (slice, row, col) order.

#ifndef DLIC_CONTAINER_H_
#define DLIC_CONTAINER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "dlic/byte_io.h"
#include "dlic/digest.h"
#include "dlic/grid.h"
#include "dlic/model.h"
#include "dlic/wavefront.h"

namespace dlic {

inline constexpr uint8_t kContainerVersion = 1;
inline constexpr uint32_t kDefaultMaxStreams = 64;

struct ContainerHeader {
  uint8_t version = kContainerVersion;
  Dims dims;
  int bit_depth = 8;
  WindowSpec window;
  Sha256Digest model_hash{};
  Bytes metadata;
  std::vector<uint32_t> lane_bytes;
  std::vector<uint32_t> lane_crc;
  // Offset of the first lane stream within the container.
  size_t payload_offset = 0;

  size_t payload_size() const;
};

// Parses and bounds-checks the header; does not verify CRCs.
// Throws kCorruptContainer / kVersionMismatch.
ContainerHeader ParseHeader(std::span<const uint8_t> container);

class LaneAssignment {
 public:
  LaneAssignment(const Dims& dims, uint32_t stream_count)
      : height_(dims.height), stream_count_(stream_count) {}

  uint32_t stream_count() const { return stream_count_; }
  uint32_t StreamOf(const Position& p) const {
    return static_cast<uint32_t>(
        (static_cast<uint64_t>(p.slice) * height_ + p.row) % stream_count_);
  }

 private:
  uint32_t height_;
  uint32_t stream_count_;
};

// Round-robin over min(max_streams, depth * height) streams.
LaneAssignment AssignLanes(const Dims& dims, uint32_t max_streams);

struct CodecOptions {
  uint32_t max_streams = kDefaultMaxStreams;  // encode only
  unsigned workers = 1;
};

// Wall time per phase, accumulated over all wavefront steps.
struct CodecStats {
  double extraction_seconds = 0;
  double prediction_seconds = 0;
  double coding_seconds = 0;
  size_t steps = 0;
};

// Throws kShapeMismatch (bit depth / window width vs. model),
// kNonCausalWindow, kInvalidArgument.
Bytes Encode(const Grid& grid, const DenseModel& model,
             const WindowSpec& window, std::span<const uint8_t> metadata,
             const CodecOptions& options = {}, CodecStats* stats = nullptr);

// Throws kCorruptContainer, kModelHashMismatch, kStreamUnderflow.
Grid Decode(std::span<const uint8_t> container, const DenseModel& model,
            const CodecOptions& options = {}, CodecStats* stats = nullptr);

struct BppReport {
  double total_bpp = 0;
  double payload_bpp = 0;  // lane streams only
  size_t total_bytes = 0;
  size_t payload_bytes = 0;
  size_t pixels = 0;
};

double BitsPerPixel(size_t byte_count, const Dims& dims);
BppReport ComputeBpp(std::span<const uint8_t> container);

}  // namespace dlic

#endif  // DLIC_CONTAINER_H_
