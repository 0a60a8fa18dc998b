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

// Causal windows and the wavefront schedule.
//
// A pixel at (s, r, c) is coded in step c + row_lag * r + slice_lag * s.
// Pixels that share a step are mutually independent and are predicted and
// coded as one batch. A window is usable only if every offset lands on a
// strictly earlier step.

#ifndef DLIC_WAVEFRONT_H_
#define DLIC_WAVEFRONT_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dlic/byte_io.h"
#include "dlic/grid.h"

namespace dlic {

// Neighbor offset relative to the target: slice, row and column deltas.
struct Offset {
  int ds = 0;
  int dr = 0;
  int dc = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

struct WindowSpec {
  std::vector<Offset> offsets;
  uint16_t fill_value = 0;
  // Row shift of the lower-slice square in the 3D preset; informational.
  uint8_t ws_shift = 0;

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

// Preset names: "2d-small", "2d-l9", "3d-2layer".
std::vector<std::string> WindowPresetNames();
WindowSpec MakeWindowPreset(std::string_view name, uint8_t ws_shift = 0);

// Container block: u16 count, (ds, dr, dc) as int8 triples, u16 fill, u8 ws.
void SerializeWindow(const WindowSpec& window, ByteWriter& out);
WindowSpec ParseWindow(ByteReader& in);

struct Lags {
  uint32_t row_lag = 1;
  uint32_t slice_lag = 0;
  friend bool operator==(const Lags&, const Lags&) = default;
};

// Throws kNonCausalWindow for same-slice offsets that are not earlier in
// raster order (or any ds > 0), kUnsupportedDepth for ds < -1.
Lags ComputeLags(const WindowSpec& window);

// Checks every offset against the derived lags on a synthetic grid large
// enough to realize each offset. Throws kNonCausalWindow naming the offset.
Lags ValidateWindow(const WindowSpec& window);

class WavefrontSchedule {
 public:
  static WavefrontSchedule Build(const Dims& dims, const WindowSpec& window);

  const Dims& dims() const { return dims_; }
  const Lags& lags() const { return lags_; }
  size_t step_count() const { return steps_.size(); }
  // Positions of one step in (slice, row, col) order; each (slice, row) lane
  // contributes at most one position to a step. Steps may be empty when
  // row_lag exceeds the width.
  std::span<const Position> step(size_t i) const { return steps_[i]; }

  uint64_t StepOf(const Position& p) const {
    return p.col + uint64_t{lags_.row_lag} * p.row +
           uint64_t{lags_.slice_lag} * p.slice;
  }
  static size_t LaneOf(const Dims& dims, const Position& p) {
    return static_cast<size_t>(p.slice) * dims.height + p.row;
  }

 private:
  Dims dims_;
  Lags lags_;
  std::vector<std::vector<Position>> steps_;
};

// One row per target position (sorted by position), one column per window
// offset in declared order. Out-of-grid neighbors read the fill value.
struct NeighborhoodBatch {
  size_t columns = 0;
  std::vector<Position> targets;
  std::vector<uint16_t> values;  // targets.size() x columns, row-major

  size_t rows() const { return targets.size(); }
  std::span<const uint16_t> row(size_t i) const {
    return std::span<const uint16_t>(values).subspan(i * columns, columns);
  }
};

// Throws kPositionOutOfBounds.
NeighborhoodBatch ExtractBatch(const Grid& grid,
                               std::span<const Position> positions,
                               const WindowSpec& window);

// Writes the neighborhood of `target` into `out` (size == offsets.size()).
void ExtractNeighborhood(const Grid& grid, const Position& target,
                         const WindowSpec& window, std::span<uint16_t> out);

}  // namespace dlic

#endif  // DLIC_WAVEFRONT_H_
