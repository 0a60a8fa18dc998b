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

#include "dlic/wavefront.h"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "dlic/error.h"

namespace dlic {
namespace {

std::string Describe(const Offset& o) {
  return "(" + std::to_string(o.ds) + "," + std::to_string(o.dr) + "," +
         std::to_string(o.dc) + ")";
}

// 9x9 causal half-window; the target sits in the last row, third column
// from the right.
void AppendL9(std::vector<Offset>& out) {
  for (int dr = -8; dr <= 0; ++dr) {
    for (int dc = -6; dc <= 2; ++dc) {
      if (dr == 0 && dc >= 0) break;
      out.push_back({0, dr, dc});
    }
  }
}

}  // namespace

std::vector<std::string> WindowPresetNames() {
  return {"2d-small", "2d-l9", "3d-2layer"};
}

WindowSpec MakeWindowPreset(std::string_view name, uint8_t ws_shift) {
  WindowSpec w;
  if (name == "2d-small") {
    w.offsets = {{0, 0, -1}, {0, -1, -1}, {0, -1, 0}, {0, -1, 1}};
  } else if (name == "2d-l9") {
    AppendL9(w.offsets);
  } else if (name == "3d-2layer") {
    if (ws_shift > 127) {
      Fail(ErrorCode::kInvalidArgument, "ws_shift too large for int8 offsets");
    }
    AppendL9(w.offsets);
    // Full 9x9 square one slice down, shifted down by ws_shift rows.
    for (int dr = -8 + ws_shift; dr <= ws_shift; ++dr) {
      for (int dc = -6; dc <= 2; ++dc) w.offsets.push_back({-1, dr, dc});
    }
    w.ws_shift = ws_shift;
  } else {
    Fail(ErrorCode::kInvalidArgument,
         "unknown window preset '" + std::string(name) + "'");
  }
  return w;
}

void SerializeWindow(const WindowSpec& window, ByteWriter& out) {
  if (window.offsets.size() > std::numeric_limits<uint16_t>::max()) {
    Fail(ErrorCode::kInvalidArgument, "too many window offsets");
  }
  out.U16(static_cast<uint16_t>(window.offsets.size()));
  for (const Offset& o : window.offsets) {
    for (int v : {o.ds, o.dr, o.dc}) {
      if (v < -128 || v > 127) {
        Fail(ErrorCode::kInvalidArgument,
             "offset " + Describe(o) + " does not fit int8");
      }
      out.I8(static_cast<int8_t>(v));
    }
  }
  out.U16(window.fill_value);
  out.U8(window.ws_shift);
}

WindowSpec ParseWindow(ByteReader& in) {
  WindowSpec w;
  const uint16_t count = in.U16();
  w.offsets.reserve(count);
  for (uint16_t i = 0; i < count; ++i) {
    Offset o;
    o.ds = in.I8();
    o.dr = in.I8();
    o.dc = in.I8();
    w.offsets.push_back(o);
  }
  w.fill_value = in.U16();
  w.ws_shift = in.U8();
  return w;
}

Lags ComputeLags(const WindowSpec& window) {
  int max_dc_above = 0;
  for (const Offset& o : window.offsets) {
    if (o.ds < -1) {
      Fail(ErrorCode::kUnsupportedDepth,
           "offset " + Describe(o) + " reaches more than one slice back");
    }
    if (o.ds > 0) {
      Fail(ErrorCode::kNonCausalWindow,
           "offset " + Describe(o) + " reads a later slice");
    }
    if (o.ds == 0) {
      const bool causal = o.dr < 0 || (o.dr == 0 && o.dc < 0);
      if (!causal) {
        Fail(ErrorCode::kNonCausalWindow,
             "offset " + Describe(o) + " is not before the target");
      }
      if (o.dr < 0) max_dc_above = std::max(max_dc_above, o.dc);
    }
  }
  Lags lags;
  lags.row_lag = 1 + static_cast<uint32_t>(max_dc_above);
  int64_t slice_need = 0;
  for (const Offset& o : window.offsets) {
    if (o.ds != -1) continue;
    slice_need = std::max<int64_t>(
        slice_need, 1 + int64_t{o.dr} * lags.row_lag + o.dc);
  }
  lags.slice_lag = static_cast<uint32_t>(slice_need);
  return lags;
}

Lags ValidateWindow(const WindowSpec& window) {
  const Lags lags = ComputeLags(window);
  int max_dr = 0;
  int max_dc = 0;
  for (const Offset& o : window.offsets) {
    max_dr = std::max(max_dr, std::abs(o.dr));
    max_dc = std::max(max_dc, std::abs(o.dc));
  }
  const int64_t depth = 2;
  const int64_t height = 2 * int64_t{lags.row_lag} + max_dr + 2;
  const int64_t width = 2 * (int64_t{max_dc} + 1) + 2;
  auto step = [&](int64_t s, int64_t r, int64_t c) {
    return c + int64_t{lags.row_lag} * r + int64_t{lags.slice_lag} * s;
  };
  for (const Offset& o : window.offsets) {
    for (int64_t s = 0; s < depth; ++s) {
      for (int64_t r = 0; r < height; ++r) {
        for (int64_t c = 0; c < width; ++c) {
          const int64_t ns = s + o.ds, nr = r + o.dr, nc = c + o.dc;
          if (ns < 0 || nr < 0 || nc < 0 || ns >= depth || nr >= height ||
              nc >= width) {
            continue;
          }
          if (step(ns, nr, nc) >= step(s, r, c)) {
            Fail(ErrorCode::kNonCausalWindow,
                 "offset " + Describe(o) + " is not decoded before the target");
          }
        }
      }
    }
  }
  return lags;
}

WavefrontSchedule WavefrontSchedule::Build(const Dims& dims,
                                           const WindowSpec& window) {
  if (dims.count() == 0) {
    Fail(ErrorCode::kInvalidArgument, "schedule needs positive dimensions");
  }
  WavefrontSchedule sched;
  sched.dims_ = dims;
  sched.lags_ = ComputeLags(window);
  const uint64_t total = 1 + uint64_t{dims.width - 1} +
                         uint64_t{sched.lags_.row_lag} * (dims.height - 1) +
                         uint64_t{sched.lags_.slice_lag} * (dims.depth - 1);
  sched.steps_.resize(total);
  // Raster iteration appends in (slice, row, col) order within each step.
  for (uint32_t s = 0; s < dims.depth; ++s) {
    for (uint32_t r = 0; r < dims.height; ++r) {
      for (uint32_t c = 0; c < dims.width; ++c) {
        const Position p{s, r, c};
        sched.steps_[sched.StepOf(p)].push_back(p);
      }
    }
  }
  return sched;
}

void ExtractNeighborhood(const Grid& grid, const Position& target,
                         const WindowSpec& window, std::span<uint16_t> out) {
  const auto& offs = window.offsets;
  for (size_t j = 0; j < offs.size(); ++j) {
    const int64_t s = int64_t{target.slice} + offs[j].ds;
    const int64_t r = int64_t{target.row} + offs[j].dr;
    const int64_t c = int64_t{target.col} + offs[j].dc;
    out[j] = grid.Contains(s, r, c)
                 ? grid.at({static_cast<uint32_t>(s), static_cast<uint32_t>(r),
                            static_cast<uint32_t>(c)})
                 : window.fill_value;
  }
}

NeighborhoodBatch ExtractBatch(const Grid& grid,
                               std::span<const Position> positions,
                               const WindowSpec& window) {
  NeighborhoodBatch batch;
  batch.columns = window.offsets.size();
  batch.targets.assign(positions.begin(), positions.end());
  std::sort(batch.targets.begin(), batch.targets.end());
  batch.values.resize(batch.targets.size() * batch.columns);
  for (size_t i = 0; i < batch.targets.size(); ++i) {
    const Position& p = batch.targets[i];
    if (!grid.Contains(p.slice, p.row, p.col)) {
      Fail(ErrorCode::kPositionOutOfBounds,
           "position (" + std::to_string(p.slice) + "," +
               std::to_string(p.row) + "," + std::to_string(p.col) +
               ") outside grid");
    }
    ExtractNeighborhood(
        grid, p, window,
        std::span<uint16_t>(batch.values).subspan(i * batch.columns,
                                                  batch.columns));
  }
  return batch;
}

}  // namespace dlic
