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

#include "dlic/container.h"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <numeric>
#include <string>

#include "dlic/error.h"
#include "dlic/rans.h"
#include "dlic/thread_pool.h"

namespace dlic {
namespace {

constexpr char kMagic[] = "DLIC";
constexpr uint32_t kPrecision = rans::kCodecPrecision;

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void CheckCompatible(int bit_depth, const WindowSpec& window,
                     const DenseModel& model) {
  if (BitDepthForOutputSize(model.output_size()) != bit_depth) {
    Fail(ErrorCode::kShapeMismatch,
         "model with " + std::to_string(model.output_size()) +
             " outputs cannot code " + std::to_string(bit_depth) + "-bit data");
  }
  if (model.pixel_feature_count() != window.offsets.size()) {
    Fail(ErrorCode::kShapeMismatch,
         "model expects " + std::to_string(model.pixel_feature_count()) +
             " pixel features, window has " +
             std::to_string(window.offsets.size()) + " offsets");
  }
}

std::vector<float> ModelMetadata(const DenseModel& model,
                                 std::span<const uint8_t> metadata) {
  if (model.metadata_count() == 0) return {};
  return NormalizeMetadata(model, MetadataFloats(metadata));
}

// Shared per-step driver: extracts neighborhoods for `positions` from
// `grid`, predicts, and quantizes into `freqs` (rows x alphabet).
class StepPredictor {
 public:
  StepPredictor(const DenseModel& model, const WindowSpec& window,
                int bit_depth, std::vector<float> metadata, ThreadPool& pool,
                CodecStats* stats)
      : model_(model),
        window_(window),
        bit_depth_(bit_depth),
        metadata_(std::move(metadata)),
        pool_(pool),
        stats_(stats) {}

  const NeighborhoodBatch& Predict(const Grid& grid,
                                   std::span<const Position> positions) {
    auto t0 = Clock::now();
    batch_ = ExtractBatch(grid, positions, window_);
    const size_t rows = batch_.rows();
    const size_t width = model_.input_size();
    features_.resize(rows * width);
    for (size_t i = 0; i < rows; ++i) {
      MakeFeatures(batch_.row(i), bit_depth_, metadata_,
                   std::span<float>(features_).subspan(i * width, width));
    }
    auto t1 = Clock::now();
    const ProbabilityMatrix probs = ForwardBatch(model_, features_, rows, pool_);
    const size_t alphabet = probs.cols;
    freqs_.resize(rows * alphabet);
    pool_.ParallelFor(rows, [&](size_t begin, size_t end) {
      for (size_t i = begin; i < end; ++i) {
        QuantizePdfInto(probs.row(i), kPrecision,
                        std::span<uint32_t>(freqs_).subspan(i * alphabet, alphabet));
      }
    });
    alphabet_ = alphabet;
    if (stats_) {
      stats_->extraction_seconds += std::chrono::duration<double>(t1 - t0).count();
      stats_->prediction_seconds += Since(t1);
    }
    return batch_;
  }

  std::span<const uint32_t> freqs(size_t row) const {
    return std::span<const uint32_t>(freqs_).subspan(row * alphabet_, alphabet_);
  }

 private:
  const DenseModel& model_;
  const WindowSpec& window_;
  int bit_depth_;
  std::vector<float> metadata_;
  ThreadPool& pool_;
  CodecStats* stats_;

  NeighborhoodBatch batch_;
  std::vector<float> features_;
  std::vector<uint32_t> freqs_;
  size_t alphabet_ = 0;
};

}  // namespace

size_t ContainerHeader::payload_size() const {
  return std::accumulate(lane_bytes.begin(), lane_bytes.end(), size_t{0});
}

LaneAssignment AssignLanes(const Dims& dims, uint32_t max_streams) {
  if (max_streams == 0) Fail(ErrorCode::kInvalidArgument, "max_streams must be >= 1");
  const uint64_t rows = dims.rows();
  return LaneAssignment(dims, static_cast<uint32_t>(std::min<uint64_t>(max_streams, rows)));
}

Bytes Encode(const Grid& grid, const DenseModel& model,
             const WindowSpec& window, std::span<const uint8_t> metadata,
             const CodecOptions& options, CodecStats* stats) {
  CheckCompatible(grid.bit_depth(), window, model);
  ValidateWindow(window);
  if (metadata.size() > UINT32_MAX) Fail(ErrorCode::kInvalidArgument, "metadata too large");

  const Dims& dims = grid.dims();
  const WavefrontSchedule schedule = WavefrontSchedule::Build(dims, window);
  const LaneAssignment lanes = AssignLanes(dims, options.max_streams);
  ThreadPool pool(options.workers);
  StepPredictor predictor(model, window, grid.bit_depth(),
                          ModelMetadata(model, metadata), pool, stats);

  std::vector<std::vector<rans::SymbolRange>> pending(lanes.stream_count());
  for (size_t s = 0; s < schedule.step_count(); ++s) {
    const auto positions = schedule.step(s);
    if (positions.empty()) continue;
    const NeighborhoodBatch& batch = predictor.Predict(grid, positions);
    auto t0 = Clock::now();
    for (size_t i = 0; i < batch.rows(); ++i) {
      const Position& p = batch.targets[i];
      const auto freqs = predictor.freqs(i);
      const uint16_t value = grid.at(p);
      const uint32_t start = std::accumulate(freqs.begin(), freqs.begin() + value, 0u);
      pending[lanes.StreamOf(p)].push_back({start, freqs[value]});
    }
    if (stats) {
      stats->coding_seconds += Since(t0);
      ++stats->steps;
    }
  }

  auto t0 = Clock::now();
  std::vector<Bytes> streams(pending.size());
  pool.ParallelFor(pending.size(), [&](size_t begin, size_t end) {
    for (size_t j = begin; j < end; ++j) {
      streams[j] = rans::EncodeRanges(pending[j], kPrecision);
    }
  });

  ByteWriter w;
  w.Append(std::string_view(kMagic, 4));
  w.U8(kContainerVersion);
  w.U32(dims.width);
  w.U32(dims.height);
  w.U32(dims.depth);
  w.U8(static_cast<uint8_t>(grid.bit_depth()));
  SerializeWindow(window, w);
  w.Append(model.content_hash());
  w.U32(static_cast<uint32_t>(metadata.size()));
  w.Append(metadata);
  w.U32(lanes.stream_count());
  for (const Bytes& s : streams) w.U32(static_cast<uint32_t>(s.size()));
  for (const Bytes& s : streams) w.U32(Crc32(s));
  for (const Bytes& s : streams) w.Append(s);
  if (stats) stats->coding_seconds += Since(t0);
  return w.Take();
}

ContainerHeader ParseHeader(std::span<const uint8_t> container) {
  ByteReader r(container, ErrorCode::kCorruptContainer);
  const auto magic = r.Take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    Fail(ErrorCode::kCorruptContainer, "not a DLIC container (bad magic)");
  }
  ContainerHeader h;
  h.version = r.U8();
  if (h.version != kContainerVersion) {
    Fail(ErrorCode::kVersionMismatch,
         "unsupported container version " + std::to_string(h.version));
  }
  h.dims.width = r.U32();
  h.dims.height = r.U32();
  h.dims.depth = r.U32();
  h.bit_depth = r.U8();
  if (h.dims.count() == 0 || (h.bit_depth != 8 && h.bit_depth != 12)) {
    Fail(ErrorCode::kCorruptContainer, "invalid dimensions or bit depth");
  }
  h.window = ParseWindow(r);
  const auto hash = r.Take(32);
  std::copy(hash.begin(), hash.end(), h.model_hash.begin());
  const uint32_t meta_len = r.U32();
  const auto meta = r.Take(meta_len);
  h.metadata.assign(meta.begin(), meta.end());
  const uint32_t lane_count = r.U32();
  if (lane_count == 0 || lane_count > h.dims.rows()) {
    Fail(ErrorCode::kCorruptContainer,
         "lane count " + std::to_string(lane_count) + " invalid for " +
             std::to_string(h.dims.rows()) + " rows");
  }
  if (uint64_t{lane_count} * 8 > r.remaining()) {
    Fail(ErrorCode::kCorruptContainer, "truncated lane table");
  }
  h.lane_bytes.resize(lane_count);
  h.lane_crc.resize(lane_count);
  for (auto& n : h.lane_bytes) n = r.U32();
  for (auto& c : h.lane_crc) c = r.U32();
  h.payload_offset = r.position();
  const uint64_t payload = std::accumulate(h.lane_bytes.begin(), h.lane_bytes.end(),
                                           uint64_t{0});
  if (payload != r.remaining()) {
    Fail(ErrorCode::kCorruptContainer,
         "lane streams cover " + std::to_string(payload) + " bytes, container has " +
             std::to_string(r.remaining()));
  }
  return h;
}

Grid Decode(std::span<const uint8_t> container, const DenseModel& model,
            const CodecOptions& options, CodecStats* stats) {
  const ContainerHeader h = ParseHeader(container);
  if (h.model_hash != model.content_hash()) {
    Fail(ErrorCode::kModelHashMismatch,
         "container was encoded with model " + ToHex(h.model_hash) +
             ", got " + ToHex(model.content_hash()));
  }
  CheckCompatible(h.bit_depth, h.window, model);
  ValidateWindow(h.window);

  std::vector<std::span<const uint8_t>> stream_data;
  size_t offset = h.payload_offset;
  for (size_t j = 0; j < h.lane_bytes.size(); ++j) {
    stream_data.push_back(container.subspan(offset, h.lane_bytes[j]));
    offset += h.lane_bytes[j];
    if (Crc32(stream_data.back()) != h.lane_crc[j]) {
      Fail(ErrorCode::kCorruptContainer,
           "CRC mismatch in lane " + std::to_string(j));
    }
  }
  std::vector<rans::Decoder> decoders;
  decoders.reserve(stream_data.size());
  for (auto s : stream_data) decoders.emplace_back(s);

  Grid grid(h.dims, h.bit_depth);
  const WavefrontSchedule schedule = WavefrontSchedule::Build(h.dims, h.window);
  const LaneAssignment lanes(h.dims, static_cast<uint32_t>(h.lane_bytes.size()));
  ThreadPool pool(options.workers);
  StepPredictor predictor(model, h.window, h.bit_depth,
                          ModelMetadata(model, h.metadata), pool, stats);

  for (size_t s = 0; s < schedule.step_count(); ++s) {
    const auto positions = schedule.step(s);
    if (positions.empty()) continue;
    const NeighborhoodBatch& batch = predictor.Predict(grid, positions);
    auto t0 = Clock::now();
    for (size_t i = 0; i < batch.rows(); ++i) {
      const Position& p = batch.targets[i];
      const auto freqs = predictor.freqs(i);
      rans::Decoder& dec = decoders[lanes.StreamOf(p)];
      const uint32_t slot = dec.Slot(kPrecision);
      uint32_t sym = 0;
      uint32_t start = 0;
      while (start + freqs[sym] <= slot) start += freqs[sym++];
      dec.Advance({start, freqs[sym]}, kPrecision);
      grid.set(p, static_cast<uint16_t>(sym));
    }
    if (stats) {
      stats->coding_seconds += Since(t0);
      ++stats->steps;
    }
  }
  for (size_t j = 0; j < decoders.size(); ++j) {
    if (!decoders[j].Finished()) {
      Fail(ErrorCode::kCorruptContainer,
           "lane " + std::to_string(j) +
               " did not end in the initial coder state; predictions diverged "
               "from the encoder");
    }
  }
  return grid;
}

double BitsPerPixel(size_t byte_count, const Dims& dims) {
  return 8.0 * static_cast<double>(byte_count) / static_cast<double>(dims.count());
}

BppReport ComputeBpp(std::span<const uint8_t> container) {
  const ContainerHeader h = ParseHeader(container);
  BppReport report;
  report.total_bytes = container.size();
  report.payload_bytes = h.payload_size();
  report.pixels = h.dims.count();
  report.total_bpp = BitsPerPixel(report.total_bytes, h.dims);
  report.payload_bpp = BitsPerPixel(report.payload_bytes, h.dims);
  return report;
}

}  // namespace dlic
