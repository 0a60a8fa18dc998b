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

#include "dlic/toolkit.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "dlic/error.h"
#include "dlic/image_io.h"

namespace dlic {
namespace {

using Clock = std::chrono::steady_clock;

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::vector<float> ModelMetadata(const DenseModel& model,
                               std::span<const uint8_t> metadata) {
  if (model.metadata_count() == 0) return {};
  return NormalizeMetadata(model, MetadataFloats(metadata));
}

}  // namespace

CorpusItem LoadItem(const std::filesystem::path& path) {
  CorpusItem item;
  item.name = path.filename().string();
  if (path.extension() == ".pgm") {
    item.grid = ReadPgm(ReadFile(path));
  } else {
    Volume v = ReadVolume(path);
    item.grid = std::move(v.grid);
    item.metadata = SerializeMetadata(v.metadata);
  }
  return item;
}

std::vector<CorpusItem> LoadCorpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    Fail(ErrorCode::kIoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".hdr")) {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<CorpusItem> corpus;
  for (const auto& p : paths) corpus.push_back(LoadItem(p));
  return corpus;
}

std::string HistogramCsv(const ValueHistogram& hist) {
  std::string out = "value,count,log10_count\n";
  for (size_t v = 0; v < hist.counts.size(); ++v) {
    if (hist.counts[v] == 0) continue;
    out += std::to_string(v) + "," + std::to_string(hist.counts[v]) + "," +
           Fmt("%.4f", std::log10(static_cast<double>(hist.counts[v]))) + "\n";
  }
  return out;
}

double CountRatio(const ValueHistogram& hist) {
  uint64_t lo = UINT64_MAX, hi = 0;
  for (uint64_t c : hist.counts) {
    if (c == 0) continue;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return hi == 0 ? 0.0 : static_cast<double>(hi) / static_cast<double>(lo);
}

size_t PdfInspection::Mode() const {
  return static_cast<size_t>(
      std::distance(pdf.begin(), std::max_element(pdf.begin(), pdf.end())));
}

PdfInspection InspectPdf(const Grid& grid, const Position& position,
                         const DenseModel& model, const WindowSpec& window,
                         std::span<const uint8_t> metadata) {
  const Position target[] = {position};
  const NeighborhoodBatch batch = ExtractBatch(grid, target, window);
  if (model.pixel_feature_count() != window.offsets.size()) {
    Fail(ErrorCode::kShapeMismatch, "model input does not match the window");
  }
  const auto meta = ModelMetadata(model, metadata);
  std::vector<float> features(model.input_size());
  MakeFeatures(batch.row(0), grid.bit_depth(), meta, features);
  const ProbabilityMatrix probs = ForwardBatch(model, features, 1, InferenceConfig{});
  PdfInspection out;
  out.position = position;
  out.offsets = window.offsets;
  out.neighborhood.assign(batch.values.begin(), batch.values.end());
  out.pdf.assign(probs.values.begin(), probs.values.end());
  out.target = grid.at(position);
  return out;
}

std::string InspectionCsv(const PdfInspection& in) {
  std::string out = "# window\nds,dr,dc,value\n";
  for (size_t i = 0; i < in.offsets.size(); ++i) {
    const Offset& o = in.offsets[i];
    out += std::to_string(o.ds) + "," + std::to_string(o.dr) + "," +
           std::to_string(o.dc) + "," + std::to_string(in.neighborhood[i]) + "\n";
  }
  out += "# pdf target=" + std::to_string(in.target) +
         " mode=" + std::to_string(in.Mode()) + "\nvalue,probability,is_target\n";
  for (size_t v = 0; v < in.pdf.size(); ++v) {
    out += std::to_string(v) + "," + Fmt("%.9g", in.pdf[v]) + "," +
           (v == in.target ? "1" : "0") + "\n";
  }
  return out;
}

BenchReport Bench(const std::vector<CorpusItem>& corpus, const DenseModel& model,
                  const WindowSpec& window, const BenchOptions& options) {
  if (corpus.empty()) Fail(ErrorCode::kEmptyInput, "empty benchmark corpus");
  BenchReport report;
  CodecOptions codec{options.max_streams, options.workers};
  size_t total_bytes = 0, payload_bytes = 0;
  double vloss_weighted = 0;
  CodecStats phases;
  for (const CorpusItem& item : corpus) {
    ItemReport r;
    r.name = item.name;
    r.pixels = item.grid.dims().count();

    auto t0 = Clock::now();
    const Bytes encoded = Encode(item.grid, model, window, item.metadata, codec,
                                 &r.encode_stats);
    r.encode_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    t0 = Clock::now();
    const Grid decoded = Decode(encoded, model, codec);
    r.decode_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!(decoded == item.grid)) {
      Fail(ErrorCode::kCorruptContainer, "round trip mismatch for " + item.name);
    }

    const BppReport bpp = ComputeBpp(encoded);
    r.total_bpp = bpp.total_bpp;
    r.payload_bpp = bpp.payload_bpp;
    r.steps = r.encode_stats.steps;
    const Grid grids[] = {item.grid};
    std::vector<std::vector<float>> meta;
    if (model.metadata_count() > 0) meta.push_back(ModelMetadata(model, item.metadata));
    r.vloss = EvaluateVloss(model, BuildDataset(grids, window, meta), options.workers);

    report.pixels += r.pixels;
    total_bytes += bpp.total_bytes;
    payload_bytes += bpp.payload_bytes;
    vloss_weighted += r.vloss * static_cast<double>(r.pixels);
    report.encode_seconds += r.encode_seconds;
    report.decode_seconds += r.decode_seconds;
    phases.extraction_seconds += r.encode_stats.extraction_seconds;
    phases.prediction_seconds += r.encode_stats.prediction_seconds;
    phases.coding_seconds += r.encode_stats.coding_seconds;
    report.items.push_back(std::move(r));
  }
  const double pixels = static_cast<double>(report.pixels);
  report.total_bpp = 8.0 * static_cast<double>(total_bytes) / pixels;
  report.payload_bpp = 8.0 * static_cast<double>(payload_bytes) / pixels;
  report.vloss = vloss_weighted / pixels;
  report.pixels_per_second =
      report.encode_seconds > 0 ? pixels / report.encode_seconds : 0;
  const double phase_total = phases.extraction_seconds +
                             phases.prediction_seconds + phases.coding_seconds;
  if (phase_total > 0) {
    report.extraction_share = phases.extraction_seconds / phase_total;
    report.prediction_share = phases.prediction_seconds / phase_total;
    report.coding_share = phases.coding_seconds / phase_total;
  }
  return report;
}

std::string FormatBench(const BenchReport& report) {
  std::string out =
      "name,pixels,steps,total_bpp,payload_bpp,vloss,encode_s,decode_s\n";
  for (const ItemReport& r : report.items) {
    out += r.name + "," + std::to_string(r.pixels) + "," + std::to_string(r.steps) +
           "," + Fmt("%.4f", r.total_bpp) + "," + Fmt("%.4f", r.payload_bpp) + "," +
           Fmt("%.4f", r.vloss) + "," + Fmt("%.4f", r.encode_seconds) + "," +
           Fmt("%.4f", r.decode_seconds) + "\n";
  }
  out += "# aggregate pixels=" + std::to_string(report.pixels) +
         " total_bpp=" + Fmt("%.4f", report.total_bpp) +
         " payload_bpp=" + Fmt("%.4f", report.payload_bpp) +
         " vloss=" + Fmt("%.4f", report.vloss) +
         " encode_s=" + Fmt("%.4f", report.encode_seconds) +
         " decode_s=" + Fmt("%.4f", report.decode_seconds) +
         " pixels_per_s=" + Fmt("%.1f", report.pixels_per_second) + "\n";
  out += "# time share extraction=" + Fmt("%.3f", report.extraction_share) +
         " prediction=" + Fmt("%.3f", report.prediction_share) +
         " coding=" + Fmt("%.3f", report.coding_share) + "\n";
  return out;
}

}  // namespace dlic
