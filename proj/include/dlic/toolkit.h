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

// Corpus loading, statistics dumps, PDF inspection and benchmarking.

#ifndef DLIC_TOOLKIT_H_
#define DLIC_TOOLKIT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "dlic/container.h"
#include "dlic/grid.h"
#include "dlic/model.h"
#include "dlic/train.h"
#include "dlic/wavefront.h"

namespace dlic {

struct CorpusItem {
  std::string name;
  Grid grid;
  // Metadata block stored with the encoded item: empty for PGM images, the
  // serialized VolumeMetadata for volumes.
  Bytes metadata;
};

// Reads a single .pgm image or a volume (.hdr/.raw pair).
CorpusItem LoadItem(const std::filesystem::path& path);
// All *.pgm and *.hdr files in `dir`, sorted by file name.
std::vector<CorpusItem> LoadCorpus(const std::filesystem::path& dir);

// "value,count,log10_count" for every value with a nonzero count.
std::string HistogramCsv(const ValueHistogram& hist);
// Largest over smallest nonzero count (0 if the histogram is empty).
double CountRatio(const ValueHistogram& hist);

struct PdfInspection {
  Position position;
  std::vector<Offset> offsets;
  std::vector<uint16_t> neighborhood;
  std::vector<float> pdf;
  uint16_t target = 0;

  size_t Mode() const;
};

// Throws kPositionOutOfBounds.
PdfInspection InspectPdf(const Grid& grid, const Position& position,
                         const DenseModel& model, const WindowSpec& window,
                         std::span<const uint8_t> metadata = {});
// Two CSV sections: the window ("ds,dr,dc,value") and the distribution
// ("value,probability,is_target").
std::string InspectionCsv(const PdfInspection& inspection);

struct BenchOptions {
  unsigned workers = 1;
  uint32_t max_streams = kDefaultMaxStreams;
};

struct ItemReport {
  std::string name;
  size_t pixels = 0;
  size_t steps = 0;
  double total_bpp = 0;
  double payload_bpp = 0;
  double vloss = 0;
  double encode_seconds = 0;
  double decode_seconds = 0;
  CodecStats encode_stats;
};

struct BenchReport {
  std::vector<ItemReport> items;
  size_t pixels = 0;
  double total_bpp = 0;    // aggregate bits / aggregate pixels
  double payload_bpp = 0;
  double vloss = 0;        // pixel-weighted mean
  double encode_seconds = 0;
  double decode_seconds = 0;
  double pixels_per_second = 0;  // encode throughput
  // Share of encode time per phase.
  double extraction_share = 0;
  double prediction_share = 0;
  double coding_share = 0;
};

// Encodes and decodes every item, verifies exact reconstruction (throws
// kCorruptContainer otherwise) and reports rates and timings. Throws
// kEmptyInput for an empty corpus.
BenchReport Bench(const std::vector<CorpusItem>& corpus, const DenseModel& model,
                  const WindowSpec& window, const BenchOptions& options = {});
std::string FormatBench(const BenchReport& report);

}  // namespace dlic

#endif  // DLIC_TOOLKIT_H_
