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

// dlic: command-line front end for the codec, trainer and toolkit.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dlic/container.h"
#include "dlic/error.h"
#include "dlic/image_io.h"
#include "dlic/toolkit.h"
#include "dlic/train.h"
#include "dlic/wavefront.h"

namespace {

using namespace dlic;

struct WindowArgs {
  std::string preset;  // empty: infer from the model's input width
  int ws_shift = 0;
};

void AddWindowOptions(CLI::App* cmd, WindowArgs& args) {
  cmd->add_option("--window", args.preset, "window preset")
      ->check(CLI::IsMember(WindowPresetNames()));
  cmd->add_option("--ws-shift", args.ws_shift, "row shift of the previous-slice square")
      ->check(CLI::Range(0, 127));
}

WindowSpec MakeWindow(const std::string& preset, int ws_shift) {
  return MakeWindowPreset(preset, static_cast<uint8_t>(ws_shift));
}

WindowSpec ResolveWindow(const WindowArgs& args, const DenseModel& model) {
  if (!args.preset.empty()) return MakeWindow(args.preset, args.ws_shift);
  for (const std::string& name : WindowPresetNames()) {
    WindowSpec w = MakeWindow(name, args.ws_shift);
    if (w.offsets.size() == model.pixel_feature_count()) return w;
  }
  Fail(ErrorCode::kShapeMismatch,
       "no window preset has " + std::to_string(model.pixel_feature_count()) +
           " offsets; pass --window");
}

DenseModel LoadModel(const std::string& path) {
  return DenseModel::Load(ReadFile(path));
}

// Raw metadata floats per item, or nothing if the model takes none.
std::vector<std::vector<float>> NormalizedMetadata(
    const std::vector<CorpusItem>& corpus, const DenseModel& model) {
  std::vector<std::vector<float>> out;
  if (model.metadata_count() == 0) return out;
  for (const CorpusItem& item : corpus) {
    out.push_back(NormalizeMetadata(model, MetadataFloats(item.metadata)));
  }
  return out;
}

std::vector<Grid> Grids(const std::vector<CorpusItem>& corpus) {
  std::vector<Grid> grids;
  for (const CorpusItem& item : corpus) grids.push_back(item.grid);
  return grids;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  WriteFile(path, std::span<const uint8_t>(
                      reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

std::string PrintableFloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dlic: learned lossless image and volume compression"};
  app.require_subcommand(1);

  // encode
  std::string in_path, out_path, model_path;
  WindowArgs window_args;
  uint32_t streams = kDefaultMaxStreams;
  unsigned workers = 1;
  auto* encode = app.add_subcommand("encode", "compress a PGM image or volume");
  encode->add_option("-i,--input", in_path, "input .pgm or .hdr")->required();
  encode->add_option("-o,--output", out_path, "output container")->required();
  encode->add_option("-m,--model", model_path, "model file")->required();
  AddWindowOptions(encode, window_args);
  encode->add_option("--streams", streams, "maximum number of lane streams")
      ->check(CLI::Range(1u, 1u << 20));
  encode->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));

  auto* decode = app.add_subcommand("decode", "decompress a container");
  decode->add_option("-i,--input", in_path, "input container")->required();
  decode->add_option("-o,--output", out_path, "output .pgm (2D) or volume stem")
      ->required();
  decode->add_option("-m,--model", model_path, "model file")->required();
  decode->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));

  // train
  std::string data_dir, val_dir, preset = "small";
  std::string upsample;
  TrainConfig train_cfg;
  bool use_metadata = false;
  auto* train = app.add_subcommand("train", "train a model on a corpus directory");
  train->add_option("-d,--data", data_dir, "corpus directory")->required();
  train->add_option("-o,--output", out_path, "output model file")->required();
  train->add_option("--preset", preset, "architecture preset")
      ->check(CLI::IsMember({"tiny", "small", "medium", "large"}));
  AddWindowOptions(train, window_args);
  train->add_option("--alpha", train_cfg.weight_alpha, "class-weight exponent");
  train->add_option("--upsample", upsample, "rare-value upsampling THRESHOLD,FACTOR");
  train->add_option("--seed", train_cfg.seed, "random seed");
  train->add_option("--epochs", train_cfg.epochs, "training epochs");
  train->add_option("--batch", train_cfg.batch_size, "minibatch size")
      ->check(CLI::Range(size_t{1}, size_t{1} << 20));
  train->add_option("--lr", train_cfg.learning_rate, "Adam learning rate");
  train->add_option("--val", val_dir, "validation corpus directory");
  train->add_flag("--metadata", use_metadata, "feed volume metadata to the model");

  auto* eval = app.add_subcommand("eval", "report vloss of a model on a corpus");
  eval->add_option("-d,--data", data_dir, "corpus directory")->required();
  eval->add_option("-m,--model", model_path, "model file")->required();
  AddWindowOptions(eval, window_args);
  eval->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));

  auto* bench = app.add_subcommand("bench", "round-trip benchmark over a corpus");
  bench->add_option("-d,--data", data_dir, "corpus directory")->required();
  bench->add_option("-m,--model", model_path, "model file")->required();
  AddWindowOptions(bench, window_args);
  bench->add_option("--streams", streams, "maximum number of lane streams")
      ->check(CLI::Range(1u, 1u << 20));
  bench->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));

  auto* histogram = app.add_subcommand("histogram", "value histogram of a corpus (CSV)");
  histogram->add_option("-d,--data", data_dir, "corpus directory")->required();
  histogram->add_option("-o,--output", out_path, "output CSV (default stdout)");

  std::vector<uint32_t> pos;
  auto* inspect = app.add_subcommand("inspect", "dump the predicted PDF at a pixel (CSV)");
  inspect->add_option("-i,--input", in_path, "input .pgm or .hdr")->required();
  inspect->add_option("-m,--model", model_path, "model file")->required();
  inspect->add_option("--pos", pos, "slice,row,col")->required()->delimiter(',')->expected(3);
  AddWindowOptions(inspect, window_args);
  inspect->add_option("-o,--output", out_path, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: code=UsageError message=\"" << e.what() << "\"\n";
    return 2;
  }

  try {
    if (*encode) {
      const DenseModel model = LoadModel(model_path);
      const WindowSpec window = ResolveWindow(window_args, model);
      const CorpusItem item = LoadItem(in_path);
      CodecStats stats;
      const Bytes out = Encode(item.grid, model, window, item.metadata,
                               CodecOptions{streams, workers}, &stats);
      WriteFile(out_path, out);
      const BppReport bpp = ComputeBpp(out);
      std::cout << "pixels=" << bpp.pixels << " bytes=" << bpp.total_bytes
                << " bpp=" << PrintableFloat(bpp.total_bpp)
                << " payload_bpp=" << PrintableFloat(bpp.payload_bpp)
                << " steps=" << stats.steps << "\n";
    } else if (*decode) {
      const DenseModel model = LoadModel(model_path);
      const Bytes container = ReadFile(in_path);
      const ContainerHeader header = ParseHeader(container);
      const Grid grid = Decode(container, model, CodecOptions{kDefaultMaxStreams, workers});
      if (grid.dims().depth == 1 && header.metadata.empty()) {
        WriteFile(out_path, WritePgm(grid));
      } else {
        WriteVolume(out_path, Volume{grid, ParseMetadata(header.metadata)});
      }
    } else if (*train) {
      const std::vector<CorpusItem> corpus = LoadCorpus(data_dir);
      if (corpus.empty()) Fail(ErrorCode::kEmptyInput, "no images in " + data_dir);
      const int bit_depth = corpus.front().grid.bit_depth();
      for (const CorpusItem& item : corpus) {
        if (item.grid.bit_depth() != bit_depth) {
          Fail(ErrorCode::kInvalidArgument, "corpus mixes bit depths");
        }
      }
      if (!upsample.empty()) {
        const auto comma = upsample.find(',');
        if (comma == std::string::npos) {
          Fail(ErrorCode::kInvalidArgument, "--upsample expects THRESHOLD,FACTOR");
        }
        train_cfg.upsample_threshold = std::stoull(upsample.substr(0, comma));
        train_cfg.upsample_factor =
            static_cast<uint32_t>(std::stoul(upsample.substr(comma + 1)));
      }
      const WindowSpec window = MakeWindow(
          window_args.preset.empty() ? "2d-l9" : window_args.preset, window_args.ws_shift);
      std::vector<FeatureRange> ranges;
      if (use_metadata) {
        std::vector<std::vector<float>> raw;
        for (const CorpusItem& item : corpus) raw.push_back(MetadataFloats(item.metadata));
        ranges = FitFeatureRanges(raw);
      }
      const uint32_t inputs =
          static_cast<uint32_t>(window.offsets.size() + ranges.size());
      const Architecture arch = ArchitecturePreset(
          preset, inputs, static_cast<uint32_t>(corpus.front().grid.alphabet_size()));
      const DenseModel initial = InitModel(arch, train_cfg.seed, ranges);
      const auto grids = Grids(corpus);
      const Dataset data =
          BuildDataset(grids, window, NormalizedMetadata(corpus, initial));
      std::optional<Dataset> validation;
      if (!val_dir.empty()) {
        const auto val_corpus = LoadCorpus(val_dir);
        const auto val_grids = Grids(val_corpus);
        validation = BuildDataset(val_grids, window, NormalizedMetadata(val_corpus, initial));
      }
      const TrainResult result =
          TrainModel(initial, data, train_cfg, validation ? &*validation : nullptr);
      WriteFile(out_path, result.model.Save());
      for (size_t e = 0; e < result.vloss_history.size(); ++e) {
        std::cout << "epoch=" << e + 1 << " vloss=" << PrintableFloat(result.vloss_history[e])
                  << "\n";
      }
      std::cout << "parameters=" << result.model.parameter_count()
                << " hash=" << ToHex(result.model.content_hash()) << "\n";
    } else if (*eval) {
      const DenseModel model = LoadModel(model_path);
      const WindowSpec window = ResolveWindow(window_args, model);
      const auto corpus = LoadCorpus(data_dir);
      if (corpus.empty()) Fail(ErrorCode::kEmptyInput, "no images in " + data_dir);
      const auto grids = Grids(corpus);
      const Dataset data = BuildDataset(grids, window, NormalizedMetadata(corpus, model));
      std::cout << "samples=" << data.size()
                << " vloss=" << PrintableFloat(EvaluateVloss(model, data, workers)) << "\n";
    } else if (*bench) {
      const DenseModel model = LoadModel(model_path);
      const WindowSpec window = ResolveWindow(window_args, model);
      const BenchReport report =
          Bench(LoadCorpus(data_dir), model, window, BenchOptions{workers, streams});
      std::cout << FormatBench(report);
    } else if (*histogram) {
      const auto grids = Grids(LoadCorpus(data_dir));
      const ValueHistogram hist = BuildHistogram(grids);
      WriteText(out_path, HistogramCsv(hist));
      std::cerr << "total=" << hist.total()
                << " max_min_ratio=" << PrintableFloat(CountRatio(hist)) << "\n";
    } else if (*inspect) {
      const DenseModel model = LoadModel(model_path);
      const WindowSpec window = ResolveWindow(window_args, model);
      const CorpusItem item = LoadItem(in_path);
      const PdfInspection result = InspectPdf(
          item.grid, Position{pos[0], pos[1], pos[2]}, model, window, item.metadata);
      WriteText(out_path, InspectionCsv(result));
    }
  } catch (const Error& e) {
    std::cerr << "error: code=" << ErrorCodeName(e.code()) << " message=\"" << e.what()
              << "\"\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: code=Internal message=\"" << e.what() << "\"\n";
    return 1;
  }
  return 0;
}
