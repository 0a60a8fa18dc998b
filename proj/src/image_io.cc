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

#include "dlic/image_io.h"

#include <cctype>
#include <charconv>
#include <map>
#include <sstream>
#include <string>

#include "dlic/error.h"

namespace dlic {
namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  uint32_t Number() {
    SkipSpaceAndComments();
    uint64_t v = 0;
    size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > UINT32_MAX) Fail(ErrorCode::kMalformedPgm, "header number too large");
      ++digits;
    }
    if (digits == 0) Fail(ErrorCode::kMalformedPgm, "expected a number in PGM header");
    return static_cast<uint32_t>(v);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  size_t RasterStart() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      Fail(ErrorCode::kMalformedPgm, "missing whitespace before raster");
    }
    return pos_ + 1;
  }

  size_t pos() const { return pos_; }
  void set_pos(size_t p) { pos_ = p; }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

std::filesystem::path Stem(const std::filesystem::path& path) {
  const auto ext = path.extension();
  if (ext == ".hdr" || ext == ".raw") {
    auto p = path;
    return p.replace_extension();
  }
  return path;
}

std::string FloatText(float v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

float ParseFloat(const std::string& text, const std::string& key) {
  float v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    Fail(ErrorCode::kHeaderMismatch, "bad value for " + key + ": '" + text + "'");
  }
  return v;
}

uint32_t ParseUint(const std::string& text, const std::string& key) {
  uint32_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    Fail(ErrorCode::kHeaderMismatch, "bad value for " + key + ": '" + text + "'");
  }
  return v;
}

}  // namespace

Grid ReadPgm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    Fail(ErrorCode::kMalformedPgm, "not a binary PGM (missing P5 magic)");
  }
  PgmHeaderReader header(bytes);
  header.set_pos(2);
  const uint32_t width = header.Number();
  const uint32_t height = header.Number();
  const uint32_t maxval = header.Number();
  if (width == 0 || height == 0) Fail(ErrorCode::kMalformedPgm, "zero image size");
  int bit_depth = 0;
  if (maxval == 255) {
    bit_depth = 8;
  } else if (maxval == 4095) {
    bit_depth = 12;
  } else {
    Fail(ErrorCode::kUnsupportedMaxval,
         "maxval " + std::to_string(maxval) + " (supported: 255, 4095)");
  }
  const size_t start = header.RasterStart();
  const size_t count = size_t{width} * height;
  const size_t sample_bytes = bit_depth == 8 ? 1 : 2;
  if (bytes.size() - start != count * sample_bytes) {
    Fail(ErrorCode::kMalformedPgm,
         "raster has " + std::to_string(bytes.size() - start) + " bytes, expected " +
             std::to_string(count * sample_bytes));
  }
  std::vector<uint16_t> values(count);
  for (size_t i = 0; i < count; ++i) {
    uint16_t v = bit_depth == 8
                     ? bytes[start + i]
                     : static_cast<uint16_t>((bytes[start + 2 * i] << 8) |
                                             bytes[start + 2 * i + 1]);
    if (v > maxval) {
      Fail(ErrorCode::kMalformedPgm,
           "sample " + std::to_string(v) + " exceeds maxval " + std::to_string(maxval));
    }
    values[i] = v;
  }
  return Grid(Dims{1, height, width}, bit_depth, std::move(values));
}

Bytes WritePgm(const Grid& image) {
  if (image.dims().depth != 1) {
    Fail(ErrorCode::kInvalidArgument, "PGM holds 2D images only");
  }
  ByteWriter w;
  w.Append("P5\n" + std::to_string(image.dims().width) + " " +
           std::to_string(image.dims().height) + "\n" +
           std::to_string(image.max_value()) + "\n");
  for (uint16_t v : image.values()) {
    if (image.bit_depth() == 8) {
      w.U8(static_cast<uint8_t>(v));
    } else {
      w.U8(static_cast<uint8_t>(v >> 8));
      w.U8(static_cast<uint8_t>(v & 0xff));
    }
  }
  return w.Take();
}

Volume ReadVolume(const std::filesystem::path& path) {
  const auto stem = Stem(path);
  auto hdr_path = stem;
  hdr_path += ".hdr";
  auto raw_path = stem;
  raw_path += ".raw";
  const Bytes hdr = ReadFile(hdr_path);
  std::istringstream in(std::string(hdr.begin(), hdr.end()));
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    if (!key.empty()) kv[key] = value;
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) Fail(ErrorCode::kHeaderMismatch, "volume header lacks '" + key + "'");
    return it->second;
  };
  if (get("dlic-volume") != "1") {
    Fail(ErrorCode::kHeaderMismatch, "unsupported volume header version");
  }
  Dims dims{ParseUint(get("depth"), "depth"), ParseUint(get("height"), "height"),
            ParseUint(get("width"), "width")};
  const int bit_depth = static_cast<int>(ParseUint(get("bitdepth"), "bitdepth"));
  VolumeMetadata meta;
  meta.pixel_spacing = ParseFloat(get("pixel_spacing"), "pixel_spacing");
  meta.slice_spacing = ParseFloat(get("slice_spacing"), "slice_spacing");
  meta.slice_thickness = ParseFloat(get("slice_thickness"), "slice_thickness");

  const Bytes raw = ReadFile(raw_path);
  if (raw.size() != dims.count() * 2) {
    Fail(ErrorCode::kHeaderMismatch,
         "header describes " + std::to_string(dims.count()) + " samples, " +
             raw_path.string() + " holds " + std::to_string(raw.size() / 2) +
             (raw.size() % 2 ? " and a half" : ""));
  }
  std::vector<uint16_t> values(dims.count());
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
  }
  return Volume{Grid(dims, bit_depth, std::move(values)), meta};
}

void WriteVolume(const std::filesystem::path& path, const Volume& volume) {
  const auto stem = Stem(path);
  auto hdr_path = stem;
  hdr_path += ".hdr";
  auto raw_path = stem;
  raw_path += ".raw";
  const Dims& d = volume.grid.dims();
  std::string text = "dlic-volume 1\n";
  text += "depth " + std::to_string(d.depth) + "\n";
  text += "height " + std::to_string(d.height) + "\n";
  text += "width " + std::to_string(d.width) + "\n";
  text += "bitdepth " + std::to_string(volume.grid.bit_depth()) + "\n";
  text += "pixel_spacing " + FloatText(volume.metadata.pixel_spacing) + "\n";
  text += "slice_spacing " + FloatText(volume.metadata.slice_spacing) + "\n";
  text += "slice_thickness " + FloatText(volume.metadata.slice_thickness) + "\n";
  WriteFile(hdr_path, std::span<const uint8_t>(
                          reinterpret_cast<const uint8_t*>(text.data()), text.size()));
  ByteWriter w;
  for (uint16_t v : volume.grid.values()) w.U16(v);
  WriteFile(raw_path, w.bytes());
}

}  // namespace dlic
