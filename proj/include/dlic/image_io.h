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

#ifndef DLIC_IMAGE_IO_H_
#define DLIC_IMAGE_IO_H_

#include <filesystem>
#include <span>

#include "dlic/byte_io.h"
#include "dlic/grid.h"

namespace dlic {

// Binary PGM (P5). maxval 255 -> 8-bit samples; maxval 4095 -> 12-bit data
// stored as big-endian 16-bit samples. Throws kMalformedPgm,
// kUnsupportedMaxval.
Grid ReadPgm(std::span<const uint8_t> bytes);
// Canonical form: "P5\n<w> <h>\n<maxval>\n" then samples. 2D grids only.
Bytes WritePgm(const Grid& image);

// Volumes are a pair of files: a text header "<stem>.hdr" and raw
// little-endian u16 samples "<stem>.raw". The header holds one "key value"
// per line:
//   dlic-volume 1
//   depth D / height H / width W / bitdepth 8|12
//   pixel_spacing, slice_spacing, slice_thickness (shortest round-trip
//   decimal form of the binary32 value)
// `path` may name either file or the bare stem. Throws kHeaderMismatch,
// kIoError.
Volume ReadVolume(const std::filesystem::path& path);
void WriteVolume(const std::filesystem::path& path, const Volume& volume);

}  // namespace dlic

#endif  // DLIC_IMAGE_IO_H_
