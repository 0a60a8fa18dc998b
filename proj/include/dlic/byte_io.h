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

#ifndef DLIC_BYTE_IO_H_
#define DLIC_BYTE_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "dlic/error.h"

namespace dlic {

using Bytes = std::vector<uint8_t>;

// Little-endian serializer used by every on-disk format in the project.
class ByteWriter {
 public:
  void U8(uint8_t v) { out_.push_back(v); }
  void I8(int8_t v) { out_.push_back(static_cast<uint8_t>(v)); }
  void U16(uint16_t v);
  void U32(uint32_t v);
  void F32(float v);
  void Append(std::span<const uint8_t> bytes);
  void Append(std::string_view text);

  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }
  size_t size() const { return out_.size(); }

 private:
  Bytes out_;
};

// Bounds-checked reader. Running past the end raises `truncation_code`, so
// each format reports truncation with its own error kind.
class ByteReader {
 public:
  ByteReader(std::span<const uint8_t> data, ErrorCode truncation_code)
      : data_(data), truncation_code_(truncation_code) {}

  uint8_t U8();
  int8_t I8() { return static_cast<int8_t>(U8()); }
  uint16_t U16();
  uint32_t U32();
  float F32();
  std::span<const uint8_t> Take(size_t n);

  size_t position() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(size_t n) const;

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
  ErrorCode truncation_code_;
};

Bytes ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::span<const uint8_t> data);

}  // namespace dlic

#endif  // DLIC_BYTE_IO_H_
