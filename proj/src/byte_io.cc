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

#include "dlic/byte_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace dlic {

void ByteWriter::U16(uint16_t v) {
  out_.push_back(static_cast<uint8_t>(v));
  out_.push_back(static_cast<uint8_t>(v >> 8));
}

void ByteWriter::U32(uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
}

void ByteWriter::F32(float v) { U32(std::bit_cast<uint32_t>(v)); }

void ByteWriter::Append(std::span<const uint8_t> bytes) {
  out_.insert(out_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::Append(std::string_view text) {
  out_.insert(out_.end(), text.begin(), text.end());
}

void ByteReader::Need(size_t n) const {
  if (remaining() < n) {
    Fail(truncation_code_, "unexpected end of data at offset " +
                               std::to_string(pos_) + " (need " +
                               std::to_string(n) + " bytes)");
  }
}

uint8_t ByteReader::U8() {
  Need(1);
  return data_[pos_++];
}

uint16_t ByteReader::U16() {
  Need(2);
  const uint16_t v = static_cast<uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
  pos_ += 2;
  return v;
}

uint32_t ByteReader::U32() {
  Need(4);
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | data_[pos_ + i];
  pos_ += 4;
  return v;
}

float ByteReader::F32() { return std::bit_cast<float>(U32()); }

std::span<const uint8_t> ByteReader::Take(size_t n) {
  Need(n);
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

Bytes ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const std::filesystem::path& path,
               std::span<const uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoError, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) Fail(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace dlic
