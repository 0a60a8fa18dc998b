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

#include "dlic/rans.h"

#include <algorithm>
#include <cassert>
#include <string>

#include "dlic/error.h"

namespace dlic::rans {

SymbolTable SymbolTable::Build(std::span<const uint32_t> freqs,
                               uint32_t precision) {
  if (freqs.empty()) Fail(ErrorCode::kInvalidArgument, "empty alphabet");
  if (precision > kMaxPrecision) {
    Fail(ErrorCode::kInvalidArgument,
         "precision " + std::to_string(precision) + " exceeds 16 bits");
  }
  SymbolTable table;
  table.precision_ = precision;
  table.freqs_.assign(freqs.begin(), freqs.end());
  table.cums_.resize(freqs.size());
  uint64_t sum = 0;
  for (size_t i = 0; i < freqs.size(); ++i) {
    if (freqs[i] == 0) {
      Fail(ErrorCode::kZeroFrequency,
           "symbol " + std::to_string(i) + " has zero frequency");
    }
    table.cums_[i] = static_cast<uint32_t>(std::min<uint64_t>(sum, UINT32_MAX));
    sum += freqs[i];
  }
  if (sum != (uint64_t{1} << precision)) {
    Fail(ErrorCode::kSumMismatch, "frequencies sum to " + std::to_string(sum) +
                                      ", expected 2^" +
                                      std::to_string(precision));
  }
  return table;
}

uint32_t SymbolTable::SymbolForSlot(uint32_t slot) const {
  // Last cum <= slot.
  auto it = std::upper_bound(cums_.begin(), cums_.end(), slot);
  return static_cast<uint32_t>(std::distance(cums_.begin(), it) - 1);
}

uint16_t WordStream::Next() {
  if (cursor_ >= words_.size()) {
    Fail(ErrorCode::kStreamUnderflow, "rANS stream exhausted");
  }
  return words_[cursor_++];
}

RansState EncodeSymbol(RansState state, WordStream& out, SymbolRange range,
                       uint32_t precision) {
  assert(range.freq >= 1 && precision <= kMaxPrecision);
  uint32_t x = state.x;
  const uint64_t limit = uint64_t{range.freq} << (32 - precision);
  while (x >= limit) {
    out.Push(static_cast<uint16_t>(x & 0xffff));
    x >>= 16;
  }
  x = ((x / range.freq) << precision) + (x % range.freq) + range.start;
  return {x};
}

RansState EncodeSymbol(RansState state, WordStream& out, uint32_t sym,
                       const SymbolTable& table) {
  return EncodeSymbol(state, out, table.range(sym), table.precision());
}

Decoded DecodeStep(RansState state, const SymbolTable& table) {
  const uint32_t k = table.precision();
  const uint32_t slot = state.x & ((1u << k) - 1);
  const uint32_t sym = table.SymbolForSlot(slot);
  const uint32_t x = table.freq(sym) * (state.x >> k) + slot - table.cum(sym);
  return {sym, {x}};
}

RansState Renormalize(RansState state, WordStream& in) {
  while (state.x < kLowerBound) state.x = (state.x << 16) | in.Next();
  return state;
}

Decoded DecodeSymbol(RansState state, WordStream& in,
                     const SymbolTable& table) {
  Decoded d = DecodeStep(state, table);
  d.state = Renormalize(d.state, in);
  return d;
}

Bytes EncodeRanges(std::span<const SymbolRange> ranges, uint32_t precision) {
  WordStream emitted;
  RansState state;
  for (size_t i = ranges.size(); i-- > 0;) {
    state = EncodeSymbol(state, emitted, ranges[i], precision);
  }
  const auto& words = emitted.words();
  ByteWriter w;
  w.U16(static_cast<uint16_t>(state.x >> 16));
  w.U16(static_cast<uint16_t>(state.x & 0xffff));
  for (size_t i = words.size(); i-- > 0;) w.U16(words[i]);
  return w.Take();
}

Bytes EncodeSequence(std::span<const uint32_t> symbols,
                     std::span<const SymbolTable> tables) {
  if (symbols.size() != tables.size()) {
    Fail(ErrorCode::kInvalidArgument, "need one table per symbol");
  }
  std::vector<SymbolRange> ranges(symbols.size());
  uint32_t precision = 0;
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] >= tables[i].size()) {
      Fail(ErrorCode::kInvalidArgument,
           "symbol " + std::to_string(symbols[i]) + " outside alphabet");
    }
    if (i > 0 && tables[i].precision() != precision) {
      Fail(ErrorCode::kInvalidArgument, "mixed table precisions");
    }
    precision = tables[i].precision();
    ranges[i] = tables[i].range(symbols[i]);
  }
  return EncodeRanges(ranges, precision);
}

std::vector<uint32_t> DecodeSequence(std::span<const uint8_t> stream,
                                     std::span<const SymbolTable> tables) {
  Decoder dec(stream);
  std::vector<uint32_t> out;
  out.reserve(tables.size());
  for (const auto& table : tables) out.push_back(dec.Decode(table));
  return out;
}

Decoder::Decoder(std::span<const uint8_t> stream) : stream_(stream) {
  if (stream.size() % 2 != 0) {
    Fail(ErrorCode::kStreamUnderflow, "rANS stream has odd byte length");
  }
  const uint32_t hi = NextWord();
  const uint32_t lo = NextWord();
  state_.x = (hi << 16) | lo;
}

uint16_t Decoder::NextWord() {
  if (next_ + 2 > stream_.size()) {
    Fail(ErrorCode::kStreamUnderflow, "rANS stream exhausted");
  }
  const uint16_t w =
      static_cast<uint16_t>(stream_[next_] | (stream_[next_ + 1] << 8));
  next_ += 2;
  return w;
}

void Decoder::Advance(SymbolRange range, uint32_t precision) {
  const uint32_t slot = Slot(precision);
  uint32_t x = range.freq * (state_.x >> precision) + slot - range.start;
  while (x < kLowerBound) x = (x << 16) | NextWord();
  state_.x = x;
}

uint32_t Decoder::Decode(const SymbolTable& table) {
  const uint32_t sym = table.SymbolForSlot(Slot(table.precision()));
  Advance(table.range(sym), table.precision());
  return sym;
}

Bytes EncodeWithTable(std::span<const uint32_t> symbols,
                      std::span<const uint32_t> freqs, uint32_t precision) {
  const SymbolTable table = SymbolTable::Build(freqs, precision);
  std::vector<SymbolRange> ranges;
  ranges.reserve(symbols.size());
  for (uint32_t s : symbols) {
    if (s >= table.size()) {
      Fail(ErrorCode::kInvalidArgument,
           "symbol " + std::to_string(s) + " outside alphabet");
    }
    ranges.push_back(table.range(s));
  }
  return EncodeRanges(ranges, precision);
}

std::vector<uint32_t> DecodeWithTable(std::span<const uint8_t> stream,
                                      size_t count,
                                      std::span<const uint32_t> freqs,
                                      uint32_t precision) {
  const SymbolTable table = SymbolTable::Build(freqs, precision);
  Decoder dec(stream);
  std::vector<uint32_t> out(count);
  for (auto& s : out) s = dec.Decode(table);
  return out;
}

}  // namespace dlic::rans
