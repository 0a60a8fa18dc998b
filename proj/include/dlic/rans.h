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

// rANS entropy coder with a 32-bit state and 16-bit stream words.
//
// State invariant: L <= x < 2^32 with L = 2^16. Before encoding a symbol of
// frequency f at precision k the encoder shifts out 16-bit words while
// x >= f << (32 - k), which keeps the post-encode state below 2^32. The
// decoder pulls words back in while x < L.
//
// Streams are finalized so that the decoder reads strictly forward: the
// final encoder state comes first (high word, then low word), followed by the
// emitted words in reverse emission order. Words are little-endian on disk.

#ifndef DLIC_RANS_H_
#define DLIC_RANS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "dlic/byte_io.h"

namespace dlic::rans {

inline constexpr uint32_t kLowerBound = 1u << 16;
inline constexpr uint32_t kMaxPrecision = 16;
// Precision used by the codec for both 8-bit and 12-bit alphabets.
inline constexpr uint32_t kCodecPrecision = 16;

struct RansState {
  uint32_t x = kLowerBound;
  friend bool operator==(const RansState&, const RansState&) = default;
};

// The coding interval of one symbol: [start, start + freq) out of 2^k.
struct SymbolRange {
  uint32_t start = 0;
  uint32_t freq = 0;
};

// Immutable frequency table whose frequencies sum to exactly 2^precision.
class SymbolTable {
 public:
  // Throws kSumMismatch / kZeroFrequency / kInvalidArgument.
  static SymbolTable Build(std::span<const uint32_t> freqs, uint32_t precision);

  size_t size() const { return freqs_.size(); }
  uint32_t precision() const { return precision_; }
  uint32_t freq(uint32_t sym) const { return freqs_[sym]; }
  uint32_t cum(uint32_t sym) const { return cums_[sym]; }
  SymbolRange range(uint32_t sym) const { return {cums_[sym], freqs_[sym]}; }
  std::span<const uint32_t> freqs() const { return freqs_; }
  std::span<const uint32_t> cums() const { return cums_; }

  // Symbol s with cum(s) <= slot < cum(s) + freq(s).
  uint32_t SymbolForSlot(uint32_t slot) const;

 private:
  SymbolTable() = default;

  std::vector<uint32_t> freqs_;
  std::vector<uint32_t> cums_;
  uint32_t precision_ = 0;
};

// Sequence of 16-bit words with a read cursor.
class WordStream {
 public:
  WordStream() = default;
  explicit WordStream(std::vector<uint16_t> words) : words_(std::move(words)) {}

  void Push(uint16_t w) { words_.push_back(w); }
  // Throws kStreamUnderflow when exhausted.
  uint16_t Next();

  bool exhausted() const { return cursor_ == words_.size(); }
  size_t cursor() const { return cursor_; }
  const std::vector<uint16_t>& words() const { return words_; }

 private:
  std::vector<uint16_t> words_;
  size_t cursor_ = 0;
};

// One encoder step: renormalize, then x' = (x / f) * 2^k + x % f + start.
RansState EncodeSymbol(RansState state, WordStream& out, SymbolRange range,
                       uint32_t precision);
RansState EncodeSymbol(RansState state, WordStream& out, uint32_t sym,
                       const SymbolTable& table);

struct Decoded {
  uint32_t symbol = 0;
  RansState state;
};

// Arithmetic part of decoding without renormalization.
Decoded DecodeStep(RansState state, const SymbolTable& table);
// Pulls words while x < 2^16. Throws kStreamUnderflow.
RansState Renormalize(RansState state, WordStream& in);
// DecodeStep followed by Renormalize.
Decoded DecodeSymbol(RansState state, WordStream& in, const SymbolTable& table);

// Encodes `ranges` so that a Decoder recovers them in the given order.
Bytes EncodeRanges(std::span<const SymbolRange> ranges, uint32_t precision);

// Encodes symbols[i] with tables[i].
Bytes EncodeSequence(std::span<const uint32_t> symbols,
                     std::span<const SymbolTable> tables);
std::vector<uint32_t> DecodeSequence(std::span<const uint8_t> stream,
                                     std::span<const SymbolTable> tables);

// Forward reader over a finalized stream. Callers that hold only the
// frequencies (not a SymbolTable) use Slot() + Advance().
class Decoder {
 public:
  // Throws kStreamUnderflow if the stream is shorter than the flushed state
  // or has an odd byte count.
  explicit Decoder(std::span<const uint8_t> stream);

  uint32_t Slot(uint32_t precision) const {
    return state_.x & ((1u << precision) - 1);
  }
  void Advance(SymbolRange range, uint32_t precision);
  uint32_t Decode(const SymbolTable& table);

  RansState state() const { return state_; }
  // True once every word has been consumed and the state is back at the
  // encoder's initial value; any other ending means the stream and the
  // frequency tables disagree.
  bool Finished() const {
    return next_ == stream_.size() && state_.x == kLowerBound;
  }

 private:
  uint16_t NextWord();

  std::span<const uint8_t> stream_;
  size_t next_ = 0;
  RansState state_;
};

// Single-table convenience wrappers (the surface scripting bindings use).
Bytes EncodeWithTable(std::span<const uint32_t> symbols,
                      std::span<const uint32_t> freqs, uint32_t precision);
std::vector<uint32_t> DecodeWithTable(std::span<const uint8_t> stream,
                                      size_t count,
                                      std::span<const uint32_t> freqs,
                                      uint32_t precision);

}  // namespace dlic::rans

#endif  // DLIC_RANS_H_
