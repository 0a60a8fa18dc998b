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

#include <cmath>
#include <random>

#include <doctest.h>

#include "dlic/rans.h"
#include "support.h"

namespace dlic::rans {
namespace {

using testing::CaptureCode;

std::vector<uint32_t> V(std::initializer_list<uint32_t> v) { return v; }

SymbolTable Table(std::initializer_list<uint32_t> freqs, uint32_t k) {
  const auto f = V(freqs);
  return SymbolTable::Build(f, k);
}

// Random table of `n` symbols at precision k, every freq >= 1.
std::vector<uint32_t> RandomFreqs(std::mt19937_64& rng, size_t n, uint32_t k) {
  std::vector<uint32_t> f(n, 1);
  std::uniform_int_distribution<size_t> pick(0, n - 1);
  for (uint32_t left = (1u << k) - static_cast<uint32_t>(n); left > 0; --left) {
    ++f[pick(rng)];
  }
  return f;
}

TEST_CASE("symbol table prefix sums") {
  CHECK(Table({16}, 4).cums()[0] == 0);
  const auto t = Table({8, 4, 4}, 4);
  CHECK(V({t.cums()[0], t.cums()[1], t.cums()[2]}) == V({0, 8, 12}));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = RandomFreqs(rng, 1 + trial * 5, 12);
    const auto table = SymbolTable::Build(f, 12);
    uint32_t acc = 0;
    for (size_t i = 0; i < f.size(); ++i) {
      CHECK(table.cum(static_cast<uint32_t>(i)) == acc);
      acc += f[i];
    }
    for (uint32_t slot = 0; slot < (1u << 12); slot += 7) {
      const uint32_t s = table.SymbolForSlot(slot);
      CHECK(table.cum(s) <= slot);
      CHECK(slot < table.cum(s) + table.freq(s));
    }
  }
}

TEST_CASE("symbol table errors") {
  CHECK(CaptureCode([] { Table({8, 4, 3}, 4); }) == ErrorCode::kSumMismatch);
  CHECK(CaptureCode([] { Table({16, 0}, 4); }) == ErrorCode::kZeroFrequency);
  CHECK(CaptureCode([] { SymbolTable::Build({}, 4); }) == ErrorCode::kInvalidArgument);
  CHECK(CaptureCode([] { Table({1u << 17}, 17); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("encode symbol formula") {
  WordStream out;
  CHECK(EncodeSymbol(RansState{100}, out, 0, Table({16}, 4)).x == 100);
  CHECK(out.words().empty());

  const auto t = Table({8, 4, 4}, 4);
  RansState x = EncodeSymbol(RansState{16}, out, 0, t);
  CHECK(x.x == 32);
  x = EncodeSymbol(x, out, 2, t);
  CHECK(x.x == 140);
  CHECK(out.words().empty());
}

TEST_CASE("decode step inverts encode") {
  const auto t = Table({8, 4, 4}, 4);
  Decoded d = DecodeStep(RansState{140}, t);
  CHECK(d.symbol == 2);
  CHECK(d.state.x == 32);
  d = DecodeStep(d.state, t);
  CHECK(d.symbol == 0);
  CHECK(d.state.x == 16);
  d = DecodeStep(RansState{100}, Table({16}, 4));
  CHECK(d.symbol == 0);
  CHECK(d.state.x == 100);
}

TEST_CASE("renormalization emits and reads words") {
  const auto t = Table({8, 4, 4}, 4);
  WordStream out;
  // 0xABCD1234 >= 4 << 28, so one word leaves before coding.
  RansState x = EncodeSymbol(RansState{0xABCD1234u}, out, 1, t);
  REQUIRE(out.words().size() == 1);
  CHECK(out.words()[0] == 0x1234);
  CHECK(x.x == ((0xABCDu / 4) << 4) + 0xABCDu % 4 + 8);

  WordStream in(out.words());
  const Decoded d = DecodeSymbol(x, in, t);
  CHECK(d.symbol == 1);
  CHECK(d.state.x == 0xABCD1234u);
  CHECK(in.exhausted());

  WordStream empty;
  CHECK(CaptureCode([&] { DecodeSymbol(RansState{40}, empty, t); }) ==
        ErrorCode::kStreamUnderflow);
}

TEST_CASE("empty sequence flushes the initial state") {
  const Bytes b = EncodeSequence({}, {});
  CHECK(b == Bytes{0x01, 0x00, 0x00, 0x00});
  CHECK(DecodeSequence(b, {}).empty());
}

TEST_CASE("short sequence round trip") {
  const std::vector<SymbolTable> tables(2, Table({8, 4, 4}, 4));
  const auto symbols = V({0, 2});
  const Bytes b = EncodeSequence(symbols, tables);
  CHECK(DecodeSequence(b, tables) == symbols);
}

TEST_CASE("randomized round trip with per-position tables") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = std::uniform_int_distribution<size_t>(0, 400)(rng);
    const uint32_t k = std::uniform_int_distribution<uint32_t>(1, 16)(rng);
    std::vector<SymbolTable> tables;
    std::vector<uint32_t> symbols;
    for (size_t i = 0; i < n; ++i) {
      const size_t alphabet = std::uniform_int_distribution<size_t>(
          1, std::min<size_t>(300, size_t{1} << k))(rng);
      tables.push_back(SymbolTable::Build(RandomFreqs(rng, alphabet, k), k));
      symbols.push_back(static_cast<uint32_t>(
          std::uniform_int_distribution<size_t>(0, alphabet - 1)(rng)));
    }
    const Bytes b = EncodeSequence(symbols, tables);
    CHECK(b.size() % 2 == 0);
    CHECK(DecodeSequence(b, tables) == symbols);
    CHECK(EncodeSequence(symbols, tables) == b);

    Decoder dec(b);
    for (size_t i = 0; i < n; ++i) dec.Decode(tables[i]);
    CHECK(dec.Finished());
  }
}

TEST_CASE("encoder state stays within 32 bits and above the lower bound") {
  std::mt19937_64 rng(5);
  const auto f = RandomFreqs(rng, 40, 16);
  const auto t = SymbolTable::Build(f, 16);
  WordStream out;
  RansState x;
  for (int i = 0; i < 20000; ++i) {
    const uint32_t s = std::uniform_int_distribution<uint32_t>(0, 39)(rng);
    // Post-renormalization the state is below f << 16, so the coded state
    // fits in 32 bits; it is never below the lower bound afterwards.
    x = EncodeSymbol(x, out, s, t);
    CHECK(x.x >= kLowerBound);
  }
}

TEST_CASE("efficiency on i.i.d. symbols") {
  const auto f = V({32768, 16384, 16384});
  const auto t = SymbolTable::Build(f, 16);
  std::mt19937_64 rng(1);
  std::discrete_distribution<uint32_t> dist({2.0, 1.0, 1.0});
  const size_t n = 200000;
  std::vector<uint32_t> symbols(n);
  for (auto& s : symbols) s = dist(rng);
  std::vector<SymbolRange> ranges(n);
  for (size_t i = 0; i < n; ++i) ranges[i] = t.range(symbols[i]);
  const Bytes b = EncodeRanges(ranges, 16);
  const double bits = 8.0 * static_cast<double>(b.size()) / static_cast<double>(n);
  CHECK(bits <= 1.5 + 0.01 + 32.0 / static_cast<double>(n));
}

TEST_CASE("binding surface matches the sequence coder") {
  const auto freqs = V({8, 4, 4});
  const auto symbols = V({0, 2, 1, 1, 0, 2});
  const std::vector<SymbolTable> tables(symbols.size(), SymbolTable::Build(freqs, 4));
  const Bytes b = EncodeWithTable(symbols, freqs, 4);
  CHECK(b == EncodeSequence(symbols, tables));
  CHECK(DecodeWithTable(b, symbols.size(), freqs, 4) == symbols);
  CHECK(EncodeWithTable({}, freqs, 4).size() == 4);
  CHECK(CaptureCode([&] { EncodeWithTable(symbols, V({8, 4, 3}), 4); }) ==
        ErrorCode::kSumMismatch);

  std::mt19937_64 rng(2);
  std::vector<uint32_t> many(1000);
  for (auto& s : many) s = static_cast<uint32_t>(rng() % 3);
  const Bytes mb = EncodeWithTable(many, freqs, 4);
  CHECK(DecodeWithTable(mb, many.size(), freqs, 4) == many);
  const Bytes truncated(mb.begin(), mb.begin() + 6);
  CHECK(CaptureCode([&] { DecodeWithTable(truncated, many.size(), freqs, 4); }) ==
        ErrorCode::kStreamUnderflow);
  CHECK(CaptureCode([&] { Decoder d(Bytes{1, 0, 0}); }) == ErrorCode::kStreamUnderflow);
}

}  // namespace
}  // namespace dlic::rans
