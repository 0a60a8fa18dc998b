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

#ifndef DLIC_DIGEST_H_
#define DLIC_DIGEST_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace dlic {

using Sha256Digest = std::array<uint8_t, 32>;

Sha256Digest Sha256(std::span<const uint8_t> data);
uint32_t Crc32(std::span<const uint8_t> data);

std::string ToHex(std::span<const uint8_t> data);

}  // namespace dlic

#endif  // DLIC_DIGEST_H_
