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

#ifndef DLIC_ERROR_H_
#define DLIC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dlic {

enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  // rans
  kSumMismatch,
  kZeroFrequency,
  kStreamUnderflow,
  // wavefront
  kNonCausalWindow,
  kUnsupportedDepth,
  kPositionOutOfBounds,
  // model
  kShapeMismatch,
  kDegeneratePdf,
  kCorruptModel,
  kVersionMismatch,
  // train
  kEmptyInput,
  kDivergedLoss,
  // container
  kCorruptContainer,
  kModelHashMismatch,
  // image io
  kMalformedPgm,
  kUnsupportedMaxval,
  kHeaderMismatch,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception; code() is stable and is
// what the CLI prints.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace dlic

#endif  // DLIC_ERROR_H_
