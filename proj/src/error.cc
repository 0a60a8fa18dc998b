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

#include "dlic/error.h"

namespace dlic {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSumMismatch: return "SumMismatch";
    case ErrorCode::kZeroFrequency: return "ZeroFrequency";
    case ErrorCode::kStreamUnderflow: return "StreamUnderflow";
    case ErrorCode::kNonCausalWindow: return "NonCausalWindow";
    case ErrorCode::kUnsupportedDepth: return "UnsupportedDepth";
    case ErrorCode::kPositionOutOfBounds: return "PositionOutOfBounds";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDegeneratePdf: return "DegeneratePdf";
    case ErrorCode::kCorruptModel: return "CorruptModel";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDivergedLoss: return "DivergedLoss";
    case ErrorCode::kCorruptContainer: return "CorruptContainer";
    case ErrorCode::kModelHashMismatch: return "ModelHashMismatch";
    case ErrorCode::kMalformedPgm: return "MalformedPgm";
    case ErrorCode::kUnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::kHeaderMismatch: return "HeaderMismatch";
  }
  return "Unknown";
}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dlic
