/*
 * Copyright 2026 The wcnslu Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "wcnslu/error.hpp"

namespace wcnslu {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kInvalidWcn: return "InvalidWcn";
    case ErrorCode::kAllBinsPruned: return "AllBinsPruned";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kCorpusEmpty: return "CorpusEmpty";
    case ErrorCode::kEmptyLabels: return "EmptyLabels";
    case ErrorCode::kUnknownActOrSlot: return "UnknownActOrSlot";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

}  // namespace wcnslu
