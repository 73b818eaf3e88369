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

#pragma once

#include <stdexcept>
#include <string>

namespace wcnslu {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParse,
  kInvalidProbability,
  kInvalidWcn,
  kAllBinsPruned,
  kEmptyInput,
  kShapeMismatch,
  kIndexOutOfRange,
  kNonFiniteValue,
  kCorpusEmpty,
  kEmptyLabels,
  kUnknownActOrSlot,
  kDegenerateInput,
  kLengthMismatch,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// C layer can map it onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the JSONL loaders; line is 1-based.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& reason)
      : Error(code, "line " + std::to_string(line) + ": " + reason),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace wcnslu
