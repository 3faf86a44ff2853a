// Copyright 2026 The Birdsong Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace birdsong {

/// Failure categories surfaced by the library. Callers that need to branch on
/// a failure (HTTP status mapping, CLI exit codes, tests) switch on these.
enum class ErrorKind {
  kInvalidArgument,
  // WAV decoding
  kMalformedHeader,
  kUnsupportedEncoding,
  kEmptyData,
  kTruncatedData,
  kUnsupportedBitDepth,
  kLengthMismatch,
  // Model persistence
  kVersionMismatch,
  kCorruptFile,
  kShapeMismatch,
  // Training
  kNonFinite,
  kMissingCache,
  // Filesystem / datasets
  kIo,
  kManifest,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace birdsong
