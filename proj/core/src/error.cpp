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

#include "birdsong/error.hpp"

namespace birdsong {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kMalformedHeader: return "malformed-header";
    case ErrorKind::kUnsupportedEncoding: return "unsupported-encoding";
    case ErrorKind::kEmptyData: return "empty-data";
    case ErrorKind::kTruncatedData: return "truncated-data";
    case ErrorKind::kUnsupportedBitDepth: return "unsupported-bit-depth";
    case ErrorKind::kLengthMismatch: return "length-mismatch";
    case ErrorKind::kVersionMismatch: return "version-mismatch";
    case ErrorKind::kCorruptFile: return "corrupt-file";
    case ErrorKind::kShapeMismatch: return "shape-mismatch";
    case ErrorKind::kNonFinite: return "non-finite";
    case ErrorKind::kMissingCache: return "missing-cache";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kManifest: return "manifest";
  }
  return "unknown";
}

}  // namespace birdsong
