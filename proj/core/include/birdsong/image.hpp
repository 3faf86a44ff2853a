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

// Minimal raster images and PNG I/O (libpng) for spectrograms and training
// curves.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace birdsong {

/// 8-bit image with 1 (gray) or 3 (RGB) channels, rows stored top to bottom.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;
  std::map<std::string, std::string> text;  // written as tEXt chunks

  Image() = default;
  Image(std::size_t w, std::size_t h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c), pixels(w * h * static_cast<std::size_t>(c), fill) {}

  std::uint8_t* at(std::size_t x, std::size_t y) {
    return pixels.data() + (y * width + x) * static_cast<std::size_t>(channels);
  }
  const std::uint8_t* at(std::size_t x, std::size_t y) const {
    return pixels.data() + (y * width + x) * static_cast<std::size_t>(channels);
  }
};

void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

}  // namespace birdsong
