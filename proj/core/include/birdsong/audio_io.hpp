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

// WAV decoding and clip-level preprocessing: integer PCM normalization,
// stereo mixdown, linear resampling, trimming and fixed-window segmentation.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace birdsong {

/// Integer PCM as stored in the container. 8-bit WAV data (unsigned on disk)
/// is re-centred so every channel holds signed values.
struct RawAudio {
  std::vector<std::vector<std::int32_t>> channels;
  int bit_depth = 16;
  int sample_rate_hz = 44100;

  std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Normalized mono waveform; samples lie in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = 44100;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

/// A window cut from a longer clip, with its position in the source.
struct Segment {
  AudioClip clip;
  std::size_t index = 0;
  std::size_t start_sample = 0;
  double start_seconds = 0.0;
  double end_seconds = 0.0;
};

/// Parses a RIFF/WAVE container holding integer PCM (format tag 1, or
/// WAVE_FORMAT_EXTENSIBLE with a PCM sub-format). Unknown chunks are skipped.
RawAudio decode_wav(std::span<const std::uint8_t> bytes);
RawAudio read_wav_file(const std::filesystem::path& path);

/// Serializes integer PCM at the bit depth recorded in `raw`.
std::vector<std::uint8_t> encode_wav(const RawAudio& raw);
void write_wav_file(const std::filesystem::path& path, const RawAudio& raw);

/// Quantizes a clip to 16-bit PCM (round-to-nearest, clamped).
RawAudio quantize_pcm16(const AudioClip& clip);

/// Divides each sample by 2^(bit_depth-1).
std::vector<std::vector<double>> normalize(const RawAudio& raw);

/// Elementwise mean across channels.
std::vector<double> to_mono(const std::vector<std::vector<double>>& channels);

/// decode -> normalize -> mono.
AudioClip decode_clip(std::span<const std::uint8_t> bytes);
AudioClip load_clip(const std::filesystem::path& path);

/// Linear-interpolation resampling; output length is
/// round(len * target / source). Same rate returns the input unchanged.
AudioClip resample(const AudioClip& clip, int target_rate_hz);

/// Keeps at most the first `max_seconds` of audio.
AudioClip trim(const AudioClip& clip, double max_seconds = 15.0);

/// Non-overlapping windows of `window_seconds`. A trailing partial window is
/// kept only when it lasts at least `min_tail_seconds`.
std::vector<Segment> segment(const AudioClip& clip, double window_seconds = 15.0,
                             double min_tail_seconds = 3.0);

}  // namespace birdsong
