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

// Synthetic five-class corpus. Each class is a harmonic stack with its own
// fundamental, harmonic roll-off and amplitude-modulation rate; every clip
// adds seeded pitch jitter, random phases and Gaussian noise 20 dB below the
// signal RMS.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "birdsong/audio_io.hpp"
#include "birdsong/train_eval.hpp"

namespace birdsong {

struct ClassSignature {
  std::string label;
  double fundamental_hz;
  int harmonics;
  double rolloff;        // amplitude of harmonic h is rolloff^(h-1)
  double am_rate_hz;
  double am_depth;       // 0 = steady tone
};

inline constexpr std::size_t kFixtureClasses = 5;
const std::array<ClassSignature, kFixtureClasses>& fixture_signatures();

struct FixtureOptions {
  int sample_rate_hz = 44100;
  double seconds = 15.0;
  double peak = 0.5;
  double noise_db = -20.0;
};

/// Noise-free, unjittered signal of one class.
AudioClip clean_signature(std::size_t class_index, int sample_rate_hz, double seconds);

/// One jittered, noisy realization. Deterministic in (class, seed).
AudioClip synthesize_clip(std::size_t class_index, std::uint64_t seed,
                          const FixtureOptions& options = {});

/// Writes kFixtureClasses x n_per_class 16-bit WAVs plus `manifest.csv` under
/// out_dir and returns the manifest. Byte-identical for equal arguments.
DatasetManifest generate_fixtures(std::size_t n_per_class, std::uint64_t seed,
                                  const std::filesystem::path& out_dir,
                                  const FixtureOptions& options = {});

}  // namespace birdsong
