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

#include "birdsong/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "birdsong/error.hpp"
#include "birdsong/nn.hpp"

namespace birdsong {
namespace {

struct Realization {
  double fundamental_hz;
  double am_rate_hz;
  std::vector<double> phases;  // one per harmonic
  double am_phase;
};

std::vector<double> render(const ClassSignature& sig, const Realization& r, int rate,
                           std::size_t n) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::vector<double> out(n, 0.0);
  const double nyquist = rate / 2.0;
  for (int h = 1; h <= sig.harmonics; ++h) {
    const double f = r.fundamental_hz * h;
    if (f >= nyquist) break;
    const double amp = std::pow(sig.rolloff, h - 1);
    const double w = kTwoPi * f / rate;
    const double phase = r.phases[static_cast<std::size_t>(h - 1)];
    for (std::size_t i = 0; i < n; ++i) out[i] += amp * std::sin(w * static_cast<double>(i) + phase);
  }
  const double wm = kTwoPi * r.am_rate_hz / rate;
  for (std::size_t i = 0; i < n; ++i)
    out[i] *= 1.0 - sig.am_depth * 0.5 * (1.0 + std::sin(wm * static_cast<double>(i) + r.am_phase));
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

const std::array<ClassSignature, kFixtureClasses>& fixture_signatures() {
  static const std::array<ClassSignature, kFixtureClasses> kSignatures{{
      {"species_a", 650.0, 6, 0.55, 2.0, 0.8},
      {"species_b", 1250.0, 4, 0.70, 4.5, 0.6},
      {"species_c", 2100.0, 3, 0.45, 8.0, 0.9},
      {"species_d", 3300.0, 5, 0.35, 1.2, 0.4},
      {"species_e", 4700.0, 2, 0.60, 12.0, 0.7},
  }};
  return kSignatures;
}

AudioClip clean_signature(std::size_t class_index, int sample_rate_hz, double seconds) {
  if (class_index >= kFixtureClasses)
    throw Error(ErrorKind::kInvalidArgument, "fixture class index out of range");
  const auto& sig = fixture_signatures()[class_index];
  Realization r{sig.fundamental_hz, sig.am_rate_hz,
                std::vector<double>(static_cast<std::size_t>(sig.harmonics), 0.0), 0.0};
  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate_hz));
  return {render(sig, r, sample_rate_hz, n), sample_rate_hz};
}

AudioClip synthesize_clip(std::size_t class_index, std::uint64_t seed,
                          const FixtureOptions& options) {
  if (class_index >= kFixtureClasses)
    throw Error(ErrorKind::kInvalidArgument, "fixture class index out of range");
  const auto& sig = fixture_signatures()[class_index];
  Rng rng(seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  Realization r;
  r.fundamental_hz = sig.fundamental_hz * (1.0 + 0.03 * jitter(rng));
  r.am_rate_hz = sig.am_rate_hz * (1.0 + 0.10 * jitter(rng));
  for (int h = 0; h < sig.harmonics; ++h) r.phases.push_back(angle(rng));
  r.am_phase = angle(rng);

  const auto n = static_cast<std::size_t>(std::llround(options.seconds * options.sample_rate_hz));
  auto samples = render(sig, r, options.sample_rate_hz, n);

  double energy = 0.0;
  for (double s : samples) energy += s * s;
  const double rms = n ? std::sqrt(energy / static_cast<double>(n)) : 0.0;
  std::normal_distribution<double> noise(0.0, rms * std::pow(10.0, options.noise_db / 20.0));
  for (double& s : samples) s += noise(rng);

  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0)
    for (double& s : samples) s *= options.peak / peak;
  return {std::move(samples), options.sample_rate_hz};
}

DatasetManifest generate_fixtures(std::size_t n_per_class, std::uint64_t seed,
                                  const std::filesystem::path& out_dir,
                                  const FixtureOptions& options) {
  if (n_per_class == 0) throw Error(ErrorKind::kInvalidArgument, "n_per_class must be at least 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw Error(ErrorKind::kIo, "cannot create directory " + out_dir.string());

  DatasetManifest manifest;
  manifest.base_dir = out_dir;
  for (std::size_t c = 0; c < kFixtureClasses; ++c) {
    const auto& label = fixture_signatures()[c].label;
    manifest.labels.push_back(label);
    for (std::size_t i = 0; i < n_per_class; ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%04zu.wav", label.c_str(), i);
      AudioClip clip = synthesize_clip(c, mix_seed(seed, c, i), options);
      write_wav_file(out_dir / name, quantize_pcm16(clip));
      manifest.entries.push_back({name, label});
    }
  }
  write_manifest(out_dir / "manifest.csv", manifest);
  return manifest;
}

}  // namespace birdsong
