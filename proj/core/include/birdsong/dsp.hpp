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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "birdsong/audio_io.hpp"
#include "birdsong/matrix.hpp"

namespace birdsong {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// n-point DFT of a real signal (zero-padded to n) by iterative radix-2
/// decimation in time. Throws kInvalidArgument if n is zero, not a power of
/// two, or shorter than the signal.
Spectrum fft(std::span<const double> signal, std::size_t n);

/// Precomputed twiddles and bit-reversal permutation for one transform size.
/// Immutable after construction; one plan may be shared across threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  /// In-place transform of exactly size() points. `inverse` computes the
  /// unscaled inverse (caller divides by n).
  void transform(std::span<Complex> data, bool inverse = false) const;

  /// Forward transform of a real signal zero-padded to size().
  Spectrum forward(std::span<const double> signal) const;

 private:
  std::size_t n_;
  std::vector<Complex> twiddles_;  // exp(-2 pi i k / n), k < n/2
  std::vector<std::size_t> bit_reverse_;
};

/// Circular convolution of two equal-length real sequences, by direct
/// summation.
std::vector<double> circular_convolve(std::span<const double> h, std::span<const double> x);

struct FrameLayout {
  std::size_t frame_len = 0;
  std::size_t hop = 0;
};

/// frame_len = round(frame_ms * rate / 1000), hop likewise.
FrameLayout frame_layout(int sample_rate_hz, double frame_ms, double hop_ms);

/// floor((len - frame_len) / hop) + 1 when len >= frame_len, else 1.
std::size_t frame_count(std::size_t len, const FrameLayout& layout);

/// Splits a clip into overlapping frames. A clip shorter than one frame
/// yields a single zero-padded frame.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip, double frame_ms = 40.0,
                                              double hop_ms = 20.0);

/// Periodic Hann: w[k] = 0.5 (1 - cos(2 pi k / N)).
std::vector<double> hann_window(std::span<const double> frame);

/// |X[k]|^2 for k = 0..n/2.
std::vector<double> power_spectrum(std::span<const Complex> spectrum);

struct PowerSpectrogram {
  Matrix frames;  // n_frames x (fft_size / 2 + 1)
  std::size_t frame_len_samples = 0;
  std::size_t hop_samples = 0;
  std::size_t fft_size = 0;
  int sample_rate_hz = 0;

  std::size_t n_frames() const { return frames.rows(); }
  std::size_t n_bins() const { return frames.cols(); }
};

/// Framing -> Hann -> FFT (next power of two >= frame length) -> power.
PowerSpectrogram compute_spectrogram(const AudioClip& clip, double frame_ms = 40.0,
                                     double hop_ms = 20.0);

/// Floor added to power before taking decibels.
inline constexpr double kDbEpsilon = 1e-10;

/// 8-bit intensities (rows = bins with the highest frequency first, columns
/// = frames) from 10 log10(p + eps), mapped linearly between the matrix's min
/// and max dB. A flat spectrogram maps to 0 everywhere.
std::vector<std::uint8_t> spectrogram_intensities(const PowerSpectrogram& spec);

/// Writes the spectrogram as an 8-bit grayscale PNG, one column per frame and
/// one row per bin, low frequencies at the bottom.
void render_spectrogram(const PowerSpectrogram& spec, const std::filesystem::path& out_path);

}  // namespace birdsong
