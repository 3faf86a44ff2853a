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

#include "birdsong/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "birdsong/error.hpp"
#include "birdsong/image.hpp"

namespace birdsong {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (!is_power_of_two(n))
    throw Error(ErrorKind::kInvalidArgument,
                "FFT size must be a positive power of two, got " + std::to_string(n));
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
  bit_reverse_.resize(n);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    bit_reverse_[i] = r;
  }
}

void FftPlan::transform(std::span<Complex> data, bool inverse) const {
  if (data.size() != n_)
    throw Error(ErrorKind::kInvalidArgument, "FFT input length does not match plan size");
  for (std::size_t i = 0; i < n_; ++i)
    if (i < bit_reverse_[i]) std::swap(data[i], data[bit_reverse_[i]]);

  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        Complex w = twiddles_[k * stride];
        if (inverse) w = std::conj(w);
        Complex odd = w * data[start + k + half];
        Complex even = data[start + k];
        data[start + k] = even + odd;
        data[start + k + half] = even - odd;
      }
    }
  }
}

Spectrum FftPlan::forward(std::span<const double> signal) const {
  if (signal.size() > n_)
    throw Error(ErrorKind::kInvalidArgument, "signal longer than FFT size");
  Spectrum out(n_);
  std::copy(signal.begin(), signal.end(), out.begin());
  transform(out);
  return out;
}

Spectrum fft(std::span<const double> signal, std::size_t n) {
  return FftPlan(n).forward(signal);
}

std::vector<double> circular_convolve(std::span<const double> h, std::span<const double> x) {
  if (h.size() != x.size())
    throw Error(ErrorKind::kLengthMismatch, "circular convolution needs equal lengths");
  const std::size_t n = x.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t k = 0; k < n; ++k) y[t] += h[k] * x[(t + n - k) % n];
  return y;
}

FrameLayout frame_layout(int sample_rate_hz, double frame_ms, double hop_ms) {
  if (!(frame_ms > 0.0)) throw Error(ErrorKind::kInvalidArgument, "frame_ms must be positive");
  if (!(hop_ms > 0.0) || hop_ms > frame_ms)
    throw Error(ErrorKind::kInvalidArgument, "hop_ms must be in (0, frame_ms]");
  if (sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  FrameLayout layout;
  layout.frame_len = static_cast<std::size_t>(std::llround(frame_ms * sample_rate_hz / 1000.0));
  layout.hop = static_cast<std::size_t>(std::llround(hop_ms * sample_rate_hz / 1000.0));
  if (layout.frame_len == 0 || layout.hop == 0)
    throw Error(ErrorKind::kInvalidArgument, "frame or hop rounds to zero samples");
  return layout;
}

std::size_t frame_count(std::size_t len, const FrameLayout& layout) {
  if (len < layout.frame_len) return 1;
  return (len - layout.frame_len) / layout.hop + 1;
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip, double frame_ms,
                                              double hop_ms) {
  if (clip.samples.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot frame an empty signal");
  const FrameLayout layout = frame_layout(clip.sample_rate_hz, frame_ms, hop_ms);
  const std::size_t n = frame_count(clip.samples.size(), layout);
  std::vector<std::vector<double>> frames(n, std::vector<double>(layout.frame_len, 0.0));
  for (std::size_t f = 0; f < n; ++f) {
    const std::size_t start = f * layout.hop;
    const std::size_t len = std::min(layout.frame_len, clip.samples.size() - start);
    std::copy_n(clip.samples.begin() + static_cast<std::ptrdiff_t>(start), len, frames[f].begin());
  }
  return frames;
}

std::vector<double> hann_window(std::span<const double> frame) {
  const std::size_t n = frame.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                     static_cast<double>(n)));
    out[k] = frame[k] * w;
  }
  return out;
}

std::vector<double> power_spectrum(std::span<const Complex> spectrum) {
  const std::size_t bins = spectrum.size() / 2 + 1;
  std::vector<double> out(std::min(bins, spectrum.size()));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(spectrum[k]);
  return out;
}

PowerSpectrogram compute_spectrogram(const AudioClip& clip, double frame_ms, double hop_ms) {
  const FrameLayout layout = frame_layout(clip.sample_rate_hz, frame_ms, hop_ms);
  const auto frames = frame_signal(clip, frame_ms, hop_ms);
  const FftPlan plan(next_power_of_two(layout.frame_len));

  PowerSpectrogram spec;
  spec.frame_len_samples = layout.frame_len;
  spec.hop_samples = layout.hop;
  spec.fft_size = plan.size();
  spec.sample_rate_hz = clip.sample_rate_hz;
  spec.frames = Matrix(frames.size(), plan.size() / 2 + 1);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    auto power = power_spectrum(plan.forward(hann_window(frames[f])));
    std::copy(power.begin(), power.end(), spec.frames.row(f).begin());
  }
  return spec;
}

std::vector<std::uint8_t> spectrogram_intensities(const PowerSpectrogram& spec) {
  const std::size_t width = spec.n_frames();
  const std::size_t height = spec.n_bins();
  if (width == 0 || height == 0)
    throw Error(ErrorKind::kInvalidArgument, "cannot render an empty spectrogram");

  std::vector<double> db(spec.frames.size());
  std::transform(spec.frames.data().begin(), spec.frames.data().end(), db.begin(),
                 [](double p) { return 10.0 * std::log10(p + kDbEpsilon); });
  const auto [lo_it, hi_it] = std::minmax_element(db.begin(), db.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;

  std::vector<std::uint8_t> pixels(width * height, 0);
  for (std::size_t f = 0; f < width; ++f) {
    for (std::size_t b = 0; b < height; ++b) {
      double level = range > 0.0 ? (db[f * height + b] - lo) / range : 0.0;
      std::size_t y = height - 1 - b;
      pixels[y * width + f] = static_cast<std::uint8_t>(std::lround(level * 255.0));
    }
  }
  return pixels;
}

void render_spectrogram(const PowerSpectrogram& spec, const std::filesystem::path& out_path) {
  Image image;
  image.width = spec.n_frames();
  image.height = spec.n_bins();
  image.channels = 1;
  image.pixels = spectrogram_intensities(spec);
  image.text["Colormap"] = "grayscale";
  image.text["Scale"] = "dB, 10*log10(power + 1e-10), min-max mapped to 0-255";
  image.text["Software"] = "birdsong";
  write_png(out_path, image);
}

}  // namespace birdsong
