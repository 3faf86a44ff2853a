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

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <set>

#include "birdsong/dsp.hpp"
#include "birdsong/error.hpp"
#include "birdsong/image.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace birdsong {
namespace {

std::vector<double> random_signal(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

double max_abs_diff(const Spectrum& a, const Spectrum& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

TEST(Fft, SmallClosedForms) {
  const std::vector<double> dc{1, 1, 1, 1};
  auto s = fft(dc, 4);
  EXPECT_NEAR(std::abs(s[0] - Complex(4, 0)), 0.0, 1e-15);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(std::abs(s[k]), 0.0, 1e-15);

  const std::vector<double> impulse{1, 0, 0, 0};
  for (const auto& bin : fft(impulse, 4)) EXPECT_NEAR(std::abs(bin - Complex(1, 0)), 0.0, 1e-15);
}

TEST(Fft, MatchesNaiveDft) {
  std::mt19937_64 rng(1);
  for (std::size_t n = 1; n <= 1024; n *= 2) {
    auto x = random_signal(rng, n);
    EXPECT_LT(max_abs_diff(fft(x, n), oracle::naive_dft(x, n)), 1e-9) << n;
  }
  // Zero padding: a 40-sample signal in a 64-point transform.
  auto x = random_signal(rng, 40);
  EXPECT_LT(max_abs_diff(fft(x, 64), oracle::naive_dft(x, 64)), 1e-9);
}

TEST(Fft, RejectsBadSizes) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_THROW(fft(x, 0), Error);
  EXPECT_THROW(fft(x, 6), Error);
  EXPECT_THROW(fft(x, 2), Error);
  EXPECT_TRUE(is_power_of_two(1));
  EXPECT_FALSE(is_power_of_two(0));
  EXPECT_EQ(next_power_of_two(1764), 2048u);
  EXPECT_EQ(next_power_of_two(2048), 2048u);
}

TEST(Fft, ConjugateSymmetryAndLinearity) {
  std::mt19937_64 rng(2);
  const std::size_t n = 256;
  auto x = random_signal(rng, n);
  auto y = random_signal(rng, n);
  auto fx = fft(x, n);
  auto fy = fft(y, n);
  EXPECT_EQ(fx[0].imag(), 0.0);
  for (std::size_t k = 1; k < n; ++k) EXPECT_LT(std::abs(fx[k] - std::conj(fx[n - k])), 1e-9);

  const double a = 1.7, b = -0.3;
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) mix[i] = a * x[i] + b * y[i];
  auto fm = fft(mix, n);
  for (std::size_t k = 0; k < n; ++k) EXPECT_LT(std::abs(fm[k] - (a * fx[k] + b * fy[k])), 1e-9);
}

TEST(Fft, InverseRecoversInput) {
  std::mt19937_64 rng(4);
  const std::size_t n = 512;
  auto x = random_signal(rng, n);
  FftPlan plan(n);
  Spectrum s = plan.forward(x);
  plan.transform(s, true);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(s[i].real() / n, x[i], 1e-12);
}

TEST(Fft, ConvolutionTheorem) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = std::size_t{1} << (2 + trial % 8);
    auto h = random_signal(rng, n);
    auto x = random_signal(rng, n);
    auto y = circular_convolve(h, x);
    auto y_ref = oracle::naive_circular_convolution(h, x);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], y_ref[i], 1e-9);
    auto fy = fft(y_ref, n);
    auto fh = fft(h, n);
    auto fx = fft(x, n);
    for (std::size_t k = 0; k < n; ++k) EXPECT_LT(std::abs(fy[k] - fh[k] * fx[k]), 1e-6);
  }
}

TEST(Framing, CountsAndPadding) {
  EXPECT_EQ(frame_signal(AudioClip{std::vector<double>(1000, 1.0), 1000}).size(), 49u);
  auto frames = frame_signal(AudioClip{std::vector<double>(1000, 1.0), 1000});
  EXPECT_EQ(frames.front().size(), 40u);

  EXPECT_EQ(frame_signal(AudioClip{std::vector<double>(40, 1.0), 1000}).size(), 1u);

  auto short_frames = frame_signal(AudioClip{std::vector<double>(10, 1.0), 1000});
  ASSERT_EQ(short_frames.size(), 1u);
  ASSERT_EQ(short_frames[0].size(), 40u);
  EXPECT_EQ(short_frames[0][9], 1.0);
  EXPECT_EQ(short_frames[0][10], 0.0);

  EXPECT_THROW(frame_signal(AudioClip{{}, 1000}), Error);
  EXPECT_THROW(frame_layout(1000, 20.0, 30.0), Error);
  EXPECT_THROW(frame_layout(1000, 0.0, 0.0), Error);
}

TEST(Framing, CountFormulaProperty) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> frame_dist(1, 300);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t frame = frame_dist(rng);
    const std::size_t hop = std::uniform_int_distribution<std::size_t>(1, frame)(rng);
    const std::size_t len = frame + std::uniform_int_distribution<std::size_t>(0, 5000)(rng);
    EXPECT_EQ(frame_count(len, {frame, hop}), (len - frame) / hop + 1);
  }
}

TEST(Framing, PaperRateLayout) {
  const auto layout = frame_layout(44100, 40.0, 20.0);
  EXPECT_EQ(layout.frame_len, 1764u);
  EXPECT_EQ(layout.hop, 882u);
  EXPECT_EQ(frame_count(661500, layout), 749u);
}

TEST(Hann, ClosedForm) {
  const std::vector<double> ones(4, 1.0);
  auto w = hann_window(ones);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_NEAR(w[0], 0.0, 1e-15);
  EXPECT_NEAR(w[1], 0.5, 1e-15);
  EXPECT_NEAR(w[2], 1.0, 1e-15);
  EXPECT_NEAR(w[3], 0.5, 1e-15);
  for (double v : hann_window(std::vector<double>(7, 0.0))) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(hann_window(std::vector<double>{3.0, 2.0})[0], 0.0);
}

TEST(PowerSpectrum, ValuesAndParseval) {
  for (double v : power_spectrum(Spectrum(8))) EXPECT_EQ(v, 0.0);
  auto p = power_spectrum(fft(std::vector<double>{1, 1, 1, 1}, 4));
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], 16.0, 1e-12);

  std::mt19937_64 rng(8);
  const std::size_t n = 1024;
  auto x = random_signal(rng, n);
  auto s = fft(x, n);
  double spectral = 0.0, temporal = 0.0;
  for (const auto& bin : s) spectral += std::norm(bin);
  for (double v : x) temporal += v * v;
  EXPECT_LT(std::abs(spectral - n * temporal) / (n * temporal), 1e-9);
}

TEST(Spectrogram, ShapeAndTonePeak) {
  const int rate = 8000;
  AudioClip tone{std::vector<double>(rate), rate};
  for (std::size_t i = 0; i < tone.samples.size(); ++i)
    tone.samples[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * i / rate);
  auto spec = compute_spectrogram(tone);
  EXPECT_EQ(spec.fft_size, 512u);
  EXPECT_EQ(spec.n_bins(), 257u);
  EXPECT_EQ(spec.n_frames(), frame_count(tone.samples.size(), frame_layout(rate, 40.0, 20.0)));
  for (double v : spec.frames.data()) EXPECT_GE(v, 0.0);

  const std::size_t expected_bin =
      static_cast<std::size_t>(std::lround(440.0 * spec.fft_size / rate));
  auto pixels = spectrogram_intensities(spec);
  const std::size_t width = spec.n_frames();
  const std::size_t mid = width / 2;
  std::size_t brightest_row = 0;
  for (std::size_t y = 0; y < spec.n_bins(); ++y)
    if (pixels[y * width + mid] > pixels[brightest_row * width + mid]) brightest_row = y;
  EXPECT_EQ(spec.n_bins() - 1 - brightest_row, expected_bin);
}

TEST(Spectrogram, RenderedPngDimensionsAndUniformImage) {
  testing::TempDir dir;
  PowerSpectrogram spec;
  spec.frames = Matrix(10, 5, 2.0);
  spec.fft_size = 8;
  spec.sample_rate_hz = 8000;
  render_spectrogram(spec, dir / "flat.png");
  Image img = read_png(dir / "flat.png");
  EXPECT_EQ(img.width, 10u);
  EXPECT_EQ(img.height, 5u);
  EXPECT_EQ(img.channels, 1);
  EXPECT_EQ(img.text.at("Colormap"), "grayscale");
  EXPECT_EQ(std::set<std::uint8_t>(img.pixels.begin(), img.pixels.end()).size(), 1u);

  // Low frequencies are drawn at the bottom.
  spec.frames(3, 0) = 100.0;
  render_spectrogram(spec, dir / "spot.png");
  Image spot = read_png(dir / "spot.png");
  EXPECT_EQ(*spot.at(3, 4), 255);
  EXPECT_EQ(*spot.at(3, 0), 0);

  EXPECT_THROW(render_spectrogram(spec, dir / "no" / "such" / "dir.png"), Error);
  EXPECT_THROW(render_spectrogram(PowerSpectrogram{}, dir / "empty.png"), Error);
}

}  // namespace
}  // namespace birdsong
