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

#include "birdsong/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "birdsong/error.hpp"

namespace birdsong {

void FeatureConfig::validate() const {
  if (n_mfcc == 0 || n_mfcc > n_mels)
    throw Error(ErrorKind::kInvalidArgument, "n_mfcc must be in [1, n_mels]");
  if (n_mels < 2) throw Error(ErrorKind::kInvalidArgument, "n_mels must be at least 2");
  if (f_min_hz < 0.0) throw Error(ErrorKind::kInvalidArgument, "f_min_hz must be non-negative");
  if (f_max_hz && !(*f_max_hz > f_min_hz))
    throw Error(ErrorKind::kInvalidArgument, "f_max_hz must exceed f_min_hz");
  if (!(mel_constant > 0.0)) throw Error(ErrorKind::kInvalidArgument, "mel_constant must be positive");
  if (sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  if (!(clip_seconds > 0.0)) throw Error(ErrorKind::kInvalidArgument, "clip_seconds must be positive");
  if (!(frame_ms > 0.0) || !(hop_ms > 0.0) || hop_ms > frame_ms)
    throw Error(ErrorKind::kInvalidArgument, "need frame_ms > 0 and 0 < hop_ms <= frame_ms");
}

double hz_to_mel(double hz, double mel_constant) {
  if (hz < 0.0 || std::isnan(hz))
    throw Error(ErrorKind::kInvalidArgument, "frequency must be non-negative");
  return mel_constant * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel, double mel_constant) {
  if (mel < 0.0 || std::isnan(mel))
    throw Error(ErrorKind::kInvalidArgument, "mel value must be non-negative");
  return 700.0 * (std::pow(10.0, mel / mel_constant) - 1.0);
}

std::vector<double> MelFilterbank::apply(std::span<const double> power) const {
  if (power.size() != n_bins())
    throw Error(ErrorKind::kLengthMismatch, "power spectrum length does not match filterbank");
  std::vector<double> out(n_mels(), 0.0);
  for (std::size_t m = 0; m < out.size(); ++m) {
    auto row = weights.row(m);
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * power[k];
    out[m] = acc;
  }
  return out;
}

MelFilterbank build_filterbank(const FeatureConfig& config, std::size_t fft_size,
                               int sample_rate_hz) {
  config.validate();
  if (!is_power_of_two(fft_size))
    throw Error(ErrorKind::kInvalidArgument, "fft_size must be a power of two");
  if (sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  const double nyquist = sample_rate_hz / 2.0;
  const double f_max = config.resolved_f_max(sample_rate_hz);
  if (f_max > nyquist)
    throw Error(ErrorKind::kInvalidArgument,
                "f_max " + std::to_string(f_max) + " Hz exceeds Nyquist " + std::to_string(nyquist));
  if (!(f_max > config.f_min_hz))
    throw Error(ErrorKind::kInvalidArgument, "f_max must exceed f_min");

  const std::size_t n_mels = config.n_mels;
  const std::size_t n_bins = fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(config.f_min_hz, config.mel_constant);
  const double mel_hi = hz_to_mel(f_max, config.mel_constant);

  MelFilterbank fb;
  fb.fft_size = fft_size;
  fb.sample_rate_hz = sample_rate_hz;
  fb.weights = Matrix(n_mels, n_bins);
  fb.edge_freqs_hz.resize(n_mels + 2);
  for (std::size_t i = 0; i < n_mels + 2; ++i) {
    double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(n_mels + 1);
    fb.edge_freqs_hz[i] = mel_to_hz(mel, config.mel_constant);
  }
  fb.edge_freqs_hz.front() = config.f_min_hz;
  fb.edge_freqs_hz.back() = f_max;
  fb.center_freqs_hz.assign(fb.edge_freqs_hz.begin() + 1, fb.edge_freqs_hz.end() - 1);

  const double bin_hz = static_cast<double>(sample_rate_hz) / static_cast<double>(fft_size);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = fb.edge_freqs_hz[m];
    const double center = fb.edge_freqs_hz[m + 1];
    const double right = fb.edge_freqs_hz[m + 2];
    auto row = fb.weights.row(m);
    bool any = false;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      const double rise = (f - left) / (center - left);
      const double fall = (right - f) / (right - center);
      const double w = std::max(0.0, std::min(rise, fall));
      row[k] = w;
      any = any || w > 0.0;
    }
    if (!any) {
      auto nearest = static_cast<std::size_t>(std::lround(center / bin_hz));
      row[std::min(nearest, n_bins - 1)] = 1.0;
    }
  }
  return fb;
}

std::vector<double> dct_ii(std::span<const double> v, std::size_t n_out) {
  const std::size_t n = v.size();
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "DCT of an empty sequence");
  if (n_out > n) throw Error(ErrorKind::kInvalidArgument, "n_out exceeds input length");
  std::vector<double> out(n_out);
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += v[j] * std::cos(std::numbers::pi * static_cast<double>(k) *
                             (2.0 * static_cast<double>(j) + 1.0) / (2.0 * nd));
    out[k] = acc * (k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd));
  }
  return out;
}

MfccExtractor::MfccExtractor(const FeatureConfig& config, int sample_rate_hz)
    : config_(config),
      sample_rate_hz_(sample_rate_hz),
      layout_(frame_layout(sample_rate_hz, config.frame_ms, config.hop_ms)),
      plan_(next_power_of_two(layout_.frame_len)),
      filterbank_(build_filterbank(config, plan_.size(), sample_rate_hz)) {
  window_ = hann_window(std::vector<double>(layout_.frame_len, 1.0));

  // Row k of the basis is DCT-II applied to the unit impulses, so
  // basis * v == dct_ii(v, n_mfcc) up to summation order.
  const std::size_t n = config_.n_mels;
  dct_basis_ = Matrix(config_.n_mfcc, n);
  std::vector<double> impulse(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    impulse[j] = 1.0;
    auto column = dct_ii(impulse, config_.n_mfcc);
    for (std::size_t k = 0; k < config_.n_mfcc; ++k) dct_basis_(k, j) = column[k];
    impulse[j] = 0.0;
  }
}

Matrix MfccExtractor::frames(const AudioClip& clip) const {
  if (clip.samples.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot featurize an empty clip");
  if (clip.sample_rate_hz != sample_rate_hz_)
    throw Error(ErrorKind::kInvalidArgument,
                "clip rate " + std::to_string(clip.sample_rate_hz) +
                    " Hz does not match extractor rate " + std::to_string(sample_rate_hz_));

  const std::size_t n_frames = frame_count(clip.samples.size(), layout_);
  Matrix out(n_frames, config_.n_mfcc);
  Spectrum buffer(plan_.size());
  std::vector<double> power(plan_.size() / 2 + 1);
  std::vector<double> log_mel(config_.n_mels);

  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = f * layout_.hop;
    const std::size_t len = std::min(layout_.frame_len, clip.samples.size() - start);
    std::fill(buffer.begin(), buffer.end(), Complex{});
    for (std::size_t i = 0; i < len; ++i) buffer[i] = clip.samples[start + i] * window_[i];
    plan_.transform(buffer);
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buffer[k]);

    auto energies = filterbank_.apply(power);
    for (std::size_t m = 0; m < energies.size(); ++m)
      log_mel[m] = std::log(energies[m] + kLogFloor);

    auto row = out.row(f);
    for (std::size_t k = 0; k < config_.n_mfcc; ++k) {
      auto basis = dct_basis_.row(k);
      double acc = 0.0;
      for (std::size_t m = 0; m < log_mel.size(); ++m) acc += basis[m] * log_mel[m];
      row[k] = acc;
    }
  }
  return out;
}

Matrix mfcc_frames(const AudioClip& clip, const FeatureConfig& config) {
  return MfccExtractor(config, clip.sample_rate_hz).frames(clip);
}

FeatureVector aggregate_features(const Matrix& frames) {
  if (frames.rows() == 0 || frames.cols() == 0)
    throw Error(ErrorKind::kInvalidArgument, "cannot aggregate an empty frame matrix");
  FeatureVector fv{std::vector<double>(frames.cols(), 0.0)};
  for (std::size_t r = 0; r < frames.rows(); ++r) {
    auto row = frames.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) fv.coeffs[c] += row[c];
  }
  const double inv = 1.0 / static_cast<double>(frames.rows());
  for (double& c : fv.coeffs) c *= inv;
  return fv;
}

FeatureVector clip_features(const AudioClip& clip, const MfccExtractor& extractor) {
  AudioClip prepared = trim(resample(clip, extractor.sample_rate_hz()), extractor.config().clip_seconds);
  return aggregate_features(extractor.frames(prepared));
}

}  // namespace birdsong
