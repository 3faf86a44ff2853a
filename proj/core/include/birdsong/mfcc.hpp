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

// Mel-frequency cepstral coefficients.
//
// Per frame: periodic Hann -> radix-2 FFT -> power spectrum -> triangular mel
// filterbank -> natural log (floored at 1e-10) -> orthonormal DCT-II, keeping
// the first n_mfcc coefficients. A clip is summarized by the per-coefficient
// mean over its frames.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "birdsong/audio_io.hpp"
#include "birdsong/dsp.hpp"
#include "birdsong/matrix.hpp"

namespace birdsong {

inline constexpr double kMelConstant = 2595.0;
inline constexpr double kLogFloor = 1e-10;

struct FeatureConfig {
  std::size_t n_mfcc = 80;
  std::size_t n_mels = 128;
  double frame_ms = 40.0;
  double hop_ms = 20.0;
  double f_min_hz = 0.0;
  std::optional<double> f_max_hz;  // defaults to Nyquist
  double mel_constant = kMelConstant;
  int sample_rate_hz = 44100;      // clips are resampled to this rate first
  double clip_seconds = 15.0;      // training clips are trimmed to this length

  double resolved_f_max(int rate) const { return f_max_hz.value_or(rate / 2.0); }

  /// Throws kInvalidArgument if the fields are inconsistent.
  void validate() const;
};

double hz_to_mel(double hz, double mel_constant = kMelConstant);
double mel_to_hz(double mel, double mel_constant = kMelConstant);

struct MelFilterbank {
  Matrix weights;  // n_mels x (fft_size / 2 + 1)
  std::vector<double> center_freqs_hz;
  std::vector<double> edge_freqs_hz;  // n_mels + 2 vertices
  std::size_t fft_size = 0;
  int sample_rate_hz = 0;

  std::size_t n_mels() const { return weights.rows(); }
  std::size_t n_bins() const { return weights.cols(); }

  /// Filter energies for one power spectrum of n_bins() values.
  std::vector<double> apply(std::span<const double> power) const;
};

/// Triangular filters whose n_mels + 2 vertices are equally spaced in mel
/// between f_min and f_max. Each filter is evaluated at the FFT bin centre
/// frequencies; a filter narrower than the bin spacing that would catch no
/// bin at all is given unit weight on the bin nearest its centre.
MelFilterbank build_filterbank(const FeatureConfig& config, std::size_t fft_size,
                               int sample_rate_hz);

/// Orthonormal DCT-II, first n_out coefficients.
std::vector<double> dct_ii(std::span<const double> v, std::size_t n_out);

/// FeatureVector: the n_mfcc clip-level summary fed to the classifier.
struct FeatureVector {
  std::vector<double> coeffs;

  std::size_t size() const { return coeffs.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Holds everything that depends only on (config, sample rate): frame
/// layout, FFT plan, filterbank and DCT basis. Immutable once built, so a
/// single extractor can serve concurrent callers.
class MfccExtractor {
 public:
  MfccExtractor(const FeatureConfig& config, int sample_rate_hz);

  const FeatureConfig& config() const { return config_; }
  const MelFilterbank& filterbank() const { return filterbank_; }
  const FrameLayout& layout() const { return layout_; }
  int sample_rate_hz() const { return sample_rate_hz_; }

  /// n_frames x n_mfcc matrix. The clip must be at sample_rate_hz().
  Matrix frames(const AudioClip& clip) const;

 private:
  FeatureConfig config_;
  int sample_rate_hz_;
  FrameLayout layout_;
  FftPlan plan_;
  MelFilterbank filterbank_;
  std::vector<double> window_;
  Matrix dct_basis_;  // n_mfcc x n_mels
};

Matrix mfcc_frames(const AudioClip& clip, const FeatureConfig& config);

/// Per-coefficient mean over frames.
FeatureVector aggregate_features(const Matrix& frames);

/// Resample to config.sample_rate_hz -> trim(config.clip_seconds) -> MFCC ->
/// mean. This is the training-time path for a whole clip.
FeatureVector clip_features(const AudioClip& clip, const MfccExtractor& extractor);

}  // namespace birdsong
