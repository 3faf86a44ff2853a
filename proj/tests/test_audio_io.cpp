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

#include <random>

#include "birdsong/audio_io.hpp"
#include "birdsong/error.hpp"
#include "test_util.hpp"

namespace birdsong {
namespace {

using testing::pcm16_le;
using testing::wav_bytes;

ErrorKind kind_of(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_wav(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode_wav accepted invalid input";
  return ErrorKind::kInvalidArgument;
}

AudioClip make_clip(std::size_t n, int rate, double value = 0.0) {
  return AudioClip{std::vector<double>(n, value), rate};
}

TEST(DecodeWav, Mono16Bit441Samples) {
  std::vector<std::int16_t> pcm(441);
  for (std::size_t i = 0; i < pcm.size(); ++i) pcm[i] = static_cast<std::int16_t>(i * 37 - 8000);
  RawAudio raw = decode_wav(wav_bytes(1, 44100, 16, pcm16_le(pcm)));
  ASSERT_EQ(raw.channels.size(), 1u);
  EXPECT_EQ(raw.frames(), 441u);
  EXPECT_EQ(raw.sample_rate_hz, 44100);
  EXPECT_EQ(raw.bit_depth, 16);
  for (std::size_t i = 0; i < pcm.size(); ++i) EXPECT_EQ(raw.channels[0][i], pcm[i]);
}

TEST(DecodeWav, StereoDeinterleaves) {
  RawAudio raw = decode_wav(wav_bytes(2, 8000, 16, pcm16_le({1, -1, 2, -2, 3, -3})));
  ASSERT_EQ(raw.channels.size(), 2u);
  EXPECT_EQ(raw.channels[0], (std::vector<std::int32_t>{1, 2, 3}));
  EXPECT_EQ(raw.channels[1], (std::vector<std::int32_t>{-1, -2, -3}));
}

TEST(DecodeWav, EightAndTwentyFourBit) {
  // 8-bit WAV is unsigned with a 128 offset.
  RawAudio r8 = decode_wav(wav_bytes(1, 8000, 8, {0, 128, 255}));
  EXPECT_EQ(r8.channels[0], (std::vector<std::int32_t>{-128, 0, 127}));
  RawAudio r24 = decode_wav(wav_bytes(1, 8000, 24, {0x00, 0x00, 0x80, 0xff, 0xff, 0x7f}));
  EXPECT_EQ(r24.channels[0], (std::vector<std::int32_t>{-8388608, 8388607}));
}

TEST(DecodeWav, ErrorsAreDistinct) {
  auto good = wav_bytes(1, 8000, 16, pcm16_le({1, 2, 3, 4}));

  auto bad_magic = good;
  std::copy_n("XXXX", 4, bad_magic.begin());
  EXPECT_EQ(kind_of(bad_magic), ErrorKind::kMalformedHeader);

  EXPECT_EQ(kind_of({good.begin(), good.begin() + 20}), ErrorKind::kMalformedHeader);
  EXPECT_EQ(kind_of(wav_bytes(1, 8000, 32, pcm16_le({0, 0}), 3)), ErrorKind::kUnsupportedEncoding);
  EXPECT_EQ(kind_of(wav_bytes(1, 8000, 16, {}, 1)), ErrorKind::kEmptyData);
  EXPECT_EQ(kind_of({good.begin(), good.end() - 3}), ErrorKind::kTruncatedData);
  EXPECT_EQ(kind_of(wav_bytes(1, 8000, 12, pcm16_le({0, 0}))), ErrorKind::kUnsupportedBitDepth);

  std::mt19937 rng(3);
  std::vector<std::uint8_t> noise(256);
  for (auto& b : noise) b = static_cast<std::uint8_t>(rng());
  EXPECT_EQ(kind_of(noise), ErrorKind::kMalformedHeader);
}

TEST(DecodeWav, SkipsUnknownChunks) {
  auto bytes = wav_bytes(1, 8000, 16, pcm16_le({7, 8}));
  // Insert an odd-sized LIST chunk (with its pad byte) before "data".
  const std::vector<std::uint8_t> list = {'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  bytes.insert(bytes.begin() + 36, list.begin(), list.end());
  EXPECT_EQ(decode_wav(bytes).channels[0], (std::vector<std::int32_t>{7, 8}));
}

TEST(EncodeWav, RoundTripsEveryDepth) {
  for (int bits : {8, 16, 24, 32}) {
    const std::int32_t hi = static_cast<std::int32_t>((std::int64_t{1} << (bits - 1)) - 1);
    const std::int32_t lo = static_cast<std::int32_t>(-(std::int64_t{1} << (bits - 1)));
    RawAudio raw{{{lo, 0, hi, 1}, {hi, -1, lo, 0}}, bits, 22050};
    RawAudio back = decode_wav(encode_wav(raw));
    EXPECT_EQ(back.channels, raw.channels) << bits;
    EXPECT_EQ(back.bit_depth, bits);
    EXPECT_EQ(back.sample_rate_hz, 22050);
  }
}

TEST(Normalize, DividesByHalfRange) {
  RawAudio raw{{{21707, 0, -32768, -24440}}, 16, 44100};
  auto out = normalize(raw);
  EXPECT_NEAR(out[0][0], 0.66244507, 1e-8);
  EXPECT_EQ(out[0][1], 0.0);
  EXPECT_EQ(out[0][2], -1.0);
  EXPECT_NEAR(out[0][3], -0.745850, 1e-6);
}

TEST(Normalize, RejectsUnsupportedDepth) {
  RawAudio raw{{{1}}, 12, 44100};
  EXPECT_THROW(normalize(raw), Error);
}

TEST(Normalize, RandomPcmStaysInRange) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> dist(-32768, 32767);
  std::vector<std::int16_t> pcm(4096);
  for (auto& s : pcm) s = static_cast<std::int16_t>(dist(rng));
  auto chans = normalize(decode_wav(wav_bytes(2, 16000, 16, pcm16_le(pcm))));
  for (const auto& ch : chans)
    for (double v : ch) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
}

TEST(ToMono, Averages) {
  EXPECT_EQ(to_mono({{1.0}, {0.0}}), std::vector<double>{0.5});
  EXPECT_EQ(to_mono({{0.25, -0.5}, {0.25, -0.5}}), (std::vector<double>{0.25, -0.5}));
  const std::vector<double> mono{0.2, -0.3};
  EXPECT_EQ(to_mono({mono}), mono);
  EXPECT_EQ(to_mono({to_mono({mono})}), mono);
}

TEST(ToMono, Errors) {
  EXPECT_THROW(to_mono({}), Error);
  try {
    to_mono({{1.0, 2.0}, {1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLengthMismatch);
  }
}

TEST(Resample, IdentityIsBitExact) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AudioClip clip = make_clip(1000, 44100);
  for (auto& s : clip.samples) s = u(rng);
  AudioClip out = resample(clip, 44100);
  EXPECT_EQ(out.samples, clip.samples);
  EXPECT_EQ(out.sample_rate_hz, 44100);
}

TEST(Resample, LengthAndConstant) {
  AudioClip down = resample(make_clip(1000, 2000, 0.5), 1000);
  EXPECT_NEAR(static_cast<double>(down.samples.size()), 500.0, 1.0);
  EXPECT_EQ(down.sample_rate_hz, 1000);
  for (double s : down.samples) EXPECT_DOUBLE_EQ(s, 0.5);

  AudioClip up = resample(make_clip(441, 44100, 0.5), 48000);
  EXPECT_EQ(up.samples.size(), 480u);
  for (double s : up.samples) EXPECT_DOUBLE_EQ(s, 0.5);
}

TEST(Resample, LinearRampStaysLinear) {
  AudioClip ramp = make_clip(100, 100);
  for (std::size_t i = 0; i < 100; ++i) ramp.samples[i] = static_cast<double>(i) / 100.0;
  AudioClip up = resample(ramp, 300);
  // Interior points sit on the same line: x(t) = t seconds.
  for (std::size_t i = 0; i + 3 < up.samples.size(); ++i)
    EXPECT_NEAR(up.samples[i], static_cast<double>(i) / 300.0, 1e-12);
}

TEST(Resample, RejectsBadRate) {
  EXPECT_THROW(resample(make_clip(10, 100), 0), Error);
  EXPECT_THROW(resample(make_clip(10, 100), -5), Error);
}

TEST(Trim, KeepsFirstFifteenSeconds) {
  const int rate = 1000;
  AudioClip clip = make_clip(30 * rate, rate);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) clip.samples[i] = static_cast<double>(i);
  AudioClip out = trim(clip);
  ASSERT_EQ(out.samples.size(), 15u * rate);
  EXPECT_EQ(out.samples.back(), 15.0 * rate - 1);
  EXPECT_EQ(trim(make_clip(10 * rate, rate)).samples.size(), 10u * rate);
  EXPECT_EQ(trim(make_clip(15 * rate, rate)).samples.size(), 15u * rate);
}

TEST(Segment, WindowCountsAndTailRule) {
  const int rate = 100;
  EXPECT_EQ(segment(make_clip(180 * rate, rate)).size(), 12u);

  auto twenty = segment(make_clip(20 * rate, rate));
  ASSERT_EQ(twenty.size(), 2u);
  EXPECT_DOUBLE_EQ(twenty[1].clip.duration_seconds(), 5.0);
  EXPECT_DOUBLE_EQ(twenty[1].start_seconds, 15.0);
  EXPECT_DOUBLE_EQ(twenty[1].end_seconds, 20.0);

  auto sixteen = segment(make_clip(16 * rate, rate));
  ASSERT_EQ(sixteen.size(), 1u);
  EXPECT_DOUBLE_EQ(sixteen[0].clip.duration_seconds(), 15.0);

  EXPECT_TRUE(segment(make_clip(2 * rate, rate)).empty());
  EXPECT_EQ(segment(make_clip(3 * rate, rate)).size(), 1u);
}

TEST(Segment, ConcatenationReconstructsInput) {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> len_dist(1, 5000);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    AudioClip clip = make_clip(static_cast<std::size_t>(len_dist(rng)), 100);
    for (auto& s : clip.samples) s = u(rng);
    auto segs = segment(clip, 7.0, 2.0);
    std::vector<double> joined;
    std::size_t expected_start = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      EXPECT_EQ(segs[i].index, i);
      EXPECT_EQ(segs[i].start_sample, expected_start);
      expected_start += segs[i].clip.samples.size();
      joined.insert(joined.end(), segs[i].clip.samples.begin(), segs[i].clip.samples.end());
    }
    ASSERT_LE(joined.size(), clip.samples.size());
    // The dropped tail is shorter than the minimum.
    EXPECT_LT(clip.samples.size() - joined.size(), 200u);
    EXPECT_TRUE(std::equal(joined.begin(), joined.end(), clip.samples.begin()));
  }
}

TEST(AudioFile, WriteReadRoundTrip) {
  testing::TempDir dir;
  RawAudio raw{{{100, -200, 300}}, 16, 16000};
  write_wav_file(dir / "a.wav", raw);
  EXPECT_EQ(read_wav_file(dir / "a.wav").channels, raw.channels);
  AudioClip clip = load_clip(dir / "a.wav");
  EXPECT_EQ(clip.sample_rate_hz, 16000);
  EXPECT_DOUBLE_EQ(clip.samples[1], -200.0 / 32768.0);
  EXPECT_THROW(load_clip(dir / "missing.wav"), Error);
}

TEST(AudioFile, QuantizeRoundTripsWithinOneStep) {
  AudioClip clip{{0.0, 0.5, -0.5, 0.999, -1.0, 0.123456}, 8000};
  AudioClip back = decode_clip(encode_wav(quantize_pcm16(clip)));
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    EXPECT_NEAR(back.samples[i], clip.samples[i], 1.0 / 32768.0);
}

}  // namespace
}  // namespace birdsong
