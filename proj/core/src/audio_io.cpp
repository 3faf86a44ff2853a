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

#include "birdsong/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "birdsong/error.hpp"
#include "file_util.hpp"

namespace birdsong {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

bool supported_depth(int bits) {
  return bits == 8 || bits == 16 || bits == 24 || bits == 32;
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  bool tag_equals(const char* tag) const {
    return remaining() >= 4 && std::memcmp(bytes_.data() + pos_, tag, 4) == 0;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8) |
                      (bytes_[pos_ + 2] << 16) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorKind::kMalformedHeader, "truncated WAV header");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct FormatChunk {
  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits_per_sample = 0;
};

FormatChunk parse_fmt(ByteReader& reader, std::uint32_t size) {
  if (size < 16) throw Error(ErrorKind::kMalformedHeader, "fmt chunk too short");
  FormatChunk fmt;
  fmt.format_tag = reader.u16();
  fmt.channels = reader.u16();
  fmt.sample_rate = reader.u32();
  reader.u32();  // byte rate
  fmt.block_align = reader.u16();
  fmt.bits_per_sample = reader.u16();
  std::uint32_t consumed = 16;
  if (fmt.format_tag == kFormatExtensible) {
    if (size < 40) throw Error(ErrorKind::kMalformedHeader, "extensible fmt chunk too short");
    reader.u16();  // cbSize
    reader.u16();  // valid bits
    reader.u32();  // channel mask
    std::uint16_t sub_format = reader.u16();
    reader.skip(14);  // remainder of the sub-format GUID
    consumed = 40;
    fmt.format_tag = sub_format;
  }
  reader.skip(size - consumed + (size & 1u));
  return fmt;
}

std::int32_t read_sample(const std::uint8_t* p, int bits) {
  switch (bits) {
    case 8:
      return static_cast<std::int32_t>(p[0]) - 128;
    case 16:
      return static_cast<std::int16_t>(p[0] | (p[1] << 8));
    case 24: {
      std::uint32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000u) v |= 0xFF000000u;
      return static_cast<std::int32_t>(v);
    }
    default: {
      std::uint32_t v = p[0] | (p[1] << 8) | (p[2] << 16) |
                        (static_cast<std::uint32_t>(p[3]) << 24);
      return static_cast<std::int32_t>(v);
    }
  }
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

RawAudio decode_wav(std::span<const std::uint8_t> bytes) {
  ByteReader reader(bytes);
  if (!reader.tag_equals("RIFF")) throw Error(ErrorKind::kMalformedHeader, "missing RIFF magic");
  reader.skip(4);
  reader.u32();  // riff size; often wrong in field recordings, not trusted
  if (!reader.tag_equals("WAVE")) throw Error(ErrorKind::kMalformedHeader, "missing WAVE tag");
  reader.skip(4);

  FormatChunk fmt;
  bool have_fmt = false;
  while (reader.remaining() >= 8) {
    bool is_fmt = reader.tag_equals("fmt ");
    bool is_data = reader.tag_equals("data");
    reader.skip(4);
    std::uint32_t size = reader.u32();
    if (is_fmt) {
      fmt = parse_fmt(reader, size);
      have_fmt = true;
      continue;
    }
    if (!is_data) {
      if (reader.remaining() < size) break;
      reader.skip(std::min<std::size_t>(size + (size & 1u), reader.remaining()));
      continue;
    }

    if (!have_fmt) throw Error(ErrorKind::kMalformedHeader, "data chunk before fmt chunk");
    if (fmt.format_tag == kFormatFloat)
      throw Error(ErrorKind::kUnsupportedEncoding, "floating-point WAV is not supported");
    if (fmt.format_tag != kFormatPcm)
      throw Error(ErrorKind::kUnsupportedEncoding,
                  "unsupported WAV format tag " + std::to_string(fmt.format_tag));
    if (!supported_depth(fmt.bits_per_sample))
      throw Error(ErrorKind::kUnsupportedBitDepth,
                  "unsupported bit depth " + std::to_string(fmt.bits_per_sample));
    if (fmt.channels == 0 || fmt.sample_rate == 0)
      throw Error(ErrorKind::kMalformedHeader, "zero channels or sample rate");
    const std::size_t bytes_per_sample = fmt.bits_per_sample / 8;
    const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
    if (fmt.block_align != frame_bytes)
      throw Error(ErrorKind::kMalformedHeader, "block alignment disagrees with channel layout");
    if (size == 0) throw Error(ErrorKind::kEmptyData, "data chunk is empty");
    if (size > reader.remaining())
      throw Error(ErrorKind::kTruncatedData,
                  "data chunk declares " + std::to_string(size) + " bytes but only " +
                      std::to_string(reader.remaining()) + " remain");
    if (size % frame_bytes != 0)
      throw Error(ErrorKind::kTruncatedData, "data chunk ends mid-frame");

    const std::size_t frames = size / frame_bytes;
    RawAudio raw;
    raw.bit_depth = fmt.bits_per_sample;
    raw.sample_rate_hz = static_cast<int>(fmt.sample_rate);
    raw.channels.assign(fmt.channels, std::vector<std::int32_t>(frames));
    const std::uint8_t* p = bytes.data() + reader.position();
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t c = 0; c < fmt.channels; ++c) {
        raw.channels[c][f] = read_sample(p, fmt.bits_per_sample);
        p += bytes_per_sample;
      }
    }
    return raw;
  }
  if (!have_fmt) throw Error(ErrorKind::kMalformedHeader, "no fmt chunk");
  throw Error(ErrorKind::kMalformedHeader, "no data chunk");
}

RawAudio read_wav_file(const std::filesystem::path& path) {
  auto bytes = detail::read_file_bytes(path);
  return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const RawAudio& raw) {
  if (!supported_depth(raw.bit_depth))
    throw Error(ErrorKind::kUnsupportedBitDepth,
                "unsupported bit depth " + std::to_string(raw.bit_depth));
  if (raw.channels.empty()) throw Error(ErrorKind::kInvalidArgument, "no channels to encode");
  if (raw.sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  const std::size_t frames = raw.frames();
  for (const auto& ch : raw.channels)
    if (ch.size() != frames) throw Error(ErrorKind::kLengthMismatch, "channel lengths differ");

  const std::size_t bytes_per_sample = static_cast<std::size_t>(raw.bit_depth) / 8;
  const auto n_channels = static_cast<std::uint16_t>(raw.channels.size());
  const auto block_align = static_cast<std::uint16_t>(bytes_per_sample * n_channels);
  const auto data_size = static_cast<std::uint32_t>(frames * block_align);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size + 1);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size + (data_size & 1u));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, n_channels);
  put_u32(out, static_cast<std::uint32_t>(raw.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(raw.sample_rate_hz) * block_align);
  put_u16(out, block_align);
  put_u16(out, static_cast<std::uint16_t>(raw.bit_depth));
  put_tag(out, "data");
  put_u32(out, data_size);
  for (std::size_t f = 0; f < frames; ++f) {
    for (const auto& ch : raw.channels) {
      std::int32_t v = ch[f];
      if (raw.bit_depth == 8) {
        out.push_back(static_cast<std::uint8_t>(v + 128));
        continue;
      }
      auto u = static_cast<std::uint32_t>(v);
      for (std::size_t b = 0; b < bytes_per_sample; ++b)
        out.push_back(static_cast<std::uint8_t>((u >> (8 * b)) & 0xFF));
    }
  }
  if (data_size & 1u) out.push_back(0);
  return out;
}

void write_wav_file(const std::filesystem::path& path, const RawAudio& raw) {
  detail::write_file_bytes(path, encode_wav(raw));
}

RawAudio quantize_pcm16(const AudioClip& clip) {
  RawAudio raw;
  raw.bit_depth = 16;
  raw.sample_rate_hz = clip.sample_rate_hz;
  raw.channels.emplace_back(clip.samples.size());
  auto& out = raw.channels.front();
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    double scaled = std::round(clip.samples[i] * 32768.0);
    out[i] = static_cast<std::int32_t>(std::clamp(scaled, -32768.0, 32767.0));
  }
  return raw;
}

std::vector<std::vector<double>> normalize(const RawAudio& raw) {
  if (!supported_depth(raw.bit_depth))
    throw Error(ErrorKind::kUnsupportedBitDepth,
                "unsupported bit depth " + std::to_string(raw.bit_depth));
  const double scale = std::ldexp(1.0, -(raw.bit_depth - 1));
  std::vector<std::vector<double>> out;
  out.reserve(raw.channels.size());
  for (const auto& ch : raw.channels) {
    auto& dst = out.emplace_back(ch.size());
    std::transform(ch.begin(), ch.end(), dst.begin(),
                   [scale](std::int32_t v) { return static_cast<double>(v) * scale; });
  }
  return out;
}

std::vector<double> to_mono(const std::vector<std::vector<double>>& channels) {
  if (channels.empty()) throw Error(ErrorKind::kInvalidArgument, "no channels to mix");
  const std::size_t n = channels.front().size();
  for (const auto& ch : channels)
    if (ch.size() != n) throw Error(ErrorKind::kLengthMismatch, "channel lengths differ");
  if (channels.size() == 1) return channels.front();

  std::vector<double> mono(n, 0.0);
  for (const auto& ch : channels)
    for (std::size_t i = 0; i < n; ++i) mono[i] += ch[i];
  const double inv = 1.0 / static_cast<double>(channels.size());
  for (double& v : mono) v *= inv;
  return mono;
}

AudioClip decode_clip(std::span<const std::uint8_t> bytes) {
  RawAudio raw = decode_wav(bytes);
  return {to_mono(normalize(raw)), raw.sample_rate_hz};
}

AudioClip load_clip(const std::filesystem::path& path) {
  auto bytes = detail::read_file_bytes(path);
  return decode_clip(bytes);
}

AudioClip resample(const AudioClip& clip, int target_rate_hz) {
  if (target_rate_hz <= 0)
    throw Error(ErrorKind::kInvalidArgument, "target sample rate must be positive");
  if (clip.sample_rate_hz <= 0)
    throw Error(ErrorKind::kInvalidArgument, "source sample rate must be positive");
  if (target_rate_hz == clip.sample_rate_hz) return clip;

  const std::size_t n_in = clip.samples.size();
  const auto n_out = static_cast<std::size_t>(std::llround(
      static_cast<double>(n_in) * target_rate_hz / clip.sample_rate_hz));
  AudioClip out{std::vector<double>(n_out), target_rate_hz};
  if (n_in == 0) return out;
  const double step = static_cast<double>(clip.sample_rate_hz) / target_rate_hz;
  for (std::size_t i = 0; i < n_out; ++i) {
    double pos = static_cast<double>(i) * step;
    auto left = static_cast<std::size_t>(pos);
    if (left >= n_in - 1) {
      out.samples[i] = clip.samples[n_in - 1];
      continue;
    }
    double frac = pos - static_cast<double>(left);
    out.samples[i] = clip.samples[left] + frac * (clip.samples[left + 1] - clip.samples[left]);
  }
  return out;
}

AudioClip trim(const AudioClip& clip, double max_seconds) {
  if (!(max_seconds > 0.0)) throw Error(ErrorKind::kInvalidArgument, "max_seconds must be positive");
  const auto limit = static_cast<std::size_t>(std::llround(max_seconds * clip.sample_rate_hz));
  if (clip.samples.size() <= limit) return clip;
  return {std::vector<double>(clip.samples.begin(),
                              clip.samples.begin() + static_cast<std::ptrdiff_t>(limit)),
          clip.sample_rate_hz};
}

std::vector<Segment> segment(const AudioClip& clip, double window_seconds,
                             double min_tail_seconds) {
  if (!(window_seconds > 0.0))
    throw Error(ErrorKind::kInvalidArgument, "window_seconds must be positive");
  const double rate = clip.sample_rate_hz;
  const auto window = static_cast<std::size_t>(std::llround(window_seconds * rate));
  const std::size_t n = clip.samples.size();

  std::vector<Segment> out;
  for (std::size_t start = 0; start < n; start += window) {
    const std::size_t len = std::min(window, n - start);
    if (len < window && static_cast<double>(len) / rate < min_tail_seconds) break;
    Segment seg;
    seg.index = out.size();
    seg.start_sample = start;
    seg.start_seconds = static_cast<double>(start) / rate;
    seg.end_seconds = static_cast<double>(start + len) / rate;
    auto first = clip.samples.begin() + static_cast<std::ptrdiff_t>(start);
    seg.clip = {std::vector<double>(first, first + static_cast<std::ptrdiff_t>(len)),
                clip.sample_rate_hz};
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace birdsong
