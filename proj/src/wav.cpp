#include "churnfuse/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "churnfuse/binary_io.hpp"
#include "churnfuse/error.hpp"

namespace churnfuse::audio {

namespace {

std::int16_t to_pcm(float x) {
  const double clamped = std::clamp(static_cast<double>(x), -1.0, 1.0);
  return static_cast<std::int16_t>(std::lround(clamped * 32767.0));
}

float from_pcm(std::int16_t q) { return static_cast<float>(static_cast<double>(q) / 32767.0); }

std::uint32_t le32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

std::uint16_t le16(const std::uint8_t* p) {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

}  // namespace

void quantize_pcm16(AudioClip& clip) {
  for (float& s : clip.samples) s = from_pcm(to_pcm(s));
}

std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip) {
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  ByteWriter w;
  w.magic("RIFF");
  w.u32(36 + data_bytes);
  w.magic("WAVE");
  w.magic("fmt ");
  w.u32(16);
  w.u16(1);  // PCM
  w.u16(1);  // mono
  w.u32(rate);
  w.u32(rate * 2);
  w.u16(2);
  w.u16(16);
  w.magic("data");
  w.u32(data_bytes);
  for (float s : clip.samples) w.u16(static_cast<std::uint16_t>(to_pcm(s)));
  return w.take();
}

AudioClip decode_wav_pcm16(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::BadFormat, "not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  AudioClip clip;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    if (pos + 8 + size > bytes.size()) throw Error(ErrorCode::BadFormat, "truncated WAVE chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw Error(ErrorCode::BadFormat, "short fmt chunk");
      const std::uint16_t format = le16(chunk + 8);
      const std::uint16_t channels = le16(chunk + 10);
      const std::uint16_t bits = le16(chunk + 22);
      if (format != 1 || channels != 1 || bits != 16) {
        throw Error(ErrorCode::BadFormat, "only 16-bit PCM mono is supported");
      }
      clip.sample_rate = le32(chunk + 12);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorCode::BadFormat, "data chunk before fmt chunk");
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        clip.samples[i] = from_pcm(static_cast<std::int16_t>(le16(chunk + 8 + 2 * i)));
      }
      return clip;
    }
    pos += 8 + size + (size & 1U);
  }
  throw Error(ErrorCode::BadFormat, "WAVE file has no data chunk");
}

}  // namespace churnfuse::audio
