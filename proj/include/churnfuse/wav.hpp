#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "churnfuse/audio_features.hpp"

namespace churnfuse::audio {

// 16-bit PCM mono RIFF/WAVE. Samples map to integers by round(x * 32767) and
// back by q / 32767, so a clip already on that grid survives a round trip
// bit-for-bit.
std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip);
AudioClip decode_wav_pcm16(std::span<const std::uint8_t> bytes);

// Snap every sample onto the 16-bit grid.
void quantize_pcm16(AudioClip& clip);

}  // namespace churnfuse::audio
