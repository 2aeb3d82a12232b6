#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace parafuzz {

class AudioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mono samples normalized to [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Throws AudioError unless sample_rate > 0 and every sample is finite.
void validate(const AudioClip& clip);

/// Reads RIFF/WAVE with 16-bit integer PCM or 32-bit IEEE float data, mono or
/// stereo. Stereo is downmixed by averaging; 16-bit values are scaled by
/// 1/32768.
AudioClip load_audio(const std::string& path);
AudioClip decode_wav(const std::vector<std::uint8_t>& bytes);

/// Writes 16-bit PCM mono. Samples are clamped to [-1, 1] and rounded.
void save_wav(const std::string& path, const AudioClip& clip);
std::vector<std::uint8_t> encode_wav(const AudioClip& clip);

/// Float32 mono writer; used where quantization would disturb a measurement.
std::vector<std::uint8_t> encode_wav_float(const AudioClip& clip);

}  // namespace parafuzz
