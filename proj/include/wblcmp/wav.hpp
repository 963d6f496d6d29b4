// wav.hpp -- minimal RIFF/WAVE reader and writer, 32-bit float PCM.
#pragma once

#include <string>

#include "wblcmp/stft.hpp"

namespace wblcmp {

struct WavData {
  double sample_rate = 0.0;
  Audio channels;  // one vector per channel
};

WavData read_wav(const std::string& path);

// Writes interleaved IEEE float32 samples.
void write_wav(const std::string& path, const Audio& channels, double sample_rate);

}  // namespace wblcmp
