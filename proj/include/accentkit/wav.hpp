#pragma once

#include <string>
#include <vector>

#include "accentkit/prosody.hpp"

namespace accentkit {

struct WavReadInfo {
    int channels = 1;
    int source_sample_rate = 0;
    std::vector<std::string> warnings;
};

// PCM 16-bit or IEEE float 32-bit RIFF/WAVE; multichannel input is averaged
// to mono with a warning. Samples are clamped to [-1, 1].
WaveBuffer read_wav(const std::string& path, WavReadInfo* info = nullptr);

void write_wav_pcm16(const std::string& path, const WaveBuffer& wave);
void write_wav_float32(const std::string& path, const WaveBuffer& wave);

}  // namespace accentkit
