#include "accentkit/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace accentkit {

namespace {

uint32_t read_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void write_u32(std::ofstream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<char*>(b), 4);
}

void write_u16(std::ofstream& out, uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff)};
    out.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

WaveBuffer read_wav(const std::string& path, WavReadInfo* info) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw FileError(path + " is not a RIFF/WAVE file");
    }

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    const unsigned char* data = nullptr;
    size_t data_len = 0;

    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const uint32_t len = read_u32(bytes.data() + pos + 4);
        const size_t body = pos + 8;
        if (body + len > bytes.size()) break;
        if (std::memcmp(id, "fmt ", 4) == 0 && len >= 16) {
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            if (format == 0xFFFE && len >= 40) {
                // WAVE_FORMAT_EXTENSIBLE: first two bytes of the SubFormat
                // GUID carry the actual format tag.
                format = read_u16(bytes.data() + body + 24);
            }
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = len;
        }
        pos = body + len + (len & 1);  // chunks are word-aligned
    }

    if (channels == 0 || rate == 0) throw FileError(path + ": missing fmt chunk");
    if (!data) throw FileError(path + ": missing data chunk");

    const bool pcm16 = format == 1 && bits == 16;
    const bool float32 = format == 3 && bits == 32;
    if (!pcm16 && !float32) {
        throw FileError(path + ": unsupported format (need PCM16 or float32), got " +
                        "format=" + std::to_string(format) +
                        " bits=" + std::to_string(bits));
    }

    const size_t bytes_per_sample = bits / 8;
    const size_t n_frames = data_len / (bytes_per_sample * channels);
    if (n_frames == 0) throw FileError(path + ": no audio frames");

    WaveBuffer wave;
    wave.sample_rate = static_cast<int>(rate);
    wave.samples.resize(n_frames);
    for (size_t f = 0; f < n_frames; ++f) {
        double acc = 0.0;
        for (unsigned c = 0; c < channels; ++c) {
            const unsigned char* p = data + (f * channels + c) * bytes_per_sample;
            if (pcm16) {
                int16_t v;
                std::memcpy(&v, p, 2);
                acc += v / 32768.0;
            } else {
                float v;
                std::memcpy(&v, p, 4);
                acc += v;
            }
        }
        wave.samples[f] = std::clamp(acc / channels, -1.0, 1.0);
    }

    if (info) {
        info->channels = channels;
        info->source_sample_rate = static_cast<int>(rate);
        if (channels > 1) {
            info->warnings.push_back(path + ": averaged " +
                                     std::to_string(channels) +
                                     " channels to mono");
        }
    }
    return wave;
}

namespace {

void write_header(std::ofstream& out, const WaveBuffer& wave, uint16_t format,
                  uint16_t bits) {
    const uint32_t n = static_cast<uint32_t>(wave.samples.size());
    const uint32_t data_len = n * (bits / 8);
    out.write("RIFF", 4);
    write_u32(out, 36 + data_len);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, format);
    write_u16(out, 1);  // mono
    write_u32(out, static_cast<uint32_t>(wave.sample_rate));
    write_u32(out, static_cast<uint32_t>(wave.sample_rate) * (bits / 8));
    write_u16(out, bits / 8);
    write_u16(out, bits);
    out.write("data", 4);
    write_u32(out, data_len);
}

}  // namespace

void write_wav_pcm16(const std::string& path, const WaveBuffer& wave) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError("cannot write " + path);
    write_header(out, wave, 1, 16);
    for (double s : wave.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        const int16_t v = static_cast<int16_t>(
            std::lround(clamped * 32767.0));
        write_u16(out, static_cast<uint16_t>(v));
    }
}

void write_wav_float32(const std::string& path, const WaveBuffer& wave) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError("cannot write " + path);
    write_header(out, wave, 3, 32);
    for (double s : wave.samples) {
        const float v = static_cast<float>(s);
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        write_u32(out, bits);
    }
}

}  // namespace accentkit
