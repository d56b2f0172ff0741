#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "accentkit/utterance.hpp"

namespace accentkit {

struct WaveBuffer {
    std::vector<double> samples;  // [-1, 1]
    int sample_rate = 22050;
};

struct MelConfig {
    int n_mels = 80;
    int fft_size = 1024;
    int hop = 256;
    double fmin = 0.0;
    double fmax = 8000.0;

    void validate(int sample_rate) const;  // ConfigError
};

struct PitchConfig {
    double f0_min = 60.0;
    double f0_max = 400.0;
    double window_sec = 0.025;
    double voicing_threshold = 0.30;  // on the NCC peak
};

// ln(150): contour value used when a track has no voiced frames at all.
double default_log_f0();

// Frame-level contours on the STFT grid: frame count = floor(len/hop) + 1
// with reflection padding of fft_size/2 on each side.
struct FrameTrack {
    std::vector<std::optional<double>> log_f0;  // nullopt = unvoiced frame
    std::vector<double> energy;

    size_t n_frames() const { return energy.size(); }
    void validate() const;
};

size_t frame_count(size_t n_samples, int hop);

// L2 norm of the linear-magnitude mel vector, one value per frame.
std::vector<double> mel_energy(const WaveBuffer& wave, const MelConfig& cfg);

// Normalized cross-correlation tracker on the same frame grid; voiced frames
// carry natural-log F0 within [f0_min, f0_max], smoothed by a 3-point median
// over the voiced values. Degenerate audio yields all-unvoiced.
std::vector<std::optional<double>> track_pitch(const WaveBuffer& wave,
                                               const MelConfig& cfg,
                                               const PitchConfig& pitch = {});

FrameTrack make_frame_track(const WaveBuffer& wave, const MelConfig& cfg,
                            const PitchConfig& pitch = {});

// Unvoiced gaps linearly interpolated between voiced neighbors; leading and
// trailing gaps take the nearest voiced value; an all-unvoiced track takes
// the fallback value.
FrameTrack interpolate_unvoiced(const FrameTrack& track,
                                double fallback_log_f0 = default_log_f0());

struct PhoneInterval {
    std::optional<PhonemeSymbol> phoneme;  // nullopt = silence
    double start_sec = 0.0;
    double end_sec = 0.0;
    std::string label;

    bool is_silence() const { return !phoneme.has_value(); }
};
using PhoneIntervals = std::vector<PhoneInterval>;

// start < end per entry, sorted, non-overlapping, non-negative.
void validate_intervals(const PhoneIntervals& intervals);

// Aggregates contours to phoneme level. Boundary times are rounded to the
// frame grid (round(t * sample_rate / hop)) and differenced, clamped to a
// 1-frame minimum; pitch is averaged over the interpolated contour, energy
// over raw frame energies. Silence intervals are dropped.
AlignedUtterance aggregate(const FrameTrack& track, const PhoneIntervals& intervals,
                           const MelConfig& cfg, int sample_rate,
                           double fallback_log_f0 = default_log_f0());

struct SpeakerStats {
    double pitch_mean = 0.0;
    double pitch_std = 0.0;   // population
    double energy_mean = 0.0;
    double energy_std = 0.0;  // population
    int n_utterances_used = 0;
    bool pitch_fallback = false;  // set when the sample had no voiced frames
};

// Samples m utterances without replacement, pools voiced log-F0 values for
// pitch stats and all frame energies for energy stats. Deterministic for a
// fixed (tracks, m, seed).
SpeakerStats sample_speaker_stats(const std::vector<FrameTrack>& tracks, size_t m,
                                  uint64_t seed);

// z-scoring of pitch and energy with a 1e-8 floor on the std; durations
// unchanged. denormalize inverts normalize.
AlignedUtterance normalize(const AlignedUtterance& u, const SpeakerStats& stats);
AlignedUtterance denormalize(const AlignedUtterance& u, const SpeakerStats& stats);

// Stats cache: one "speaker<TAB>key=value ..." record per line.
void write_stats_file(const std::string& path,
                      const std::map<std::string, SpeakerStats>& by_speaker);
std::map<std::string, SpeakerStats> read_stats_file(const std::string& path);

// Linear resampling; used to ingest reference audio recorded at other rates.
WaveBuffer resample_linear(const WaveBuffer& wave, int target_rate);

}  // namespace accentkit
