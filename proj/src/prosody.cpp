#include "accentkit/prosody.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "accentkit/dsp.hpp"
#include "accentkit/rng.hpp"

namespace accentkit {

double default_log_f0() { return std::log(150.0); }

void MelConfig::validate(int sample_rate) const {
    if (n_mels < 1 || fft_size < 2 || hop < 1) {
        throw ConfigError("mel configuration values must be positive");
    }
    if ((fft_size & (fft_size - 1)) != 0) {
        throw ConfigError("fft_size must be a power of two");
    }
    if (hop > fft_size) throw ConfigError("hop exceeds fft_size");
    if (fmax > sample_rate / 2.0) {
        throw ConfigError("fmax " + std::to_string(fmax) + " exceeds Nyquist of " +
                          std::to_string(sample_rate) + " Hz audio");
    }
    if (fmin < 0 || fmin >= fmax) throw ConfigError("bad mel frequency range");
}

void FrameTrack::validate() const {
    if (log_f0.size() != energy.size()) {
        throw AlignmentError("frame track pitch/energy lengths disagree");
    }
}

size_t frame_count(size_t n_samples, int hop) {
    return n_samples / static_cast<size_t>(hop) + 1;
}

namespace {

// Reflection both ways without duplicating the edge sample.
double reflect_sample(const std::vector<double>& x, long idx) {
    const long n = static_cast<long>(x.size());
    if (n == 1) return x[0];
    while (idx < 0 || idx >= n) {
        if (idx < 0) idx = -idx;
        if (idx >= n) idx = 2 * n - 2 - idx;
    }
    return x[static_cast<size_t>(idx)];
}

void check_wave(const WaveBuffer& wave) {
    if (wave.samples.empty()) throw InvariantViolation("empty waveform");
    if (wave.sample_rate <= 0) throw InvariantViolation("non-positive sample rate");
}

}  // namespace

std::vector<double> mel_energy(const WaveBuffer& wave, const MelConfig& cfg) {
    check_wave(wave);
    cfg.validate(wave.sample_rate);

    const size_t n_frames = frame_count(wave.samples.size(), cfg.hop);
    const int pad = cfg.fft_size / 2;
    const auto window = hann_window(cfg.fft_size);
    const auto fb = mel_filterbank(cfg.n_mels, cfg.fft_size, wave.sample_rate,
                                   cfg.fmin, cfg.fmax);
    const int n_bins = cfg.fft_size / 2 + 1;

    std::vector<double> energies(n_frames);
    std::vector<std::complex<double>> buf(cfg.fft_size);
    std::vector<double> mag(n_bins);
    for (size_t i = 0; i < n_frames; ++i) {
        const long start = static_cast<long>(i) * cfg.hop - pad;
        for (int k = 0; k < cfg.fft_size; ++k) {
            buf[k] = reflect_sample(wave.samples, start + k) * window[k];
        }
        fft(buf);
        for (int k = 0; k < n_bins; ++k) mag[k] = std::abs(buf[k]);
        double sumsq = 0.0;
        for (int m = 0; m < cfg.n_mels; ++m) {
            double v = 0.0;
            const auto& row = fb[m];
            for (int k = 0; k < n_bins; ++k) v += row[k] * mag[k];
            sumsq += v * v;
        }
        energies[i] = std::sqrt(sumsq);
    }
    return energies;
}

namespace {

// 3-point median over the voiced values only, in frame order.
void median_smooth_voiced(std::vector<std::optional<double>>& track) {
    std::vector<size_t> voiced;
    for (size_t i = 0; i < track.size(); ++i) {
        if (track[i]) voiced.push_back(i);
    }
    if (voiced.size() < 3) return;
    std::vector<double> smoothed(voiced.size());
    smoothed.front() = *track[voiced.front()];
    smoothed.back() = *track[voiced.back()];
    for (size_t k = 1; k + 1 < voiced.size(); ++k) {
        double a = *track[voiced[k - 1]];
        double b = *track[voiced[k]];
        double c = *track[voiced[k + 1]];
        smoothed[k] = std::max(std::min(a, b), std::min(std::max(a, b), c));
    }
    for (size_t k = 0; k < voiced.size(); ++k) track[voiced[k]] = smoothed[k];
}

}  // namespace

std::vector<std::optional<double>> track_pitch(const WaveBuffer& wave,
                                               const MelConfig& cfg,
                                               const PitchConfig& pitch) {
    check_wave(wave);
    cfg.validate(wave.sample_rate);
    const double sr = wave.sample_rate;
    const size_t n_frames = frame_count(wave.samples.size(), cfg.hop);

    const int win = std::max(8, static_cast<int>(std::lround(pitch.window_sec * sr)));
    const int lag_min = std::max(2, static_cast<int>(std::ceil(sr / pitch.f0_max)));
    const int lag_max = static_cast<int>(std::floor(sr / pitch.f0_min));
    std::vector<std::optional<double>> out(n_frames);
    if (lag_min >= lag_max) return out;

    // One reflection-padded copy so every frame window and lag is in range.
    const int front = win / 2 + 1;
    const int back = win + lag_max + 1;
    const long n = static_cast<long>(wave.samples.size());
    std::vector<double> x(static_cast<size_t>(n + front + back));
    for (long i = 0; i < n + front + back; ++i) {
        x[static_cast<size_t>(i)] = reflect_sample(wave.samples, i - front);
    }

    // Prefix sums for per-segment mean and energy.
    const size_t xn = x.size();
    std::vector<double> s1(xn + 1, 0.0), s2(xn + 1, 0.0);
    for (size_t i = 0; i < xn; ++i) {
        s1[i + 1] = s1[i] + x[i];
        s2[i + 1] = s2[i] + x[i] * x[i];
    }
    auto seg_mean = [&](size_t b) { return (s1[b + win] - s1[b]) / win; };
    auto seg_power = [&](size_t b) {
        const double mu = seg_mean(b);
        return std::max(0.0, (s2[b + win] - s2[b]) - win * mu * mu);
    };

    const int n_lags = lag_max - lag_min + 1;
    std::vector<double> ncc(n_lags);
    for (size_t f = 0; f < n_frames; ++f) {
        const size_t a = static_cast<size_t>(static_cast<long>(f) * cfg.hop -
                                             win / 2 + front);
        const double mean_a = seg_mean(a);
        const double pow_a = seg_power(a);
        if (pow_a < 1e-14) continue;  // silent window

        double best = -2.0;
        for (int l = 0; l < n_lags; ++l) {
            const size_t b = a + static_cast<size_t>(lag_min + l);
            const double pow_b = seg_power(b);
            if (pow_b < 1e-14) {
                ncc[l] = 0.0;
                continue;
            }
            double dot = 0.0;
            for (int k = 0; k < win; ++k) dot += x[a + k] * x[b + k];
            const double cov = dot - win * mean_a * seg_mean(b);
            ncc[l] = cov / std::sqrt(pow_a * pow_b);
            best = std::max(best, ncc[l]);
        }
        if (best < pitch.voicing_threshold) continue;

        // Smallest lag whose local peak is within 5% of the global maximum,
        // so a periodic signal resolves to its fundamental rather than a
        // subharmonic.
        int peak = -1;
        for (int l = 0; l < n_lags; ++l) {
            const bool local_max = (l == 0 || ncc[l] >= ncc[l - 1]) &&
                                   (l == n_lags - 1 || ncc[l] >= ncc[l + 1]);
            if (local_max && ncc[l] >= 0.95 * best) {
                peak = l;
                break;
            }
        }
        if (peak < 0) continue;

        double lag = lag_min + peak;
        if (peak > 0 && peak < n_lags - 1) {
            const double y1 = ncc[peak - 1], y2 = ncc[peak], y3 = ncc[peak + 1];
            const double denom = y1 - 2.0 * y2 + y3;
            if (std::fabs(denom) > 1e-12) {
                double delta = 0.5 * (y1 - y3) / denom;
                delta = std::clamp(delta, -0.5, 0.5);
                lag += delta;
            }
        }
        const double f0 = std::clamp(sr / lag, pitch.f0_min, pitch.f0_max);
        out[f] = std::log(f0);
    }

    median_smooth_voiced(out);
    return out;
}

FrameTrack make_frame_track(const WaveBuffer& wave, const MelConfig& cfg,
                            const PitchConfig& pitch) {
    FrameTrack t;
    t.log_f0 = track_pitch(wave, cfg, pitch);
    t.energy = mel_energy(wave, cfg);
    return t;
}

FrameTrack interpolate_unvoiced(const FrameTrack& track, double fallback_log_f0) {
    track.validate();
    FrameTrack out = track;
    const size_t n = out.log_f0.size();

    std::vector<size_t> voiced;
    for (size_t i = 0; i < n; ++i) {
        if (out.log_f0[i]) voiced.push_back(i);
    }
    if (voiced.empty()) {
        for (auto& v : out.log_f0) v = fallback_log_f0;
        return out;
    }
    for (size_t i = 0; i < voiced.front(); ++i) out.log_f0[i] = out.log_f0[voiced.front()];
    for (size_t i = voiced.back() + 1; i < n; ++i) out.log_f0[i] = out.log_f0[voiced.back()];
    for (size_t k = 0; k + 1 < voiced.size(); ++k) {
        const size_t a = voiced[k], b = voiced[k + 1];
        const double va = *out.log_f0[a], vb = *out.log_f0[b];
        for (size_t i = a + 1; i < b; ++i) {
            const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
            out.log_f0[i] = va + t * (vb - va);
        }
    }
    return out;
}

void validate_intervals(const PhoneIntervals& intervals) {
    double prev_end = 0.0;
    for (size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        if (iv.start_sec < 0 || iv.end_sec <= iv.start_sec) {
            throw InvariantViolation("interval " + std::to_string(i) +
                                     " has non-positive extent");
        }
        if (i > 0 && iv.start_sec < prev_end - 1e-9) {
            throw InvariantViolation("interval " + std::to_string(i) +
                                     " overlaps its predecessor");
        }
        prev_end = iv.end_sec;
    }
}

AlignedUtterance aggregate(const FrameTrack& track, const PhoneIntervals& intervals,
                           const MelConfig& cfg, int sample_rate,
                           double fallback_log_f0) {
    track.validate();
    validate_intervals(intervals);
    const FrameTrack interp = interpolate_unvoiced(track, fallback_log_f0);
    const size_t n_frames = track.n_frames();
    const double frames_per_sec = static_cast<double>(sample_rate) / cfg.hop;
    auto frame_index = [&](double t) {
        return static_cast<long>(std::lround(t * frames_per_sec));
    };

    AlignedUtterance u;
    for (const auto& iv : intervals) {
        if (iv.is_silence()) continue;
        const long s = frame_index(iv.start_sec);
        const long e = std::max(frame_index(iv.end_sec), s + 1);
        if (e > static_cast<long>(n_frames)) {
            throw CoverageError("interval [" + std::to_string(iv.start_sec) + ", " +
                                std::to_string(iv.end_sec) + "] needs frame " +
                                std::to_string(e) + " of " + std::to_string(n_frames));
        }
        double p = 0.0, en = 0.0;
        for (long k = s; k < e; ++k) {
            p += interp.log_f0[static_cast<size_t>(k)].value();
            en += track.energy[static_cast<size_t>(k)];
        }
        const double width = static_cast<double>(e - s);
        u.phonemes.push_back(*iv.phoneme);
        u.durations.push_back(static_cast<int>(e - s));
        u.pitch.push_back(p / width);
        u.energy.push_back(en / width);
    }
    u.validate();
    return u;
}

SpeakerStats sample_speaker_stats(const std::vector<FrameTrack>& tracks, size_t m,
                                  uint64_t seed) {
    if (m < 1 || m > tracks.size()) {
        throw EmptyPoolError("requested " + std::to_string(m) + " of " +
                             std::to_string(tracks.size()) + " utterances");
    }
    Rng rng(SeedMixer().mix("speaker_stats").mix(seed).value());
    const auto chosen = rng.sample_indices(tracks.size(), m);

    std::vector<double> pitches, energies;
    for (size_t idx : chosen) {
        const FrameTrack& t = tracks[idx];
        t.validate();
        for (const auto& v : t.log_f0) {
            if (v) pitches.push_back(*v);
        }
        energies.insert(energies.end(), t.energy.begin(), t.energy.end());
    }
    if (energies.empty()) throw EmptyPoolError("sampled utterances have no frames");

    auto mean_std = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        return std::pair<double, double>(mean, std::sqrt(ss / xs.size()));
    };

    SpeakerStats stats;
    stats.n_utterances_used = static_cast<int>(m);
    if (pitches.empty()) {
        stats.pitch_mean = default_log_f0();
        stats.pitch_std = 0.0;
        stats.pitch_fallback = true;
    } else {
        std::tie(stats.pitch_mean, stats.pitch_std) = mean_std(pitches);
    }
    std::tie(stats.energy_mean, stats.energy_std) = mean_std(energies);
    return stats;
}

namespace {
constexpr double kStdFloor = 1e-8;
}

AlignedUtterance normalize(const AlignedUtterance& u, const SpeakerStats& stats) {
    if (stats.pitch_std < 0 || stats.energy_std < 0) {
        throw InvariantViolation("negative std in speaker stats");
    }
    AlignedUtterance out = u;
    const double ps = std::max(stats.pitch_std, kStdFloor);
    const double es = std::max(stats.energy_std, kStdFloor);
    for (auto& p : out.pitch) p = (p - stats.pitch_mean) / ps;
    for (auto& e : out.energy) e = (e - stats.energy_mean) / es;
    return out;
}

AlignedUtterance denormalize(const AlignedUtterance& u, const SpeakerStats& stats) {
    AlignedUtterance out = u;
    const double ps = std::max(stats.pitch_std, kStdFloor);
    const double es = std::max(stats.energy_std, kStdFloor);
    for (auto& p : out.pitch) p = p * ps + stats.pitch_mean;
    for (auto& e : out.energy) e = e * es + stats.energy_mean;
    return out;
}

namespace {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_stats_file(const std::string& path,
                      const std::map<std::string, SpeakerStats>& by_speaker) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    for (const auto& [speaker, s] : by_speaker) {
        out << speaker << '\t' << "pitch_mean=" << format_g17(s.pitch_mean)
            << " pitch_std=" << format_g17(s.pitch_std)
            << " energy_mean=" << format_g17(s.energy_mean)
            << " energy_std=" << format_g17(s.energy_std)
            << " n=" << s.n_utterances_used
            << " pitch_fallback=" << (s.pitch_fallback ? 1 : 0) << '\n';
    }
}

std::map<std::string, SpeakerStats> read_stats_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::map<std::string, SpeakerStats> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) throw SyntaxError("stats line missing TAB");
        const std::string speaker = line.substr(0, tab);
        SpeakerStats s;
        std::istringstream ls(line.substr(tab + 1));
        std::string kv;
        while (ls >> kv) {
            const size_t eq = kv.find('=');
            if (eq == std::string::npos) throw SyntaxError("bad stats field " + kv);
            const std::string key = kv.substr(0, eq);
            const std::string val = kv.substr(eq + 1);
            if (key == "pitch_mean") s.pitch_mean = std::stod(val);
            else if (key == "pitch_std") s.pitch_std = std::stod(val);
            else if (key == "energy_mean") s.energy_mean = std::stod(val);
            else if (key == "energy_std") s.energy_std = std::stod(val);
            else if (key == "n") s.n_utterances_used = std::stoi(val);
            else if (key == "pitch_fallback") s.pitch_fallback = val == "1";
            else throw SyntaxError("unknown stats key " + key);
        }
        out[speaker] = s;
    }
    return out;
}

WaveBuffer resample_linear(const WaveBuffer& wave, int target_rate) {
    check_wave(wave);
    if (target_rate <= 0) throw ConfigError("bad target sample rate");
    if (target_rate == wave.sample_rate) return wave;

    const double ratio = static_cast<double>(wave.sample_rate) / target_rate;
    const size_t out_len = std::max<size_t>(
        1, static_cast<size_t>(std::llround(wave.samples.size() / ratio)));
    WaveBuffer out;
    out.sample_rate = target_rate;
    out.samples.resize(out_len);
    const size_t last = wave.samples.size() - 1;
    for (size_t i = 0; i < out_len; ++i) {
        const double pos = i * ratio;
        const size_t lo = std::min(static_cast<size_t>(pos), last);
        const size_t hi = std::min(lo + 1, last);
        const double frac = pos - static_cast<double>(lo);
        out.samples[i] = wave.samples[lo] * (1.0 - frac) + wave.samples[hi] * frac;
    }
    return out;
}

}  // namespace accentkit
