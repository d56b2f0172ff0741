#pragma once

#include <string>
#include <vector>

#include "accentkit/phoneme.hpp"

namespace accentkit {

// A phoneme sequence with per-phoneme duration (frames), pitch (natural-log
// F0) and energy, plus optional phoneme-counts-per-word. The four parallel
// vectors always have one entry per phoneme.
struct AlignedUtterance {
    std::vector<PhonemeSymbol> phonemes;
    std::vector<int> durations;      // frames, every entry >= 1
    std::vector<double> pitch;       // log-F0
    std::vector<double> energy;
    std::vector<int> word_lengths;   // optional; empty means absent

    size_t size() const { return phonemes.size(); }
    bool has_word_lengths() const { return !word_lengths.empty(); }

    // Throws AlignmentError on length mismatch, InvariantViolation on
    // duration < 1 or a word-length sum that does not cover the sequence.
    void validate() const;

    bool operator==(const AlignedUtterance&) const = default;
};

// True when phonemes/durations/word_lengths match exactly and pitch/energy
// match within tol.
bool approx_equal(const AlignedUtterance& a, const AlignedUtterance& b, double tol);

enum class NumberStyle {
    canonical,  // exactly 4 fractional digits: 5.3 -> "5.3000"
    compact,    // trailing zeros trimmed, at least one digit kept: "5.3"
};

// Line format:
//   W IH1 L | d:10,7,7 | p:5.3000,5.3000,5.2000 | e:0.8000,3.6000,3.1000
// with an optional trailing "| w:1,2" word-length field.
AlignedUtterance parse_sequence(const std::string& line);
std::string serialize_sequence(const AlignedUtterance& u,
                               NumberStyle style = NumberStyle::canonical);

// Newline-delimited files of such lines; '#'-prefixed lines and blank lines
// are ignored. Parse failures carry the 1-based line number.
std::vector<AlignedUtterance> read_utterance_file(const std::string& path);
void write_utterance_file(const std::string& path,
                          const std::vector<AlignedUtterance>& utts,
                          const std::vector<std::string>& comments = {});

std::string format_number(double v, NumberStyle style);

}  // namespace accentkit
