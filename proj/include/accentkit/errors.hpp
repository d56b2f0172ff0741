#pragma once

#include <stdexcept>
#include <string>

namespace accentkit {

// Base class for everything this library throws on bad input or bad state.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- phoneme / utterance parsing ---

// Token is not in the ARPAbet inventory, or the stress digit is illegal
// (vowel without stress, consonant with stress, digit outside {0,1,2}).
struct UnknownPhonemeError : Error {
    UnknownPhonemeError(const std::string& msg, int index_ = -1)
        : Error(msg), index(index_) {}
    int index;  // position of the offending token, -1 if unknown
};

// Phoneme / duration / pitch / energy vectors disagree in length.
struct AlignmentError : Error {
    using Error::Error;
};

// Malformed line: missing field, bad number, empty phoneme list.
struct SyntaxError : Error {
    using Error::Error;
};

// A value-level invariant is broken (duration < 1, word-length sum mismatch,
// merge at the last position, ...).
struct InvariantViolation : Error {
    using Error::Error;
};

// --- prosody ---

struct ConfigError : Error {
    using Error::Error;
};

// Alignment interval extends beyond the available frames.
struct CoverageError : Error {
    using Error::Error;
};

// Speaker-stats sampling asked for more utterances than the pool holds.
struct EmptyPoolError : Error {
    using Error::Error;
};

// --- edit operations ---

struct IndexError : Error {
    using Error::Error;
};

// --- llm editing ---

struct InsufficientCandidatesError : Error {
    using Error::Error;
};

// Transport or auth failure talking to a completion endpoint; distinct from
// validation fallback, which is not an error.
struct BackendError : Error {
    using Error::Error;
};

// --- evaluation ---

struct EmptyReferenceError : Error {
    using Error::Error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

struct ZeroNormError : Error {
    using Error::Error;
};

struct EmptyInputError : Error {
    using Error::Error;
};

// --- harness ---

struct PoolTooSmallError : Error {
    using Error::Error;
};

struct InsufficientDataError : Error {
    using Error::Error;
};

// --- file handling ---

struct FileError : Error {
    using Error::Error;
};

}  // namespace accentkit
