#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "accentkit/errors.hpp"

namespace accentkit {

// The 39-symbol ARPAbet inventory. Vowels first, then consonants; the
// numeric id of a symbol is its index in this table.
inline constexpr int kNumVowels = 15;
inline constexpr int kInventorySize = 39;

inline constexpr std::array<std::string_view, kInventorySize> kInventory = {
    // vowels (carry a stress digit 0/1/2)
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY", "OW",
    "OY", "UH", "UW",
    // consonants (never carry stress)
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N", "NG",
    "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"};

// One ARPAbet phoneme. Stress is part of identity: IH0 != IH1 for every
// equality and edit-distance purpose in this library.
struct PhonemeSymbol {
    uint8_t base = 0;   // index into kInventory
    int8_t stress = -1; // 0/1/2 for vowels, -1 for consonants

    bool is_vowel() const { return base < kNumVowels; }

    std::string text() const {
        std::string s(kInventory[base]);
        if (stress >= 0) s += static_cast<char>('0' + stress);
        return s;
    }

    bool operator==(const PhonemeSymbol&) const = default;
};

// Base id for a token without stress digit, or nullopt if unknown.
std::optional<uint8_t> find_base(std::string_view token);

// Parse a single token ("IH1", "W"). Throws UnknownPhonemeError when the
// base is unknown or the stress placement is illegal.
PhonemeSymbol parse_phoneme(std::string_view token);

// Maps each token to a PhonemeSymbol; on failure rethrows with the index of
// the first offending token.
std::vector<PhonemeSymbol> validate_inventory(const std::vector<std::string>& tokens);

// Symbol with a given base; vowels get the given stress, consonants ignore it.
PhonemeSymbol make_symbol(uint8_t base, int8_t vowel_stress = 0);

}  // namespace accentkit
