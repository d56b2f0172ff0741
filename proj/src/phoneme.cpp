#include "accentkit/phoneme.hpp"

#include <cctype>

namespace accentkit {

std::optional<uint8_t> find_base(std::string_view token) {
    for (int i = 0; i < kInventorySize; ++i) {
        if (kInventory[i] == token) return static_cast<uint8_t>(i);
    }
    return std::nullopt;
}

PhonemeSymbol parse_phoneme(std::string_view token) {
    if (token.empty()) throw UnknownPhonemeError("empty phoneme token");

    std::string_view base_part = token;
    int8_t stress = -1;
    char last = token.back();
    if (std::isdigit(static_cast<unsigned char>(last))) {
        stress = static_cast<int8_t>(last - '0');
        base_part = token.substr(0, token.size() - 1);
    }

    auto base = find_base(base_part);
    if (!base) {
        throw UnknownPhonemeError("unknown phoneme '" + std::string(token) + "'");
    }
    const bool vowel = *base < kNumVowels;
    if (vowel && stress < 0) {
        throw UnknownPhonemeError("vowel '" + std::string(token) +
                                  "' is missing its stress digit");
    }
    if (!vowel && stress >= 0) {
        throw UnknownPhonemeError("consonant '" + std::string(token) +
                                  "' must not carry a stress digit");
    }
    if (stress > 2) {
        throw UnknownPhonemeError("stress digit out of range in '" +
                                  std::string(token) + "'");
    }
    return PhonemeSymbol{*base, stress};
}

std::vector<PhonemeSymbol> validate_inventory(const std::vector<std::string>& tokens) {
    std::vector<PhonemeSymbol> out;
    out.reserve(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) {
        try {
            out.push_back(parse_phoneme(tokens[i]));
        } catch (const UnknownPhonemeError& e) {
            throw UnknownPhonemeError(std::string(e.what()) + " at position " +
                                          std::to_string(i),
                                      static_cast<int>(i));
        }
    }
    return out;
}

PhonemeSymbol make_symbol(uint8_t base, int8_t vowel_stress) {
    if (base >= kInventorySize) throw UnknownPhonemeError("base id out of range");
    if (base < kNumVowels) return PhonemeSymbol{base, vowel_stress};
    return PhonemeSymbol{base, -1};
}

}  // namespace accentkit
