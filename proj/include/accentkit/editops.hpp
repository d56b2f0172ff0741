#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "accentkit/utterance.hpp"

namespace accentkit {

// One constrained edit. Indices refer to the sequence state at application
// time; a script applies its ops left-to-right in listed order.
struct EditOp {
    enum class Kind { substitute, erase, insert, split, merge };

    Kind kind;
    int index = 0;
    PhonemeSymbol sym1{};  // substitute/insert/merge replacement, split first half
    PhonemeSymbol sym2{};  // split second half

    static EditOp substitute(int index, PhonemeSymbol s) {
        return {Kind::substitute, index, s, {}};
    }
    static EditOp erase(int index) { return {Kind::erase, index, {}, {}}; }
    static EditOp insert(int index, PhonemeSymbol s) {
        return {Kind::insert, index, s, {}};
    }
    static EditOp split(int index, PhonemeSymbol a, PhonemeSymbol b) {
        return {Kind::split, index, a, b};
    }
    // merges positions index and index+1
    static EditOp merge(int index, PhonemeSymbol s) {
        return {Kind::merge, index, s, {}};
    }

    bool operator==(const EditOp&) const = default;
};

enum class Provenance { llm, random, oracle_alignment };

struct EditScript {
    std::vector<EditOp> ops;
    Provenance provenance = Provenance::llm;

    bool empty() const { return ops.empty(); }
};

// Applies the script with the alignment-preserving prosody rules:
//   substitute  d/p/e unchanged at the position
//   erase       the position's d/p/e removed
//   insert      p/e copied from the left neighbor (right neighbor at
//               position 0); duration = max(1, round(mean of the adjacent
//               durations))
//   split       durations floor/ceil halves of the original, each >= 1;
//               p/e copied to both halves
//   merge       duration = sum; p/e = duration-weighted means
// Throws IndexError for an out-of-range op, InvariantViolation for a merge
// at the last position or an insert into an empty sequence.
AlignedUtterance apply_script(const AlignedUtterance& source, const EditScript& script);

// Unit-cost Levenshtein distance over stress-sensitive phoneme identity.
int phoneme_edit_distance(const std::vector<PhonemeSymbol>& a,
                          const std::vector<PhonemeSymbol>& b);

// Distance divided by source length. Source must be non-empty.
double change_rate(const AlignedUtterance& source, const AlignedUtterance& target);

// The matched-rate control: round(rate * len) distinct positions sampled
// uniformly, each replaced by a uniform draw from the inventory excluding
// the original base symbol. Vowel replacements inherit the original
// position's stress when the original was a vowel, else stress 0. Prosody
// untouched. The realized change rate is exactly round(rate*len)/len.
std::pair<AlignedUtterance, EditScript> random_matched_rate(
    const AlignedUtterance& source, double rate, uint64_t seed);

// Minimal-cost alignment of source phonemes to target phonemes (match 0;
// substitute/split/merge/delete/insert each cost 1), emitted as a script
// whose application yields exactly `target`. Ties prefer, in order:
// match > substitute > split/merge > delete > insert.
EditScript diff_to_script(const AlignedUtterance& source,
                          const std::vector<PhonemeSymbol>& target);

// Text form: one op per line (SUB 0 V / DEL 3 / INS 1 N / SPLIT 2 T R /
// MERGE 4 IH1); '#' comments allowed when parsing.
std::string serialize_script(const EditScript& script);
EditScript parse_script(const std::string& text, Provenance provenance);

}  // namespace accentkit
