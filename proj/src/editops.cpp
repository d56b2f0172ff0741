#include "accentkit/editops.hpp"

#include <cmath>
#include <sstream>

#include "accentkit/rng.hpp"

namespace accentkit {

namespace {

void check_index(const AlignedUtterance& u, int index, const char* what) {
    if (index < 0 || static_cast<size_t>(index) >= u.size()) {
        throw IndexError(std::string(what) + " index " + std::to_string(index) +
                         " out of range for length " + std::to_string(u.size()));
    }
}

void erase_at(AlignedUtterance& u, int i) {
    u.phonemes.erase(u.phonemes.begin() + i);
    u.durations.erase(u.durations.begin() + i);
    u.pitch.erase(u.pitch.begin() + i);
    u.energy.erase(u.energy.begin() + i);
}

}  // namespace

AlignedUtterance apply_script(const AlignedUtterance& source, const EditScript& script) {
    source.validate();
    AlignedUtterance u = source;
    u.word_lengths.clear();  // word grouping is undefined after structural edits

    for (const EditOp& op : script.ops) {
        switch (op.kind) {
            case EditOp::Kind::substitute: {
                check_index(u, op.index, "substitute");
                u.phonemes[op.index] = op.sym1;
                break;
            }
            case EditOp::Kind::erase: {
                check_index(u, op.index, "delete");
                erase_at(u, op.index);
                break;
            }
            case EditOp::Kind::insert: {
                const int n = static_cast<int>(u.size());
                if (op.index < 0 || op.index > n) {
                    throw IndexError("insert index " + std::to_string(op.index) +
                                     " out of range for length " + std::to_string(n));
                }
                if (n == 0) {
                    throw InvariantViolation(
                        "insert into an empty sequence has no neighbor prosody");
                }
                const int left = op.index - 1;
                const int right = op.index;
                double dur_sum = 0.0;
                int neighbors = 0;
                if (left >= 0) { dur_sum += u.durations[left]; ++neighbors; }
                if (right < n) { dur_sum += u.durations[right]; ++neighbors; }
                const int dur = std::max(
                    1, static_cast<int>(std::llround(dur_sum / neighbors)));
                const int copy_from = left >= 0 ? left : right;
                const double p = u.pitch[copy_from];
                const double e = u.energy[copy_from];
                u.phonemes.insert(u.phonemes.begin() + op.index, op.sym1);
                u.durations.insert(u.durations.begin() + op.index, dur);
                u.pitch.insert(u.pitch.begin() + op.index, p);
                u.energy.insert(u.energy.begin() + op.index, e);
                break;
            }
            case EditOp::Kind::split: {
                check_index(u, op.index, "split");
                const int d = u.durations[op.index];
                const int d1 = std::max(1, d / 2);
                const int d2 = std::max(1, d - d / 2);
                const double p = u.pitch[op.index];
                const double e = u.energy[op.index];
                u.phonemes[op.index] = op.sym1;
                u.durations[op.index] = d1;
                u.phonemes.insert(u.phonemes.begin() + op.index + 1, op.sym2);
                u.durations.insert(u.durations.begin() + op.index + 1, d2);
                u.pitch.insert(u.pitch.begin() + op.index + 1, p);
                u.energy.insert(u.energy.begin() + op.index + 1, e);
                break;
            }
            case EditOp::Kind::merge: {
                check_index(u, op.index, "merge");
                if (static_cast<size_t>(op.index) + 1 >= u.size()) {
                    throw InvariantViolation("merge at the last position");
                }
                const int i = op.index;
                const double d1 = u.durations[i], d2 = u.durations[i + 1];
                const double total = d1 + d2;
                u.phonemes[i] = op.sym1;
                u.pitch[i] = (d1 * u.pitch[i] + d2 * u.pitch[i + 1]) / total;
                u.energy[i] = (d1 * u.energy[i] + d2 * u.energy[i + 1]) / total;
                u.durations[i] = static_cast<int>(total);
                erase_at(u, i + 1);
                break;
            }
        }
    }
    u.validate();
    return u;
}

int phoneme_edit_distance(const std::vector<PhonemeSymbol>& a,
                          const std::vector<PhonemeSymbol>& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<int> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double change_rate(const AlignedUtterance& source, const AlignedUtterance& target) {
    if (source.size() == 0) throw InvariantViolation("change rate of empty source");
    return static_cast<double>(phoneme_edit_distance(source.phonemes, target.phonemes)) /
           static_cast<double>(source.size());
}

std::pair<AlignedUtterance, EditScript> random_matched_rate(
    const AlignedUtterance& source, double rate, uint64_t seed) {
    source.validate();
    const size_t len = source.size();
    if (len == 0) throw InvariantViolation("empty source");
    const int n = static_cast<int>(std::llround(rate * static_cast<double>(len)));

    EditScript script;
    script.provenance = Provenance::random;
    if (n == 0) return {source, script};

    Rng rng(SeedMixer().mix("random_matched_rate").mix(seed).value());
    const std::vector<size_t> positions = rng.sample_indices(len, static_cast<size_t>(n));

    // Substituted positions differ from the source by construction, so the
    // edit distance is n unless the draws happen to recreate a shifted copy
    // of the source. Redrawing the replacement symbols covers that corner,
    // keeping the realized rate exactly n/len for every seed.
    for (int attempt = 0; attempt < 100; ++attempt) {
        AlignedUtterance result = source;
        script.ops.clear();
        for (size_t pos : positions) {
            const PhonemeSymbol orig = source.phonemes[pos];
            uint8_t draw = static_cast<uint8_t>(rng.below(kInventorySize - 1));
            if (draw >= orig.base) ++draw;
            const int8_t stress =
                (draw < kNumVowels) ? (orig.is_vowel() ? orig.stress : int8_t{0})
                                    : int8_t{-1};
            const PhonemeSymbol repl{draw, stress};
            script.ops.push_back(EditOp::substitute(static_cast<int>(pos), repl));
            result.phonemes[pos] = repl;
        }
        if (phoneme_edit_distance(source.phonemes, result.phonemes) == n) {
            return {result, script};
        }
    }
    throw Error("random_matched_rate could not realize the exact rate");
}

namespace {

// Alignment move before the split/merge rewrite.
struct Move {
    enum Kind { match, sub, del, ins } kind;
    PhonemeSymbol target{};  // for sub/ins
};

}  // namespace

EditScript diff_to_script(const AlignedUtterance& source,
                          const std::vector<PhonemeSymbol>& target) {
    source.validate();
    const auto& src = source.phonemes;
    const int n = static_cast<int>(src.size());
    const int m = static_cast<int>(target.size());
    if (n == 0 || m == 0) throw InvariantViolation("diff needs non-empty sequences");

    // Standard unit-cost Levenshtein, as cost-to-go so the walk below runs
    // forward. The distance therefore always equals change_rate's numerator.
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (int i = 0; i <= n; ++i) dp[i][m] = n - i;
    for (int j = 0; j <= m; ++j) dp[n][j] = m - j;
    for (int i = n - 1; i >= 0; --i) {
        for (int j = m - 1; j >= 0; --j) {
            const int diag = dp[i + 1][j + 1] + (src[i] == target[j] ? 0 : 1);
            dp[i][j] = std::min({diag, 1 + dp[i + 1][j], 1 + dp[i][j + 1]});
        }
    }

    // Tie-break per step: match > substitute > delete > insert. Substitution
    // first guarantees 1-to-2 regions surface as "sub, ins" and 2-to-1
    // regions as "sub, del", which the rewrite below turns into single ops.
    std::vector<Move> moves;
    int i = 0, j = 0;
    while (i < n || j < m) {
        const int goal = dp[i][j];
        if (i < n && j < m && src[i] == target[j] && dp[i + 1][j + 1] == goal) {
            moves.push_back({Move::match, target[j]});
            ++i, ++j;
        } else if (i < n && j < m && 1 + dp[i + 1][j + 1] == goal) {
            moves.push_back({Move::sub, target[j]});
            ++i, ++j;
        } else if (i < n && 1 + dp[i + 1][j] == goal) {
            moves.push_back({Move::del, {}});
            ++i;
        } else {
            moves.push_back({Move::ins, target[j]});
            ++j;
        }
    }

    // Rewrite pass: adjacent del+ins pairs collapse into a substitution; a
    // substitution paired with an adjacent insert is a 1-to-2 split, with an
    // adjacent delete a 2-to-1 merge (one op instead of two).
    EditScript script;
    script.provenance = Provenance::oracle_alignment;
    int out = 0;  // index into the partially edited sequence
    for (size_t k = 0; k < moves.size(); ++k) {
        const Move& mv = moves[k];
        const Move* next = k + 1 < moves.size() ? &moves[k + 1] : nullptr;
        switch (mv.kind) {
            case Move::match:
                ++out;
                break;
            case Move::sub:
                if (next && next->kind == Move::ins) {
                    script.ops.push_back(EditOp::split(out, mv.target, next->target));
                    out += 2;
                    ++k;
                } else if (next && next->kind == Move::del) {
                    script.ops.push_back(EditOp::merge(out, mv.target));
                    ++out;
                    ++k;
                } else {
                    script.ops.push_back(EditOp::substitute(out, mv.target));
                    ++out;
                }
                break;
            case Move::del:
                if (next && next->kind == Move::ins) {
                    script.ops.push_back(EditOp::substitute(out, next->target));
                    ++out;
                    ++k;
                } else {
                    script.ops.push_back(EditOp::erase(out));
                }
                break;
            case Move::ins:
                if (next && next->kind == Move::del) {
                    script.ops.push_back(EditOp::substitute(out, mv.target));
                    ++out;
                    ++k;
                } else {
                    script.ops.push_back(EditOp::insert(out, mv.target));
                    ++out;
                }
                break;
        }
    }
    return script;
}

std::string serialize_script(const EditScript& script) {
    std::string out;
    for (const EditOp& op : script.ops) {
        switch (op.kind) {
            case EditOp::Kind::substitute:
                out += "SUB " + std::to_string(op.index) + " " + op.sym1.text();
                break;
            case EditOp::Kind::erase:
                out += "DEL " + std::to_string(op.index);
                break;
            case EditOp::Kind::insert:
                out += "INS " + std::to_string(op.index) + " " + op.sym1.text();
                break;
            case EditOp::Kind::split:
                out += "SPLIT " + std::to_string(op.index) + " " + op.sym1.text() +
                       " " + op.sym2.text();
                break;
            case EditOp::Kind::merge:
                out += "MERGE " + std::to_string(op.index) + " " + op.sym1.text();
                break;
        }
        out += '\n';
    }
    return out;
}

EditScript parse_script(const std::string& text, Provenance provenance) {
    EditScript script;
    script.provenance = provenance;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw) || kw[0] == '#') continue;
        auto want_index = [&]() {
            int idx;
            if (!(ls >> idx)) throw SyntaxError("script line " + std::to_string(lineno) +
                                                ": missing index");
            return idx;
        };
        auto want_sym = [&]() {
            std::string tok;
            if (!(ls >> tok)) throw SyntaxError("script line " + std::to_string(lineno) +
                                                ": missing phoneme");
            return parse_phoneme(tok);
        };
        if (kw == "SUB") {
            int idx = want_index();
            script.ops.push_back(EditOp::substitute(idx, want_sym()));
        } else if (kw == "DEL") {
            script.ops.push_back(EditOp::erase(want_index()));
        } else if (kw == "INS") {
            int idx = want_index();
            script.ops.push_back(EditOp::insert(idx, want_sym()));
        } else if (kw == "SPLIT") {
            int idx = want_index();
            PhonemeSymbol a = want_sym();
            script.ops.push_back(EditOp::split(idx, a, want_sym()));
        } else if (kw == "MERGE") {
            int idx = want_index();
            script.ops.push_back(EditOp::merge(idx, want_sym()));
        } else {
            throw SyntaxError("script line " + std::to_string(lineno) +
                              ": unknown op '" + kw + "'");
        }
    }
    return script;
}

}  // namespace accentkit
