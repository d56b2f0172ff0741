#include "accentkit/llmedit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace accentkit {

double population_std(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                  static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

IclExample make_icl_example(AlignedUtterance source, AlignedUtterance target) {
    source.validate();
    target.validate();
    IclExample ex;
    const double src_std = population_std(source.pitch);
    const double tgt_std = population_std(target.pitch);
    ex.pitch_ratio = src_std > 0.0 ? tgt_std / src_std : 0.0;
    ex.source = std::move(source);
    ex.target = std::move(target);
    return ex;
}

std::vector<IclExample> select_icl_examples(const std::vector<IclExample>& candidates,
                                            size_t k) {
    if (k > candidates.size()) {
        throw InsufficientCandidatesError("requested " + std::to_string(k) +
                                          " examples from " +
                                          std::to_string(candidates.size()) +
                                          " candidates");
    }
    std::vector<size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return candidates[a].pitch_ratio > candidates[b].pitch_ratio;
    });
    std::vector<IclExample> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) out.push_back(candidates[order[i]]);
    return out;
}

std::string render_instructions(double target_change_rate,
                                const std::string& accent_label) {
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.2f", target_change_rate * 100.0);

    std::string s;
    s += "You edit ARPAbet phoneme sequences so they reflect " + accent_label +
         "-accented pronunciation.\n";
    s += "\n";
    s += "Sequence format: space-separated phonemes, then \"| d:\" per-phoneme "
         "duration frames, \"| p:\" per-phoneme log-F0 pitch, \"| e:\" per-phoneme "
         "energy, comma-separated, one value per phoneme in order.\n";
    s += "\n";
    s += "Allowed edits: substitute a phoneme, insert a phoneme, delete a phoneme, "
         "split one phoneme into two, or merge two adjacent phonemes into one.\n";
    s += "Constraints:\n";
    s += "- The output must remain a valid aligned sequence: d, p and e each carry "
         "exactly one value per output phoneme.\n";
    s += "- Copy d, p and e from the source everywhere no structural edit occurs; "
         "substitutions keep the source values unchanged.\n";
    s += "- Adjust prosody only to maintain alignment: an inserted phoneme copies "
         "p/e from its left neighbor (right neighbor at position 0) and takes "
         "duration max(1, round(mean of adjacent durations)); a split divides the "
         "duration into floor/ceil halves, each at least 1, and copies p/e to both "
         "halves; a merge sums the durations and takes duration-weighted means of "
         "p and e.\n";
    s += "- Do not edit prosody toward the accent; change it only where alignment "
         "requires it.\n";
    s += "- Reason explicitly about each phoneme-level change you propose, one "
         "\"#\" line per change.\n";
    s += "\n";
    s += "Approximately match the observed level of phoneme substitution: change "
         "about " + std::string(rate) + "% of the source phonemes. You are free "
         "to deviate when required to satisfy alignment and validity "
         "constraints.\n";
    return s;
}

PromptSpec make_prompt_spec(std::vector<IclExample> examples, AlignedUtterance query,
                            std::string accent_label) {
    query.validate();
    PromptSpec spec;
    double rate_sum = 0.0;
    for (const auto& ex : examples) rate_sum += change_rate(ex.source, ex.target);
    spec.target_change_rate =
        examples.empty() ? 0.0 : rate_sum / static_cast<double>(examples.size());
    spec.instructions = render_instructions(spec.target_change_rate, accent_label);
    spec.examples = std::move(examples);
    spec.query = std::move(query);
    spec.accent_label = std::move(accent_label);
    return spec;
}

std::string build_prompt(const PromptSpec& spec) {
    std::string s = spec.instructions;
    for (size_t i = 0; i < spec.examples.size(); ++i) {
        s += "\nEXAMPLE " + std::to_string(i + 1) + "\n";
        s += "SOURCE: " +
             serialize_sequence(spec.examples[i].source, NumberStyle::compact) + "\n";
        s += "TARGET: " +
             serialize_sequence(spec.examples[i].target, NumberStyle::compact) + "\n";
    }
    s += "\nEdit the following sequence. Respond with exactly one line starting "
         "with \"TARGET: \" containing the edited sequence, plus your \"#\" "
         "rationale lines.\n";
    s += "\nSOURCE: " + serialize_sequence(spec.query, NumberStyle::compact) + "\n";
    return s;
}

std::string ValidationFailure::describe() const {
    std::string k;
    switch (kind) {
        case Kind::parse: k = "unparseable response"; break;
        case Kind::inventory: k = "phoneme outside the inventory"; break;
        case Kind::alignment: k = "phoneme/prosody length mismatch"; break;
        case Kind::prosody_tamper: k = "prosody changed where it must copy the source"; break;
        case Kind::structural_rule: k = "structural edit broke the prosody adjustment rules"; break;
    }
    if (position >= 0) k += " at position " + std::to_string(position);
    if (!detail.empty()) k += ": " + detail;
    return k;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

constexpr double kProsodyTol = 1e-6;

}  // namespace

ValidationResult validate_response(const AlignedUtterance& source,
                                   const std::string& response_text) {
    std::vector<std::string> rationale;
    std::string target_line;
    bool have_target = false;

    std::istringstream in(response_text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            rationale.push_back(trim(t.substr(1)));
            continue;
        }
        if (t.rfind("TARGET:", 0) == 0) {
            if (have_target) {
                return ValidationFailure{ValidationFailure::Kind::parse, -1,
                                         "more than one TARGET line"};
            }
            target_line = trim(t.substr(7));
            have_target = true;
            continue;
        }
        return ValidationFailure{ValidationFailure::Kind::parse, -1,
                                 "unexpected line '" + t + "'"};
    }
    if (!have_target) {
        return ValidationFailure{ValidationFailure::Kind::parse, -1,
                                 "no TARGET line"};
    }

    AlignedUtterance edited;
    try {
        edited = parse_sequence(target_line);
    } catch (const UnknownPhonemeError& e) {
        return ValidationFailure{ValidationFailure::Kind::inventory, e.index, e.what()};
    } catch (const AlignmentError& e) {
        return ValidationFailure{ValidationFailure::Kind::alignment, -1, e.what()};
    } catch (const Error& e) {
        return ValidationFailure{ValidationFailure::Kind::parse, -1, e.what()};
    }

    EditScript script = diff_to_script(source, edited.phonemes);
    script.provenance = Provenance::llm;
    const AlignedUtterance expected = apply_script(source, script);

    // Positions produced by insert/split/merge follow the structural rules;
    // everything else must copy the source prosody.
    std::vector<bool> structural(source.size(), false);
    for (const EditOp& op : script.ops) {
        switch (op.kind) {
            case EditOp::Kind::substitute:
                break;
            case EditOp::Kind::erase:
                structural.erase(structural.begin() + op.index);
                break;
            case EditOp::Kind::insert:
                structural.insert(structural.begin() + op.index, true);
                break;
            case EditOp::Kind::split:
                structural[op.index] = true;
                structural.insert(structural.begin() + op.index + 1, true);
                break;
            case EditOp::Kind::merge:
                structural[op.index] = true;
                structural.erase(structural.begin() + op.index + 1);
                break;
        }
    }

    for (size_t i = 0; i < expected.size(); ++i) {
        const bool bad = edited.durations[i] != expected.durations[i] ||
                         std::fabs(edited.pitch[i] - expected.pitch[i]) > kProsodyTol ||
                         std::fabs(edited.energy[i] - expected.energy[i]) > kProsodyTol;
        if (!bad) continue;
        const auto kind = structural[i] ? ValidationFailure::Kind::structural_rule
                                        : ValidationFailure::Kind::prosody_tamper;
        return ValidationFailure{kind, static_cast<int>(i),
                                 "expected d=" + std::to_string(expected.durations[i]) +
                                     " p=" + format_number(expected.pitch[i], NumberStyle::canonical) +
                                     " e=" + format_number(expected.energy[i], NumberStyle::canonical)};
    }

    return ValidatedEdit{std::move(edited), std::move(script), std::move(rationale)};
}

EditResponse edit_with_llm(const AlignedUtterance& source, const PromptSpec& spec,
                           EditorBackend& backend, int max_retries) {
    if (max_retries < 0) throw InvariantViolation("negative retry budget");
    const std::string prompt = build_prompt(spec);
    std::string request = prompt;

    const int attempts_allowed = max_retries + 1;
    for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
        const std::string text = backend.complete(request);
        ValidationResult result = validate_response(source, text);
        if (auto* ok = std::get_if<ValidatedEdit>(&result)) {
            EditResponse resp;
            resp.edited = std::move(ok->edited);
            resp.script = std::move(ok->script);
            resp.rationale_lines = std::move(ok->rationale_lines);
            resp.attempts_used = attempt;
            resp.fallback = false;
            return resp;
        }
        const auto& failure = std::get<ValidationFailure>(result);
        request = prompt + "\nYour previous response was rejected (" +
                  failure.describe() +
                  "). Respond again with exactly one TARGET line and \"#\" "
                  "rationale lines only.\n";
    }

    EditResponse resp;
    resp.edited = source;
    resp.script.provenance = Provenance::llm;
    resp.attempts_used = attempts_allowed;
    resp.fallback = true;
    return resp;
}

MockRuleBackend::MockRuleBackend(
    const std::vector<std::pair<std::string, std::string>>& rules, double cap_rate)
    : cap_rate_(cap_rate) {
    for (const auto& [from, to] : rules) {
        const auto f = find_base(from);
        const auto t = find_base(to);
        if (!f || !t) {
            throw UnknownPhonemeError("mock rule " + from + " -> " + to +
                                      " is outside the inventory");
        }
        rules_.emplace_back(*f, *t);
    }
}

std::string MockRuleBackend::complete(const std::string& prompt) {
    // The query is the last SOURCE line of the prompt.
    std::string source_line;
    std::istringstream in(prompt);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.rfind("SOURCE:", 0) == 0) source_line = trim(t.substr(7));
    }
    if (source_line.empty()) {
        throw BackendError("mock backend found no SOURCE line in the prompt");
    }
    AlignedUtterance u;
    try {
        u = parse_sequence(source_line);
    } catch (const Error& e) {
        throw BackendError(std::string("mock backend could not parse SOURCE: ") +
                           e.what());
    }

    const double len = static_cast<double>(u.size());
    int changed = 0;
    std::vector<std::string> notes;
    for (size_t i = 0; i < u.size(); ++i) {
        for (const auto& [from, to] : rules_) {
            if (u.phonemes[i].base != from) continue;
            if (static_cast<double>(changed + 1) > cap_rate_ * len + 1e-9) break;
            PhonemeSymbol repl{to, -1};
            if (repl.is_vowel()) {
                repl.stress = u.phonemes[i].is_vowel() ? u.phonemes[i].stress
                                                       : int8_t{0};
            }
            notes.push_back("# position " + std::to_string(i) + ": " +
                            u.phonemes[i].text() + " -> " + repl.text());
            u.phonemes[i] = repl;
            ++changed;
            break;
        }
    }

    std::string out;
    for (const auto& n : notes) out += n + "\n";
    out += "TARGET: " + serialize_sequence(u, NumberStyle::compact) + "\n";
    return out;
}

std::vector<IclExample> read_icl_example_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::vector<IclExample> out;
    std::string line;
    AlignedUtterance source;
    bool have_source = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const bool is_source = t.rfind("SOURCE:", 0) == 0;
        const bool is_target = t.rfind("TARGET:", 0) == 0;
        if (!is_source && !is_target) {
            throw SyntaxError(path + ":" + std::to_string(lineno) +
                              ": expected SOURCE: or TARGET: line");
        }
        AlignedUtterance u;
        try {
            u = parse_sequence(trim(t.substr(7)));
        } catch (const Error& e) {
            throw SyntaxError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (is_source) {
            if (have_source) {
                throw SyntaxError(path + ":" + std::to_string(lineno) +
                                  ": SOURCE line without a TARGET for the previous one");
            }
            source = std::move(u);
            have_source = true;
        } else {
            if (!have_source) {
                throw SyntaxError(path + ":" + std::to_string(lineno) +
                                  ": TARGET line without a preceding SOURCE");
            }
            out.push_back(make_icl_example(std::move(source), std::move(u)));
            have_source = false;
        }
    }
    if (have_source) throw SyntaxError(path + ": trailing SOURCE without TARGET");
    return out;
}

}  // namespace accentkit
