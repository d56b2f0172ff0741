#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "accentkit/editops.hpp"
#include "accentkit/utterance.hpp"

namespace accentkit {

// A paired source/target utterance used for in-context prompting, ranked by
// the ratio of target-to-source pitch standard deviation.
struct IclExample {
    AlignedUtterance source;
    AlignedUtterance target;
    double pitch_ratio = 0.0;
};

double population_std(const std::vector<double>& values);

// Computes the pitch ratio over the phoneme-level pitch vectors. A
// zero-variance source carries no usable contrast and gets ratio 0 so it
// sorts last.
IclExample make_icl_example(AlignedUtterance source, AlignedUtterance target);

// Sorted by pitch_ratio descending, ties broken by original index; returns
// the first k. k = 0 yields an empty list.
std::vector<IclExample> select_icl_examples(const std::vector<IclExample>& candidates,
                                            size_t k);

struct PromptSpec {
    std::vector<IclExample> examples;
    AlignedUtterance query;
    double target_change_rate = 0.0;  // mean change rate over the examples
    std::string accent_label;
    std::string instructions;  // rendered constraint text
};

// Fills target_change_rate from the examples and renders the instruction
// block.
PromptSpec make_prompt_spec(std::vector<IclExample> examples, AlignedUtterance query,
                            std::string accent_label);

std::string render_instructions(double target_change_rate,
                                const std::string& accent_label);

// Deterministic: identical specs produce byte-identical prompts.
std::string build_prompt(const PromptSpec& spec);

struct ValidationFailure {
    enum class Kind { parse, inventory, alignment, prosody_tamper, structural_rule };

    Kind kind = Kind::parse;
    int position = -1;  // phoneme index where the first violation occurred
    std::string detail;

    std::string describe() const;
};

struct ValidatedEdit {
    AlignedUtterance edited;
    EditScript script;
    std::vector<std::string> rationale_lines;
};

using ValidationResult = std::variant<ValidatedEdit, ValidationFailure>;

// Expects exactly one "TARGET: <sequence>" line plus optional '#' rationale
// lines. Recovers the edit script by alignment and checks that untouched
// positions copy the source prosody exactly (within 1e-6) and structurally
// edited positions follow the apply_script rules.
ValidationResult validate_response(const AlignedUtterance& source,
                                   const std::string& response_text);

class EditorBackend {
public:
    virtual ~EditorBackend() = default;
    // Throws BackendError on transport failure.
    virtual std::string complete(const std::string& prompt) = 0;
};

class CallbackBackend final : public EditorBackend {
public:
    explicit CallbackBackend(std::function<std::string(const std::string&)> fn)
        : fn_(std::move(fn)) {}
    std::string complete(const std::string& prompt) override { return fn_(prompt); }

private:
    std::function<std::string(const std::string&)> fn_;
};

// Deterministic offline stand-in: parses the query SOURCE line out of the
// prompt and applies base-symbol substitution rules left to right until the
// change rate would exceed cap_rate, emitting one '#' rationale per change.
class MockRuleBackend final : public EditorBackend {
public:
    MockRuleBackend(const std::vector<std::pair<std::string, std::string>>& rules,
                    double cap_rate);
    std::string complete(const std::string& prompt) override;

private:
    std::vector<std::pair<uint8_t, uint8_t>> rules_;
    double cap_rate_;
};

struct EditResponse {
    AlignedUtterance edited;
    EditScript script;
    std::vector<std::string> rationale_lines;
    int attempts_used = 0;
    bool fallback = false;  // true when retries were exhausted
};

// Prompts the backend; on validation failure re-asks with the failure
// description appended, up to max_retries extra attempts; after exhaustion
// returns the unmodified source with fallback=true.
EditResponse edit_with_llm(const AlignedUtterance& source, const PromptSpec& spec,
                           EditorBackend& backend, int max_retries = 3);

// Example files hold SOURCE:/TARGET: line pairs; '#' comments allowed.
std::vector<IclExample> read_icl_example_file(const std::string& path);

}  // namespace accentkit
