#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "accentkit/errors.hpp"

namespace accentkit {

enum class Role { reference_pool, adaptation_train, eval, synthetic };

std::string role_name(Role role);
Role parse_role(const std::string& name);

struct ManifestEntry {
    std::string utt_id;
    std::string speaker_id;
    std::string accent_label;
    Role role = Role::adaptation_train;
    // optional artifact paths; empty string = absent
    std::string wav, transcript, alignment, pcl, embedding;
    std::string text;  // optional inline transcript text
    std::optional<int> pool_rank;
};

struct Manifest {
    std::vector<ManifestEntry> entries;

    std::vector<ManifestEntry> with_role(Role role) const;
};

// Line-delimited JSON records; '#' comments and blank lines allowed.
Manifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const Manifest& manifest);

struct SweepSpec {
    enum class Kind { k_sweep, n_scaling };
    enum class Component { icl, speaker_emb, style_emb, decoder_ft, joint };

    Kind kind = Kind::n_scaling;
    Component varied_component = Component::icl;
    std::vector<int> k_values;  // defaults depend on the varied component
    std::vector<int> n_values;
    int runs = 7;
    int synth_budget = 500;
    uint64_t master_seed = 0;

    void validate() const;
};

// {0,1,3,5,10,15} for in-context prompting (which admits K=0), and
// {1,3,5,10,15} for every other component.
std::vector<int> default_k_values(SweepSpec::Component component);

std::string component_name(SweepSpec::Component component);
SweepSpec::Component parse_component(const std::string& name);

struct JobPlan {
    std::string job_id;
    std::string condition;  // real / real_plus_synth / adapt_llm / ...
    int x = 0;              // N for scaling, K for the k-sweep
    int run = 0;
    uint64_t seed = 0;
    std::vector<std::string> train_real;
    std::vector<std::string> train_synth;
    // per-component reference utterance ids (k-sweep jobs)
    std::map<std::string, std::vector<std::string>> component_refs;
    std::vector<std::string> expected_outputs;
};

// The k lowest-rank entries in rank order (ties by utterance id).
std::vector<std::string> select_references(const std::vector<ManifestEntry>& pool,
                                           int k);

// For each N and run: a `real` job of N sampled adaptation-train utterances
// and a `real_plus_synth` job adding the fixed synthetic set. Deterministic
// given (spec, manifest).
std::vector<JobPlan> plan_scaling(const SweepSpec& spec, const Manifest& manifest);

// For each K: the varied component takes the top-K references while every
// other component keeps the top-15; `joint` varies decoder fine-tuning and
// both embeddings together.
std::vector<JobPlan> plan_k_sweep(const SweepSpec& spec, const Manifest& manifest);

struct DisjointnessViolation {
    std::string kind;  // id_overlap | text_overlap
    std::string speaker;
    std::string first_id;
    std::string second_id;
    std::string detail;
};

struct DisjointnessReport {
    std::vector<DisjointnessViolation> violations;

    bool clean() const { return violations.empty(); }
    std::string to_text() const;
};

// Reference/eval id-disjointness per speaker, and train/eval transcript
// disjointness on normalize_text equality. Violations are report content,
// not errors.
DisjointnessReport check_disjointness(const Manifest& manifest);

struct RunRecord {
    std::string job_id;
    std::string metric;   // base metric name, e.g. "wer"
    std::string speaker;  // "-" when the metric is not per-speaker
    double value = 0.0;
    bool external = true;
};

struct IngestReject {
    int line = 0;
    std::string kind;  // UnknownJob | MalformedRecord | Duplicate
    std::string reason;
};

struct IngestResult {
    std::vector<RunRecord> records;
    std::vector<IngestReject> rejects;
};

// CSV rows job_id,metric,value where metric may carry a ":speaker" suffix.
// Unknown job ids and duplicate (job_id, metric) pairs are rejected with
// their line numbers.
IngestResult ingest_results(const std::string& path,
                            const std::vector<JobPlan>& plan);
IngestResult parse_results_csv(const std::string& content,
                               const std::vector<JobPlan>& plan);

struct ReportRow {
    std::string condition, speaker, metric;
    int x = 0;
    double mean = 0.0;
    double stddev = 0.0;
    int n_runs = 0;
    int expected_runs = 0;
};

struct PlotSeries {
    std::string condition, metric, speaker;
    std::vector<std::array<double, 3>> points;  // x, mean, std
};

struct Report {
    std::vector<ReportRow> rows;
    std::vector<PlotSeries> series;  // includes the adapt_random - adapt_llm gap
    std::vector<std::string> warnings;
};

Report build_report(const std::vector<RunRecord>& records,
                    const std::vector<JobPlan>& plan);
std::string report_csv(const Report& report);
std::string plot_data(const Report& report);

// One JSON object per line, keys sorted; byte-identical across reruns.
void write_plan_file(const std::string& path, const std::vector<JobPlan>& plan);
std::vector<JobPlan> read_plan_file(const std::string& path);

}  // namespace accentkit
