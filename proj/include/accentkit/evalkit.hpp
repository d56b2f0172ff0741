#pragma once

#include <map>
#include <string>
#include <vector>

#include "accentkit/errors.hpp"

namespace accentkit {

struct Transcript {
    std::vector<std::string> words;

    bool empty() const { return words.empty(); }
    bool operator==(const Transcript&) const = default;
};

// Lowercase, drop everything outside [a-z 0-9 ' whitespace], collapse
// whitespace, split. May return an empty transcript.
Transcript normalize_text(const std::string& raw);

struct EditCounts {
    int substitutions = 0;
    int deletions = 0;
    int insertions = 0;

    int total() const { return substitutions + deletions + insertions; }
};

// Word-level unit-cost alignment counts (deletions are reference words
// missing from the hypothesis).
EditCounts word_edit_counts(const Transcript& reference, const Transcript& hypothesis);

// (S + D + I) / len(reference). May exceed 1. Throws EmptyReferenceError.
double wer(const Transcript& reference, const Transcript& hypothesis);

struct EmbeddingVector {
    std::string source_id;
    std::vector<double> values;
};

// Mean over synthesized embeddings of the mean cosine similarity to every
// speaker centroid; centroids are means of unit-normalized real embeddings.
double accent_similarity(
    const std::vector<EmbeddingVector>& synth,
    const std::map<std::string, std::vector<EmbeddingVector>>& real_by_speaker);

struct RunAggregate {
    double mean = 0.0;
    double stddev = 0.0;  // population
    int n_runs = 0;
};

RunAggregate aggregate_runs(const std::vector<double>& values);

struct ScoreRow {
    std::string condition;
    std::string speaker;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
    int n_runs = 0;
};

// Canonical score output: condition,speaker,metric,mean,std,n_runs.
std::string score_csv(const std::vector<ScoreRow>& rows);

// One vector per line: utterance-id then whitespace-separated decimals;
// dimension inferred from the first line.
std::vector<EmbeddingVector> read_embedding_file(const std::string& path);

// utterance-id TAB raw text
std::vector<std::pair<std::string, std::string>> read_transcript_file(
    const std::string& path);

}  // namespace accentkit
