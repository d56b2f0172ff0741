#include "accentkit/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace accentkit {

Transcript normalize_text(const std::string& raw) {
    std::string cleaned;
    cleaned.reserve(raw.size());
    for (unsigned char c : raw) {
        unsigned char lc = static_cast<unsigned char>(std::tolower(c));
        if ((lc >= 'a' && lc <= 'z') || (lc >= '0' && lc <= '9') || lc == '\'') {
            cleaned += static_cast<char>(lc);
        } else if (std::isspace(lc)) {
            cleaned += ' ';
        }
        // everything else is dropped
    }
    Transcript t;
    std::istringstream is(cleaned);
    std::string tok;
    while (is >> tok) t.words.push_back(tok);
    return t;
}

EditCounts word_edit_counts(const Transcript& reference, const Transcript& hypothesis) {
    const auto& ref = reference.words;
    const auto& hyp = hypothesis.words;
    const size_t n = ref.size(), m = hyp.size();

    // Full table with backtrace so S/D/I are reported separately.
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = 0; i <= n; ++i) dp[i][0] = static_cast<int>(i);
    for (size_t j = 0; j <= m; ++j) dp[0][j] = static_cast<int>(j);
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            const int sub = dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
            dp[i][j] = std::min({sub, dp[i - 1][j] + 1, dp[i][j - 1] + 1});
        }
    }

    EditCounts c;
    size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 &&
            dp[i][j] == dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
            if (ref[i - 1] != hyp[j - 1]) ++c.substitutions;
            --i, --j;
        } else if (i > 0 && dp[i][j] == dp[i - 1][j] + 1) {
            ++c.deletions;
            --i;
        } else {
            ++c.insertions;
            --j;
        }
    }
    return c;
}

double wer(const Transcript& reference, const Transcript& hypothesis) {
    if (reference.empty()) throw EmptyReferenceError("empty reference transcript");
    return static_cast<double>(word_edit_counts(reference, hypothesis).total()) /
           static_cast<double>(reference.words.size());
}

namespace {

std::vector<double> unit_normalize(const EmbeddingVector& v, size_t dim) {
    if (v.values.size() != dim) {
        throw DimensionMismatchError("embedding '" + v.source_id + "' has dimension " +
                                     std::to_string(v.values.size()) + ", expected " +
                                     std::to_string(dim));
    }
    double norm2 = 0.0;
    for (double x : v.values) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    if (norm < 1e-12) {
        throw ZeroNormError("embedding '" + v.source_id + "' has zero norm");
    }
    std::vector<double> out(v.values.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = v.values[i] / norm;
    return out;
}

}  // namespace

double accent_similarity(
    const std::vector<EmbeddingVector>& synth,
    const std::map<std::string, std::vector<EmbeddingVector>>& real_by_speaker) {
    if (synth.empty()) throw EmptyInputError("no synthesized embeddings");
    if (real_by_speaker.empty()) throw EmptyInputError("no real speaker embeddings");
    const size_t dim = synth.front().values.size();

    std::vector<std::vector<double>> centroids;
    for (const auto& [speaker, embs] : real_by_speaker) {
        if (embs.empty()) {
            throw EmptyInputError("speaker '" + speaker + "' has no embeddings");
        }
        std::vector<double> centroid(dim, 0.0);
        for (const auto& e : embs) {
            const auto unit = unit_normalize(e, dim);
            for (size_t i = 0; i < dim; ++i) centroid[i] += unit[i];
        }
        double cn = 0.0;
        for (size_t i = 0; i < dim; ++i) {
            centroid[i] /= static_cast<double>(embs.size());
            cn += centroid[i] * centroid[i];
        }
        if (std::sqrt(cn) < 1e-12) {
            throw ZeroNormError("centroid for speaker '" + speaker +
                                "' has zero norm");
        }
        centroids.push_back(std::move(centroid));
    }

    double score = 0.0;
    for (const auto& s : synth) {
        const auto unit = unit_normalize(s, dim);
        double per_synth = 0.0;
        for (const auto& c : centroids) {
            double dot = 0.0, cn = 0.0;
            for (size_t i = 0; i < dim; ++i) {
                dot += unit[i] * c[i];
                cn += c[i] * c[i];
            }
            per_synth += dot / std::sqrt(cn);
        }
        score += per_synth / static_cast<double>(centroids.size());
    }
    return score / static_cast<double>(synth.size());
}

RunAggregate aggregate_runs(const std::vector<double>& values) {
    if (values.empty()) throw EmptyInputError("no run values to aggregate");
    RunAggregate agg;
    agg.n_runs = static_cast<int>(values.size());
    for (double v : values) agg.mean += v;
    agg.mean /= values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
    agg.stddev = std::sqrt(ss / values.size());
    return agg;
}

std::string score_csv(const std::vector<ScoreRow>& rows) {
    std::string out = "condition,speaker,metric,mean,std,n_runs\n";
    char buf[64];
    for (const auto& r : rows) {
        out += r.condition + "," + r.speaker + "," + r.metric + ",";
        std::snprintf(buf, sizeof buf, "%.6f", r.mean);
        out += std::string(buf) + ",";
        std::snprintf(buf, sizeof buf, "%.6f", r.stddev);
        out += std::string(buf) + "," + std::to_string(r.n_runs) + "\n";
    }
    return out;
}

std::vector<EmbeddingVector> read_embedding_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::vector<EmbeddingVector> out;
    std::string line;
    size_t dim = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        EmbeddingVector v;
        if (!(ls >> v.source_id)) continue;
        double x;
        while (ls >> x) v.values.push_back(x);
        if (v.values.empty()) {
            throw SyntaxError(path + ":" + std::to_string(lineno) +
                              ": embedding line has no values");
        }
        if (out.empty()) {
            dim = v.values.size();
        } else if (v.values.size() != dim) {
            throw DimensionMismatchError(path + ":" + std::to_string(lineno) +
                                         ": dimension " +
                                         std::to_string(v.values.size()) +
                                         " differs from first line (" +
                                         std::to_string(dim) + ")");
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> read_transcript_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw SyntaxError(path + ": transcript line missing TAB: " + line);
        }
        out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

}  // namespace accentkit
