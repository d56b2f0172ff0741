#include "accentkit/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "accentkit/evalkit.hpp"
#include "accentkit/rng.hpp"

namespace accentkit {

using nlohmann::json;

std::string role_name(Role role) {
    switch (role) {
        case Role::reference_pool: return "reference_pool";
        case Role::adaptation_train: return "adaptation_train";
        case Role::eval: return "eval";
        case Role::synthetic: return "synthetic";
    }
    return "?";
}

Role parse_role(const std::string& name) {
    if (name == "reference_pool") return Role::reference_pool;
    if (name == "adaptation_train") return Role::adaptation_train;
    if (name == "eval") return Role::eval;
    if (name == "synthetic") return Role::synthetic;
    throw SyntaxError("unknown role '" + name + "'");
}

std::vector<ManifestEntry> Manifest::with_role(Role role) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : entries) {
        if (e.role == role) out.push_back(e);
    }
    return out;
}

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    Manifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const std::exception& e) {
            throw SyntaxError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        ManifestEntry e;
        try {
            e.utt_id = j.at("utt").get<std::string>();
            e.speaker_id = j.at("speaker").get<std::string>();
            e.accent_label = j.value("accent", std::string{});
            e.role = parse_role(j.at("role").get<std::string>());
            e.wav = j.value("wav", std::string{});
            e.transcript = j.value("transcript", std::string{});
            e.alignment = j.value("alignment", std::string{});
            e.pcl = j.value("pcl", std::string{});
            e.embedding = j.value("embedding", std::string{});
            e.text = j.value("text", std::string{});
            if (j.contains("rank")) e.pool_rank = j.at("rank").get<int>();
        } catch (const Error&) {
            throw;
        } catch (const std::exception& ex) {
            throw SyntaxError(path + ":" + std::to_string(lineno) + ": " + ex.what());
        }
        m.entries.push_back(std::move(e));
    }
    return m;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    for (const auto& e : manifest.entries) {
        json j;
        j["utt"] = e.utt_id;
        j["speaker"] = e.speaker_id;
        if (!e.accent_label.empty()) j["accent"] = e.accent_label;
        j["role"] = role_name(e.role);
        if (!e.wav.empty()) j["wav"] = e.wav;
        if (!e.transcript.empty()) j["transcript"] = e.transcript;
        if (!e.alignment.empty()) j["alignment"] = e.alignment;
        if (!e.pcl.empty()) j["pcl"] = e.pcl;
        if (!e.embedding.empty()) j["embedding"] = e.embedding;
        if (!e.text.empty()) j["text"] = e.text;
        if (e.pool_rank) j["rank"] = *e.pool_rank;
        out << j.dump() << "\n";
    }
}

std::vector<int> default_k_values(SweepSpec::Component component) {
    if (component == SweepSpec::Component::icl) return {0, 1, 3, 5, 10, 15};
    return {1, 3, 5, 10, 15};
}

std::string component_name(SweepSpec::Component component) {
    switch (component) {
        case SweepSpec::Component::icl: return "icl";
        case SweepSpec::Component::speaker_emb: return "speaker_emb";
        case SweepSpec::Component::style_emb: return "style_emb";
        case SweepSpec::Component::decoder_ft: return "decoder_ft";
        case SweepSpec::Component::joint: return "joint";
    }
    return "?";
}

SweepSpec::Component parse_component(const std::string& name) {
    if (name == "icl") return SweepSpec::Component::icl;
    if (name == "speaker_emb") return SweepSpec::Component::speaker_emb;
    if (name == "style_emb") return SweepSpec::Component::style_emb;
    if (name == "decoder_ft") return SweepSpec::Component::decoder_ft;
    if (name == "joint") return SweepSpec::Component::joint;
    throw SyntaxError("unknown component '" + name + "'");
}

void SweepSpec::validate() const {
    if (runs < 1) throw InvariantViolation("runs must be positive");
    if (synth_budget < 0) throw InvariantViolation("negative synth budget");
    auto check_sorted = [](const std::vector<int>& v, int min_value,
                           const char* what) {
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] < min_value) {
                throw InvariantViolation(std::string(what) + " value " +
                                         std::to_string(v[i]) + " below " +
                                         std::to_string(min_value));
            }
            if (i > 0 && v[i] <= v[i - 1]) {
                throw InvariantViolation(std::string(what) +
                                         " values must be strictly ascending");
            }
        }
    };
    if (kind == Kind::n_scaling) {
        if (n_values.empty()) throw InvariantViolation("no N values");
        check_sorted(n_values, 1, "N");
    } else {
        if (k_values.empty()) throw InvariantViolation("no K values");
        const int min_k = varied_component == Component::icl ? 0 : 1;
        check_sorted(k_values, min_k, "K");
    }
}

std::vector<std::string> select_references(const std::vector<ManifestEntry>& pool,
                                           int k) {
    std::vector<const ManifestEntry*> ranked;
    for (const auto& e : pool) {
        if (e.pool_rank) ranked.push_back(&e);
    }
    if (k < 0 || static_cast<size_t>(k) > ranked.size()) {
        throw PoolTooSmallError("requested " + std::to_string(k) +
                                " references from a ranked pool of " +
                                std::to_string(ranked.size()));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
        if (*a->pool_rank != *b->pool_rank) return *a->pool_rank < *b->pool_rank;
        return a->utt_id < b->utt_id;
    });
    std::vector<std::string> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) out.push_back(ranked[i]->utt_id);
    return out;
}

namespace {

std::vector<std::string> ids_of(const std::vector<ManifestEntry>& entries) {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.utt_id);
    return out;
}

}  // namespace

std::vector<JobPlan> plan_scaling(const SweepSpec& spec, const Manifest& manifest) {
    SweepSpec checked = spec;
    if (checked.n_values.empty()) throw InvariantViolation("no N values");
    checked.validate();

    const auto real_pool = ids_of(manifest.with_role(Role::adaptation_train));
    const auto synth_pool = ids_of(manifest.with_role(Role::synthetic));
    const int max_n = checked.n_values.back();
    if (static_cast<int>(real_pool.size()) < max_n) {
        throw InsufficientDataError("manifest has " +
                                    std::to_string(real_pool.size()) +
                                    " adaptation_train utterances, need " +
                                    std::to_string(max_n));
    }
    if (static_cast<int>(synth_pool.size()) < checked.synth_budget) {
        throw InsufficientDataError("manifest has " +
                                    std::to_string(synth_pool.size()) +
                                    " synthetic utterances, need " +
                                    std::to_string(checked.synth_budget));
    }
    // The fixed synthetic set: first synth_budget synthetic entries in
    // manifest order.
    const std::vector<std::string> synth_set(
        synth_pool.begin(), synth_pool.begin() + checked.synth_budget);

    std::vector<JobPlan> plan;
    for (int n : checked.n_values) {
        for (int r = 0; r < checked.runs; ++r) {
            const uint64_t seed = SeedMixer()
                                      .mix(checked.master_seed)
                                      .mix("n_scaling")
                                      .mix(static_cast<uint64_t>(n))
                                      .mix(static_cast<uint64_t>(r))
                                      .value();
            Rng rng(seed);
            const auto idx = rng.sample_indices(real_pool.size(),
                                                static_cast<size_t>(n));
            std::vector<std::string> sampled;
            sampled.reserve(idx.size());
            for (size_t i : idx) sampled.push_back(real_pool[i]);

            JobPlan real_job;
            real_job.job_id = "real_n" + std::to_string(n) + "_r" + std::to_string(r);
            real_job.condition = "real";
            real_job.x = n;
            real_job.run = r;
            real_job.seed = seed;
            real_job.train_real = sampled;
            real_job.expected_outputs = {"wer"};
            plan.push_back(real_job);

            JobPlan mixed = real_job;
            mixed.job_id =
                "real_plus_synth_n" + std::to_string(n) + "_r" + std::to_string(r);
            mixed.condition = "real_plus_synth";
            mixed.train_synth = synth_set;
            plan.push_back(std::move(mixed));
        }
    }
    return plan;
}

std::vector<JobPlan> plan_k_sweep(const SweepSpec& spec, const Manifest& manifest) {
    SweepSpec checked = spec;
    if (checked.k_values.empty()) {
        checked.k_values = default_k_values(checked.varied_component);
    }
    checked.validate();

    const auto pool = manifest.with_role(Role::reference_pool);
    constexpr int kFixed = 15;  // every non-varied component keeps the top 15
    const auto fixed_refs = select_references(pool, kFixed);

    const std::vector<SweepSpec::Component> parts = {
        SweepSpec::Component::icl, SweepSpec::Component::speaker_emb,
        SweepSpec::Component::style_emb, SweepSpec::Component::decoder_ft};

    std::vector<JobPlan> plan;
    for (int k : checked.k_values) {
        const auto varied_refs = select_references(pool, k);
        JobPlan job;
        job.job_id = "ksweep_" + component_name(checked.varied_component) + "_k" +
                     std::to_string(k);
        job.condition = "adapt_llm";
        job.x = k;
        job.seed = SeedMixer()
                       .mix(checked.master_seed)
                       .mix("k_sweep")
                       .mix(component_name(checked.varied_component))
                       .mix(static_cast<uint64_t>(k))
                       .value();
        for (auto part : parts) {
            const bool varied =
                checked.varied_component == SweepSpec::Component::joint
                    ? part != SweepSpec::Component::icl
                    : part == checked.varied_component;
            job.component_refs[component_name(part)] =
                varied ? varied_refs : fixed_refs;
        }
        job.expected_outputs = {"accsim", "utmos"};
        plan.push_back(std::move(job));
    }
    return plan;
}

std::string DisjointnessReport::to_text() const {
    if (violations.empty()) return "ok: no violations\n";
    std::string out;
    for (const auto& v : violations) {
        out += v.kind + "\tspeaker=" + v.speaker + "\t" + v.first_id + "\t" +
               v.second_id + "\t" + v.detail + "\n";
    }
    return out;
}

DisjointnessReport check_disjointness(const Manifest& manifest) {
    DisjointnessReport report;

    // reference/eval id overlap, per speaker
    std::map<std::string, std::set<std::string>> ref_ids, eval_ids;
    for (const auto& e : manifest.entries) {
        if (e.role == Role::reference_pool) ref_ids[e.speaker_id].insert(e.utt_id);
        if (e.role == Role::eval) eval_ids[e.speaker_id].insert(e.utt_id);
    }
    for (const auto& [speaker, refs] : ref_ids) {
        auto it = eval_ids.find(speaker);
        if (it == eval_ids.end()) continue;
        for (const auto& id : refs) {
            if (it->second.count(id)) {
                report.violations.push_back(
                    {"id_overlap", speaker, id, id,
                     "utterance is in both reference_pool and eval"});
            }
        }
    }

    // train/eval transcript-text overlap on normalized text
    std::vector<const ManifestEntry*> train, eval;
    for (const auto& e : manifest.entries) {
        if (e.text.empty()) continue;
        if (e.role == Role::adaptation_train || e.role == Role::synthetic) {
            train.push_back(&e);
        } else if (e.role == Role::eval) {
            eval.push_back(&e);
        }
    }
    std::map<std::string, std::vector<const ManifestEntry*>> eval_by_text;
    for (const auto* e : eval) {
        std::string key;
        for (const auto& w : normalize_text(e->text).words) key += w + " ";
        if (!key.empty()) eval_by_text[key].push_back(e);
    }
    for (const auto* t : train) {
        std::string key;
        for (const auto& w : normalize_text(t->text).words) key += w + " ";
        if (key.empty()) continue;
        auto it = eval_by_text.find(key);
        if (it == eval_by_text.end()) continue;
        for (const auto* e : it->second) {
            report.violations.push_back(
                {"text_overlap", e->speaker_id, t->utt_id, e->utt_id,
                 "train and eval share transcript text"});
        }
    }

    std::sort(report.violations.begin(), report.violations.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(a.kind, a.speaker, a.first_id, a.second_id) <
                         std::tie(b.kind, b.speaker, b.first_id, b.second_id);
              });
    return report;
}

IngestResult parse_results_csv(const std::string& content,
                               const std::vector<JobPlan>& plan) {
    std::set<std::string> known;
    for (const auto& j : plan) known.insert(j.job_id);

    IngestResult result;
    std::set<std::pair<std::string, std::string>> seen;
    std::istringstream in(content);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        for (auto& f : fields) {
            const size_t b = f.find_first_not_of(" \t");
            const size_t e = f.find_last_not_of(" \t");
            f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
        }
        if (fields.size() == 3 && fields[0] == "job_id" && fields[1] == "metric" &&
            fields[2] == "value") {
            continue;  // header row
        }

        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            result.rejects.push_back(
                {lineno, "MalformedRecord", "expected job_id,metric,value"});
            continue;
        }
        char* end = nullptr;
        const double value = std::strtod(fields[2].c_str(), &end);
        if (end != fields[2].c_str() + fields[2].size()) {
            result.rejects.push_back(
                {lineno, "MalformedRecord", "bad value '" + fields[2] + "'"});
            continue;
        }
        if (!known.count(fields[0])) {
            result.rejects.push_back(
                {lineno, "UnknownJob", "job '" + fields[0] + "' is not planned"});
            continue;
        }
        if (!seen.insert({fields[0], fields[1]}).second) {
            result.rejects.push_back(
                {lineno, "Duplicate",
                 "duplicate record for (" + fields[0] + ", " + fields[1] + ")"});
            continue;
        }

        RunRecord rec;
        rec.job_id = fields[0];
        const size_t colon = fields[1].find(':');
        rec.metric = colon == std::string::npos ? fields[1]
                                                : fields[1].substr(0, colon);
        rec.speaker = colon == std::string::npos ? "-" : fields[1].substr(colon + 1);
        rec.value = value;
        rec.external = true;
        result.records.push_back(std::move(rec));
    }
    return result;
}

IngestResult ingest_results(const std::string& path,
                            const std::vector<JobPlan>& plan) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_results_csv(ss.str(), plan);
}

namespace {

std::string format_fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

Report build_report(const std::vector<RunRecord>& records,
                    const std::vector<JobPlan>& plan) {
    std::map<std::string, const JobPlan*> jobs;
    std::map<std::pair<std::string, int>, int> group_sizes;  // (condition, x) -> runs
    for (const auto& j : plan) {
        jobs[j.job_id] = &j;
        ++group_sizes[{j.condition, j.x}];
    }

    // (metric, condition, speaker, x) -> values
    std::map<std::tuple<std::string, std::string, std::string, int>,
             std::vector<double>>
        groups;
    for (const auto& r : records) {
        auto it = jobs.find(r.job_id);
        if (it == jobs.end()) {
            throw InvariantViolation("record references unplanned job " + r.job_id);
        }
        groups[{r.metric, it->second->condition, r.speaker, it->second->x}]
            .push_back(r.value);
    }

    Report report;
    for (const auto& [key, values] : groups) {
        const auto& [metric, condition, speaker, x] = key;
        const RunAggregate agg = aggregate_runs(values);
        ReportRow row;
        row.metric = metric;
        row.condition = condition;
        row.speaker = speaker;
        row.x = x;
        row.mean = agg.mean;
        row.stddev = agg.stddev;
        row.n_runs = agg.n_runs;
        row.expected_runs = group_sizes[{condition, x}];
        if (row.n_runs < row.expected_runs) {
            report.warnings.push_back(
                "missing runs for " + condition + " x=" + std::to_string(x) +
                " metric=" + metric + " speaker=" + speaker + ": " +
                std::to_string(row.n_runs) + "/" + std::to_string(row.expected_runs));
        }
        report.rows.push_back(std::move(row));
    }

    // series per (metric, speaker, condition)
    std::map<std::tuple<std::string, std::string, std::string>, PlotSeries> series;
    for (const auto& row : report.rows) {
        auto& s = series[{row.metric, row.speaker, row.condition}];
        s.metric = row.metric;
        s.speaker = row.speaker;
        s.condition = row.condition;
        s.points.push_back({static_cast<double>(row.x), row.mean, row.stddev});
    }
    for (auto& [key, s] : series) {
        std::sort(s.points.begin(), s.points.end(),
                  [](const auto& a, const auto& b) { return a[0] < b[0]; });
        report.series.push_back(s);
    }

    // gap series between the matched-rate random control and the llm edits
    std::map<std::tuple<std::string, std::string>,
             std::pair<const PlotSeries*, const PlotSeries*>>
        pairs;
    for (const auto& s : report.series) {
        if (s.condition == "adapt_random") pairs[{s.metric, s.speaker}].first = &s;
        if (s.condition == "adapt_llm") pairs[{s.metric, s.speaker}].second = &s;
    }
    std::vector<PlotSeries> gaps;
    for (const auto& [key, pr] : pairs) {
        if (!pr.first || !pr.second) continue;
        PlotSeries gap;
        gap.metric = std::get<0>(key);
        gap.speaker = std::get<1>(key);
        gap.condition = "gap_adapt_random_minus_adapt_llm";
        for (const auto& a : pr.first->points) {
            for (const auto& b : pr.second->points) {
                if (a[0] == b[0]) gap.points.push_back({a[0], a[1] - b[1], 0.0});
            }
        }
        if (!gap.points.empty()) gaps.push_back(std::move(gap));
    }
    for (auto& g : gaps) report.series.push_back(std::move(g));

    return report;
}

std::string report_csv(const Report& report) {
    std::string out = "condition,speaker,x,metric,mean,std,n_runs\n";
    for (const auto& r : report.rows) {
        out += r.condition + "," + r.speaker + "," + std::to_string(r.x) + "," +
               r.metric + "," + format_fixed6(r.mean) + "," +
               format_fixed6(r.stddev) + "," + std::to_string(r.n_runs) + "\n";
    }
    return out;
}

std::string plot_data(const Report& report) {
    std::string out;
    for (const auto& s : report.series) {
        out += "# condition=" + s.condition + " metric=" + s.metric +
               " speaker=" + s.speaker + "\n";
        for (const auto& p : s.points) {
            out += std::to_string(static_cast<long long>(p[0])) + " " +
                   format_fixed6(p[1]) + " " + format_fixed6(p[2]) + "\n";
        }
        out += "\n";
    }
    return out;
}

namespace {

json job_to_json(const JobPlan& j) {
    json o;
    o["job_id"] = j.job_id;
    o["condition"] = j.condition;
    o["x"] = j.x;
    o["run"] = j.run;
    o["seed"] = j.seed;
    o["train_real"] = j.train_real;
    o["train_synth"] = j.train_synth;
    if (!j.component_refs.empty()) o["component_refs"] = j.component_refs;
    o["expected_outputs"] = j.expected_outputs;
    return o;
}

JobPlan job_from_json(const json& o) {
    JobPlan j;
    j.job_id = o.at("job_id").get<std::string>();
    j.condition = o.at("condition").get<std::string>();
    j.x = o.at("x").get<int>();
    j.run = o.at("run").get<int>();
    j.seed = o.at("seed").get<uint64_t>();
    j.train_real = o.at("train_real").get<std::vector<std::string>>();
    j.train_synth = o.at("train_synth").get<std::vector<std::string>>();
    if (o.contains("component_refs")) {
        j.component_refs =
            o.at("component_refs")
                .get<std::map<std::string, std::vector<std::string>>>();
    }
    j.expected_outputs = o.at("expected_outputs").get<std::vector<std::string>>();
    return j;
}

}  // namespace

void write_plan_file(const std::string& path, const std::vector<JobPlan>& plan) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    for (const auto& j : plan) out << job_to_json(j).dump() << "\n";
}

std::vector<JobPlan> read_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::vector<JobPlan> plan;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        try {
            plan.push_back(job_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw SyntaxError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return plan;
}

}  // namespace accentkit
