// Command-line front end: extract / edit / eval / sweep / validate-manifest.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "accentkit/config.hpp"
#include "accentkit/editops.hpp"
#include "accentkit/evalkit.hpp"
#include "accentkit/harness.hpp"
#include "accentkit/llmedit.hpp"
#include "accentkit/parallel.hpp"
#include "accentkit/prosody.hpp"
#include "accentkit/rng.hpp"
#include "accentkit/textgrid.hpp"
#include "accentkit/utterance.hpp"
#include "accentkit/wav.hpp"

namespace fs = std::filesystem;
using namespace accentkit;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<int> workers;
    bool verbose = false;
};

PipelineConfig effective_config(const GlobalOpts& g) {
    PipelineConfig cfg;
    if (!g.config_path.empty()) cfg = load_config(g.config_path);
    if (g.seed) cfg.master_seed = *g.seed;
    if (g.workers) cfg.workers = std::max(1, *g.workers);
    return cfg;
}

void info(const GlobalOpts& g, const std::string& msg) {
    if (g.verbose) std::cerr << msg << "\n";
}

std::vector<std::string> read_lines_skipping_comments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        out.push_back(line);
    }
    return out;
}

// ---------------------------------------------------------------- extract

int run_extract(const GlobalOpts& g, const std::string& wav_dir,
                const std::string& align_dir, const std::string& out_path) {
    const PipelineConfig cfg = effective_config(g);

    std::vector<fs::path> wavs;
    for (const auto& e : fs::directory_iterator(wav_dir)) {
        if (e.is_regular_file() && e.path().extension() == ".wav") {
            wavs.push_back(e.path());
        }
    }
    std::sort(wavs.begin(), wavs.end());
    if (wavs.empty()) {
        std::cerr << "warning: no .wav files in " << wav_dir << "\n";
        std::ofstream(out_path).flush();
        return 0;
    }

    auto find_alignment = [&](const std::string& stem) -> std::string {
        for (const char* ext : {".TextGrid", ".textgrid", ".tsv", ".txt"}) {
            const fs::path p = fs::path(align_dir) / (stem + ext);
            if (fs::exists(p)) return p.string();
        }
        return {};
    };

    struct Item {
        std::string stem;
        std::string line;   // serialized utterance, empty on failure
        std::string error;  // failure reason
        std::vector<std::string> warnings;
    };
    std::vector<Item> items(wavs.size());

    parallel_for(wavs.size(), cfg.workers, [&](size_t i) {
        Item& item = items[i];
        item.stem = wavs[i].stem().string();
        try {
            const std::string align = find_alignment(item.stem);
            if (align.empty()) {
                throw FileError("no alignment file for " + item.stem + " in " +
                                align_dir);
            }
            WavReadInfo winfo;
            WaveBuffer wave = read_wav(wavs[i].string(), &winfo);
            item.warnings = winfo.warnings;
            if (wave.sample_rate != 22050) {
                item.warnings.push_back(item.stem + " is " +
                                        std::to_string(wave.sample_rate) +
                                        " Hz, resampling to 22050");
                wave = resample_linear(wave, 22050);
            }
            const FrameTrack track = make_frame_track(wave, cfg.mel, cfg.pitch);
            const PhoneIntervals intervals = read_alignment(align);
            const AlignedUtterance u = aggregate(track, intervals, cfg.mel,
                                                 wave.sample_rate,
                                                 cfg.fallback_log_f0);
            if (u.size() == 0) throw CoverageError("alignment has no phonemes");
            item.line = serialize_sequence(u);
        } catch (const std::exception& e) {
            item.error = e.what();
        }
    });

    std::ofstream out(out_path);
    if (!out) throw FileError("cannot write " + out_path);
    size_t ok = 0;
    for (const auto& item : items) {
        for (const auto& w : item.warnings) std::cerr << "warning: " << w << "\n";
        if (item.error.empty()) {
            out << "# " << item.stem << "\n" << item.line << "\n";
            ++ok;
        } else {
            std::cerr << "extract failed for " << item.stem << ": " << item.error
                      << "\n";
        }
    }
    info(g, "extracted " + std::to_string(ok) + "/" + std::to_string(items.size()));
    return ok == 0 ? 1 : 0;
}

// ------------------------------------------------------------------- edit

struct EditOutcome {
    AlignedUtterance edited;
    EditScript script;
    double realized_rate = 0.0;
    int attempts = 0;
    bool fallback = false;
    std::string error;
};

int write_edit_outputs(const std::vector<AlignedUtterance>& sources,
                       const std::vector<EditOutcome>& outcomes,
                       const std::string& out_path,
                       const std::string& scripts_path,
                       const std::string& stats_path) {
    std::ofstream out(out_path);
    if (!out) throw FileError("cannot write " + out_path);
    std::ofstream scripts(scripts_path);
    if (!scripts) throw FileError("cannot write " + scripts_path);

    nlohmann::json per = nlohmann::json::array();
    double rate_sum = 0.0;
    int fallbacks = 0, failures = 0, ok = 0;
    for (size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        if (!o.error.empty()) {
            ++failures;
            std::cerr << "edit failed for utterance " << i << ": " << o.error << "\n";
            continue;
        }
        ++ok;
        out << "# " << i << "\n" << serialize_sequence(o.edited) << "\n";
        scripts << "# " << i << "\n" << serialize_script(o.script) << "\n";
        rate_sum += o.realized_rate;
        fallbacks += o.fallback ? 1 : 0;
        per.push_back({{"index", i},
                       {"change_rate", o.realized_rate},
                       {"attempts", o.attempts},
                       {"fallback", o.fallback}});
    }

    nlohmann::json stats = {
        {"utterances", sources.size()},
        {"edited", ok},
        {"failures", failures},
        {"fallbacks", fallbacks},
        {"mean_change_rate", ok > 0 ? rate_sum / ok : 0.0},
        {"per_utterance", per},
    };
    std::ofstream st(stats_path);
    if (!st) throw FileError("cannot write " + stats_path);
    st << stats.dump(2) << "\n";

    return (ok == 0 && !sources.empty()) ? 1 : 0;
}

int run_edit_random(const GlobalOpts& g, const std::string& in_path, double rate,
                    uint64_t seed, const std::string& out_path,
                    const std::string& scripts_path, const std::string& stats_path) {
    const auto sources = read_utterance_file(in_path);
    std::vector<EditOutcome> outcomes(sources.size());
    for (size_t i = 0; i < sources.size(); ++i) {
        auto& o = outcomes[i];
        try {
            const uint64_t utt_seed =
                SeedMixer().mix(seed).mix("edit_random").mix(i).value();
            auto [edited, script] = random_matched_rate(sources[i], rate, utt_seed);
            o.realized_rate = change_rate(sources[i], edited);
            o.edited = std::move(edited);
            o.script = std::move(script);
            o.attempts = 1;
        } catch (const std::exception& e) {
            o.error = e.what();
        }
    }
    info(g, "random edit with rate " + std::to_string(rate));
    return write_edit_outputs(sources, outcomes, out_path, scripts_path, stats_path);
}

int run_edit_oracle(const GlobalOpts& g, const std::string& in_path,
                    const std::string& pcl_path, const std::string& out_path,
                    const std::string& scripts_path, const std::string& stats_path) {
    const auto sources = read_utterance_file(in_path);
    const auto pcl_lines = read_lines_skipping_comments(pcl_path);
    if (pcl_lines.size() != sources.size()) {
        throw InsufficientDataError(
            "PCL file has " + std::to_string(pcl_lines.size()) +
            " sequences for " + std::to_string(sources.size()) + " utterances");
    }

    std::vector<EditOutcome> outcomes(sources.size());
    for (size_t i = 0; i < sources.size(); ++i) {
        auto& o = outcomes[i];
        try {
            std::istringstream ls(pcl_lines[i]);
            std::vector<std::string> tokens;
            std::string tok;
            while (ls >> tok) tokens.push_back(tok);
            const auto target = validate_inventory(tokens);
            EditScript script = diff_to_script(sources[i], target);
            o.edited = apply_script(sources[i], script);
            o.realized_rate = change_rate(sources[i], o.edited);
            o.script = std::move(script);
            o.attempts = 1;
        } catch (const std::exception& e) {
            o.error = e.what();
        }
    }
    info(g, "oracle edit from " + pcl_path);
    return write_edit_outputs(sources, outcomes, out_path, scripts_path, stats_path);
}

int run_edit_llm(const GlobalOpts& g, const std::string& in_path,
                 const std::string& examples_path, int k,
                 const std::string& accent, const std::string& out_path,
                 const std::string& scripts_path, const std::string& stats_path) {
    const PipelineConfig cfg = effective_config(g);
    const auto sources = read_utterance_file(in_path);

    std::vector<IclExample> pool;
    if (!examples_path.empty()) pool = read_icl_example_file(examples_path);
    const size_t want = k < 0 ? pool.size() : static_cast<size_t>(k);
    const auto examples = select_icl_examples(pool, want);
    info(g, "using " + std::to_string(examples.size()) + " in-context examples");

    const auto backend = make_backend(cfg);
    std::vector<EditOutcome> outcomes(sources.size());
    parallel_for(sources.size(), cfg.workers, [&](size_t i) {
        auto& o = outcomes[i];
        try {
            const PromptSpec spec = make_prompt_spec(examples, sources[i], accent);
            const EditResponse resp =
                edit_with_llm(sources[i], spec, *backend, cfg.retry_budget);
            o.realized_rate = change_rate(sources[i], resp.edited);
            o.edited = resp.edited;
            o.script = resp.script;
            o.attempts = resp.attempts_used;
            o.fallback = resp.fallback;
        } catch (const std::exception& e) {
            o.error = e.what();
        }
    });
    return write_edit_outputs(sources, outcomes, out_path, scripts_path, stats_path);
}

// ------------------------------------------------------------------- eval

std::string format4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

int run_eval_wer(const std::string& ref_path, const std::string& hyp_path,
                 const std::string& out_path, const std::string& score_out,
                 const std::string& condition) {
    const auto refs = read_transcript_file(ref_path);
    std::map<std::string, std::string> hyps;
    for (const auto& [id, text] : read_transcript_file(hyp_path)) hyps[id] = text;

    std::ofstream out(out_path);
    if (!out) throw FileError("cannot write " + out_path);
    out << "utt_id,ref_words,sub,del,ins,wer\n";

    long total_words = 0, total_errors = 0;
    std::vector<double> per_utterance;
    for (const auto& [id, text] : refs) {
        const Transcript ref = normalize_text(text);
        if (ref.empty()) {
            std::cerr << "skipping " << id << ": empty reference after "
                      << "normalization\n";
            continue;
        }
        const auto it = hyps.find(id);
        if (it == hyps.end()) {
            std::cerr << "skipping " << id << ": no hypothesis\n";
            continue;
        }
        const Transcript hyp = normalize_text(it->second);
        const EditCounts c = word_edit_counts(ref, hyp);
        const double w = static_cast<double>(c.total()) / ref.words.size();
        out << id << "," << ref.words.size() << "," << c.substitutions << ","
            << c.deletions << "," << c.insertions << "," << format4(w) << "\n";
        total_words += static_cast<long>(ref.words.size());
        total_errors += c.total();
        per_utterance.push_back(w);
    }
    if (per_utterance.empty()) {
        std::cerr << "no utterance pairs scored\n";
        return 1;
    }
    out << "OVERALL," << total_words << ",,,,"
        << format4(static_cast<double>(total_errors) / total_words) << "\n";

    if (!score_out.empty()) {
        const RunAggregate agg = aggregate_runs(per_utterance);
        std::ofstream sc(score_out);
        if (!sc) throw FileError("cannot write " + score_out);
        sc << score_csv({{condition, "-", "wer", agg.mean, agg.stddev, agg.n_runs}});
    }
    return 0;
}

int run_eval_accsim(const std::string& synth_path,
                    const std::vector<std::string>& real_specs,
                    const std::string& out_path, const std::string& condition) {
    const auto synth = read_embedding_file(synth_path);
    std::map<std::string, std::vector<EmbeddingVector>> real;
    for (const auto& spec : real_specs) {
        const size_t eq = spec.find('=');
        if (eq == std::string::npos) {
            throw SyntaxError("--real expects SPEAKER=FILE, got " + spec);
        }
        real[spec.substr(0, eq)] = read_embedding_file(spec.substr(eq + 1));
    }
    const double score = accent_similarity(synth, real);
    std::ofstream out(out_path);
    if (!out) throw FileError("cannot write " + out_path);
    out << score_csv({{condition, "-", "accsim", score, 0.0,
                       static_cast<int>(synth.size())}});
    return 0;
}

// ------------------------------------------------------------------ sweep

int run_sweep(const GlobalOpts& g, const std::string& manifest_path,
              const std::string& kind, const std::string& component,
              std::vector<int> k_values, std::vector<int> n_values, int runs,
              int synth_budget, const std::string& out_dir,
              const std::string& scores_path) {
    const PipelineConfig cfg = effective_config(g);
    const Manifest manifest = read_manifest(manifest_path);

    SweepSpec spec;
    spec.runs = runs;
    spec.synth_budget = synth_budget;
    spec.master_seed = cfg.master_seed;
    std::vector<JobPlan> plan;
    if (kind == "n_scaling") {
        spec.kind = SweepSpec::Kind::n_scaling;
        spec.n_values = std::move(n_values);
        plan = plan_scaling(spec, manifest);
    } else if (kind == "k_sweep") {
        spec.kind = SweepSpec::Kind::k_sweep;
        spec.varied_component = parse_component(component);
        spec.k_values = std::move(k_values);
        plan = plan_k_sweep(spec, manifest);
    } else {
        throw SyntaxError("--kind must be n_scaling or k_sweep");
    }

    fs::create_directories(out_dir);
    const std::string plan_path = (fs::path(out_dir) / "plan.jsonl").string();
    write_plan_file(plan_path, plan);
    info(g, "wrote " + std::to_string(plan.size()) + " jobs to " + plan_path);

    const DisjointnessReport disjoint = check_disjointness(manifest);
    {
        std::ofstream out(fs::path(out_dir) / "disjointness.txt");
        out << disjoint.to_text();
    }
    if (!disjoint.clean()) {
        std::cerr << "warning: " << disjoint.violations.size()
                  << " disjointness violations (see disjointness.txt)\n";
    }

    if (!scores_path.empty()) {
        const IngestResult ingest = ingest_results(scores_path, plan);
        for (const auto& r : ingest.rejects) {
            std::cerr << "rejected score line " << r.line << " (" << r.kind
                      << "): " << r.reason << "\n";
        }
        const Report report = build_report(ingest.records, plan);
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
        {
            std::ofstream out(fs::path(out_dir) / "report.csv");
            out << report_csv(report);
        }
        {
            std::ofstream out(fs::path(out_dir) / "plot.dat");
            out << plot_data(report);
        }
        info(g, "report covers " + std::to_string(ingest.records.size()) +
                    " records");
        if (ingest.records.empty() && !ingest.rejects.empty()) return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"accentkit: aligned phoneme-prosody editing and evaluation"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file");
    uint64_t seed_opt = 0;
    auto* seed_flag = app.add_option("--seed", seed_opt, "master seed override");
    int workers_opt = 0;
    auto* workers_flag =
        app.add_option("--workers", workers_opt, "worker thread count");
    app.add_flag("--verbose", g.verbose, "verbose progress on stderr");

    // extract
    auto* extract = app.add_subcommand(
        "extract", "waveforms + alignments -> aligned utterance file");
    std::string wav_dir, align_dir, out_path;
    extract->add_option("--wav-dir", wav_dir, "directory of .wav files")->required();
    extract->add_option("--align-dir", align_dir,
                        "directory of .TextGrid/.tsv alignments")->required();
    extract->add_option("--out", out_path, "output utterance file")->required();

    // edit
    auto* edit = app.add_subcommand("edit", "apply pronunciation edits");
    std::string edit_in, edit_mode, edit_out, edit_scripts, edit_stats;
    std::string examples_path, pcl_path, accent = "target";
    double rate = 0.0;
    uint64_t edit_seed = 0;
    int icl_k = -1;
    edit->add_option("--in", edit_in, "input utterance file")->required();
    edit->add_option("--mode", edit_mode, "llm | random | oracle")->required();
    edit->add_option("--out", edit_out, "edited utterance file")->required();
    edit->add_option("--scripts", edit_scripts, "edit script output")->required();
    edit->add_option("--stats", edit_stats, "stats JSON output")->required();
    edit->add_option("--rate", rate, "substitution rate (random mode)");
    auto* edit_seed_opt = edit->add_option("--seed", edit_seed, "seed (random mode)");
    edit->add_option("--examples", examples_path, "ICL example file (llm mode)");
    edit->add_option("--k", icl_k, "ICL examples to use, -1 = all (llm mode)");
    edit->add_option("--accent", accent, "accent label for prompts (llm mode)");
    edit->add_option("--pcl", pcl_path, "target phoneme file (oracle mode)");

    // eval
    auto* eval = app.add_subcommand("eval", "compute metrics");
    std::string eval_kind, ref_path, hyp_path, synth_path, eval_out;
    std::string eval_score_out, eval_condition = "-";
    std::vector<std::string> real_specs;
    eval->add_option("--kind", eval_kind, "wer | accsim")->required();
    eval->add_option("--ref", ref_path, "reference transcripts (wer)");
    eval->add_option("--hyp", hyp_path, "hypothesis transcripts (wer)");
    eval->add_option("--synth", synth_path, "synthesized embeddings (accsim)");
    eval->add_option("--real", real_specs,
                     "SPEAKER=FILE real embeddings, repeatable (accsim)");
    eval->add_option("--out", eval_out, "output CSV")->required();
    eval->add_option("--score-out", eval_score_out,
                     "aggregate score CSV (wer)");
    eval->add_option("--condition", eval_condition,
                     "condition label for the score CSV");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "emit experiment job plans");
    std::string manifest_path, sweep_kind, component = "icl", scores_path, sweep_dir;
    std::vector<int> k_values, n_values;
    int runs = 7, synth_budget = 500;
    sweep->add_option("--manifest", manifest_path, "dataset manifest")->required();
    sweep->add_option("--kind", sweep_kind, "n_scaling | k_sweep")->required();
    sweep->add_option("--component", component,
                      "icl | speaker_emb | style_emb | decoder_ft | joint");
    sweep->add_option("--k", k_values, "K values (k_sweep)");
    sweep->add_option("--n", n_values, "N values (n_scaling)");
    sweep->add_option("--runs", runs, "runs per point");
    sweep->add_option("--synth-budget", synth_budget, "fixed synthetic set size");
    sweep->add_option("--out-dir", sweep_dir, "output directory")->required();
    sweep->add_option("--scores", scores_path, "external score CSV to ingest");

    // validate-manifest
    auto* validate = app.add_subcommand("validate-manifest",
                                        "check reference/eval disjointness");
    std::string vm_path;
    validate->add_option("--manifest", vm_path, "dataset manifest")->required();

    CLI11_PARSE(app, argc, argv);
    if (*seed_flag) g.seed = seed_opt;
    if (*workers_flag) g.workers = workers_opt;

    try {
        if (*extract) return run_extract(g, wav_dir, align_dir, out_path);
        if (*edit) {
            const uint64_t seed = edit_seed_opt->count() > 0
                                      ? edit_seed
                                      : effective_config(g).master_seed;
            if (edit_mode == "random") {
                return run_edit_random(g, edit_in, rate, seed, edit_out,
                                       edit_scripts, edit_stats);
            }
            if (edit_mode == "oracle") {
                if (pcl_path.empty()) throw SyntaxError("oracle mode needs --pcl");
                return run_edit_oracle(g, edit_in, pcl_path, edit_out, edit_scripts,
                                       edit_stats);
            }
            if (edit_mode == "llm") {
                return run_edit_llm(g, edit_in, examples_path, icl_k, accent,
                                    edit_out, edit_scripts, edit_stats);
            }
            throw SyntaxError("--mode must be llm, random or oracle");
        }
        if (*eval) {
            if (eval_kind == "wer") {
                if (ref_path.empty() || hyp_path.empty()) {
                    throw SyntaxError("wer needs --ref and --hyp");
                }
                return run_eval_wer(ref_path, hyp_path, eval_out, eval_score_out,
                                    eval_condition);
            }
            if (eval_kind == "accsim") {
                if (synth_path.empty() || real_specs.empty()) {
                    throw SyntaxError("accsim needs --synth and --real");
                }
                return run_eval_accsim(synth_path, real_specs, eval_out,
                                       eval_condition);
            }
            throw SyntaxError("--kind must be wer or accsim");
        }
        if (*sweep) {
            return run_sweep(g, manifest_path, sweep_kind, component, k_values,
                             n_values, runs, synth_budget, sweep_dir, scores_path);
        }
        if (*validate) {
            const DisjointnessReport report =
                check_disjointness(read_manifest(vm_path));
            std::cout << report.to_text();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
