// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "accentkit/editops.hpp"
#include "accentkit/evalkit.hpp"
#include "accentkit/harness.hpp"
#include "accentkit/llmedit.hpp"
#include "accentkit/prosody.hpp"
#include "accentkit/utterance.hpp"
#include "oracles.hpp"

using namespace accentkit;

namespace {

int failures = 0;
std::string detail;

void check(bool cond, const std::string& what) {
    if (!cond && detail.empty()) detail = what;
}

void criterion(int number, const std::string& name, const std::function<void()>& fn) {
    detail.clear();
    try {
        fn();
    } catch (const std::exception& e) {
        if (detail.empty()) detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
        std::printf("[PASS] criterion %2d: %s\n", number, name.c_str());
    } else {
        std::printf("[FAIL] criterion %2d: %s -- %s\n", number, name.c_str(),
                    detail.c_str());
        ++failures;
    }
    std::fflush(stdout);
}

const std::string kWillLine =
    "W IH1 L | d:10,7,7 | p:5.3,5.3,5.2 | e:0.8,3.6,3.1";

WaveBuffer sine(double freq, double seconds, double amp = 1.0) {
    WaveBuffer w;
    w.sample_rate = 22050;
    const size_t n = static_cast<size_t>(seconds * w.sample_rate);
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        w.samples[i] = amp * std::sin(2.0 * M_PI * freq * i / w.sample_rate);
    }
    return w;
}

double median_f0(const std::vector<std::optional<double>>& track) {
    std::vector<double> f0;
    for (const auto& v : track) {
        if (v) f0.push_back(std::exp(*v));
    }
    if (f0.empty()) return 0.0;
    std::sort(f0.begin(), f0.end());
    return f0[f0.size() / 2];
}

// ------------------------------------------------------------ criteria

void worked_example_fidelity() {
    const auto t0 = std::chrono::steady_clock::now();

    const AlignedUtterance source = parse_sequence(kWillLine);
    MockRuleBackend backend({{"W", "V"}}, 1.0);
    const PromptSpec spec = make_prompt_spec({}, source, "Indian English");
    const EditResponse resp = edit_with_llm(source, spec, backend, 3);

    check(!resp.fallback, "mock pipeline fell back");
    check(resp.edited.phonemes.size() == 3 &&
              resp.edited.phonemes[0].text() == "V" &&
              resp.edited.phonemes[1].text() == "IH1" &&
              resp.edited.phonemes[2].text() == "L",
          "edited phonemes are not V IH1 L");
    check(resp.edited.durations == source.durations, "durations changed");
    check(resp.edited.pitch == source.pitch, "pitch not bit-identical");
    check(resp.edited.energy == source.energy, "energy not bit-identical");

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check(elapsed < 1.0, "took " + std::to_string(elapsed) + " s (limit 1)");
}

void matched_rate_exactness() {
    Rng gen(0xac2);
    for (int iter = 0; iter < 200; ++iter) {
        const AlignedUtterance src = oracles::random_utterance(gen, 5, 80);
        const double rate = iter % 2 == 0 ? 0.19 : 0.35;
        const auto [out, script] = random_matched_rate(src, rate, 1000 + iter);
        const long expected = std::lround(rate * static_cast<double>(src.size()));
        check(phoneme_edit_distance(src.phonemes, out.phonemes) == expected,
              "realized distance != round(rate*L) at iter " + std::to_string(iter));
        check(static_cast<long>(script.ops.size()) == expected, "op count mismatch");
        for (const auto& op : script.ops) {
            check(op.sym1.base != src.phonemes[op.index].base,
                  "replacement kept the original base symbol");
        }
    }
}

void edit_distance_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng gen(0xed0);
    for (int iter = 0; iter < 1000; ++iter) {
        const auto a = oracles::random_phonemes(gen, 1, 20, 8);
        const auto b = oracles::random_phonemes(gen, 1, 20, 8);
        check(phoneme_edit_distance(a, b) == oracles::levenshtein_full(a, b),
              "phoneme distance mismatch at iter " + std::to_string(iter));
    }
    const char* alphabet[5] = {"ka", "ke", "ki", "ko", "ku"};
    for (int iter = 0; iter < 1000; ++iter) {
        Transcript a, b;
        const size_t la = gen.below(13), lb = gen.below(13);
        for (size_t i = 0; i < la; ++i) a.words.push_back(alphabet[gen.below(5)]);
        for (size_t i = 0; i < lb; ++i) b.words.push_back(alphabet[gen.below(5)]);
        check(word_edit_counts(a, b).total() ==
                  oracles::levenshtein_full(a.words, b.words),
              "word distance mismatch at iter " + std::to_string(iter));
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check(elapsed < 10.0, "took " + std::to_string(elapsed) + " s (limit 10)");
}

void diff_soundness() {
    Rng gen(0xd1f);
    for (int iter = 0; iter < 1000; ++iter) {
        const AlignedUtterance src = oracles::random_utterance(gen, 1, 15);
        const auto target = oracles::random_phonemes(gen, 1, 15, 12);
        const AlignedUtterance out = apply_script(src, diff_to_script(src, target));
        check(out.phonemes == target,
              "diff+apply missed the target at iter " + std::to_string(iter));
    }
}

void pitch_tracker_accuracy() {
    const MelConfig cfg{};
    for (double freq : {110.0, 220.0, 330.0}) {
        const auto track = track_pitch(sine(freq, 1.0), cfg);
        const double med = median_f0(track);
        check(std::fabs(med - freq) <= 3.0,
              std::to_string(freq) + " Hz tone recovered as " + std::to_string(med));
    }
    WaveBuffer quiet;
    quiet.sample_rate = 22050;
    quiet.samples.assign(22050, 0.0);
    for (const auto& v : track_pitch(quiet, cfg)) {
        check(!v.has_value(), "silence produced a voiced frame");
    }
}

void energy_homogeneity() {
    const MelConfig cfg{};  // 80 mels, 1024-point FFT, hop 256, 0-8 kHz
    WaveBuffer w = sine(220.0, 0.5, 0.9);
    const auto base = mel_energy(w, cfg);
    const double alpha = 0.37;
    for (auto& s : w.samples) s *= alpha;
    const auto scaled = mel_energy(w, cfg);
    for (size_t i = 0; i < base.size(); ++i) {
        const double want = alpha * base[i];
        const double tol = 1e-9 * std::max(1e-30, std::fabs(want));
        check(std::fabs(scaled[i] - want) <= tol,
              "homogeneity off at frame " + std::to_string(i));
    }

    WaveBuffer zero;
    zero.sample_rate = 22050;
    zero.samples.assign(22050, 0.0);
    for (double v : mel_energy(zero, cfg)) {
        check(v == 0.0, "zero input produced nonzero energy");
    }
}

void normalization_round_trip() {
    Rng gen(0x701);
    for (int iter = 0; iter < 100; ++iter) {
        const AlignedUtterance u = oracles::random_utterance(gen, 1, 30);
        SpeakerStats stats;
        stats.pitch_mean = 4.0 + gen.unit();
        stats.pitch_std = iter % 9 == 0 ? 0.0 : 0.05 + gen.unit();
        stats.energy_mean = gen.unit() * 5.0;
        stats.energy_std = 0.05 + gen.unit();
        stats.n_utterances_used = 1 + static_cast<int>(gen.below(15));
        const AlignedUtterance back = denormalize(normalize(u, stats), stats);
        for (size_t i = 0; i < u.size(); ++i) {
            check(std::fabs(back.pitch[i] - u.pitch[i]) <= 1e-9, "pitch round trip");
            check(std::fabs(back.energy[i] - u.energy[i]) <= 1e-9,
                  "energy round trip");
        }
    }
}

void serialization_round_trip() {
    Rng gen(0x5e1);
    for (int iter = 0; iter < 1000; ++iter) {
        const AlignedUtterance u = oracles::random_utterance(gen, 1, 40, iter % 4 == 0);
        const AlignedUtterance back = parse_sequence(serialize_sequence(u));
        check(approx_equal(u, back, 5.0001e-5),
              "round trip drifted at iter " + std::to_string(iter));
    }

    struct Malformed {
        const char* line;
        const char* kind;
    };
    const Malformed fixtures[] = {
        {"W IH1 L | d:10,7 | p:5.3,5.3,5.2 | e:0.8,3.6,3.1", "alignment"},
        {"W IH1 L | d:10,7,7 | p:5.3,5.3 | e:0.8,3.6,3.1", "alignment"},
        {"QQ | d:1 | p:5.0 | e:1.0", "inventory"},
        {"IH | d:1 | p:5.0 | e:1.0", "inventory"},
        {"B1 | d:1 | p:5.0 | e:1.0", "inventory"},
        {"W | d:1 | p:5.0", "syntax"},
        {"W | d:x | p:5.0 | e:1.0", "syntax"},
        {" | d:1 | p:5.0 | e:1.0", "syntax"},
        {"W | d:0 | p:5.0 | e:1.0", "invariant"},
        {"W IH1 | d:1,1 | p:5,5 | e:1,1 | w:3", "invariant"},
    };
    for (const auto& f : fixtures) {
        bool correct = false;
        try {
            parse_sequence(f.line);
        } catch (const AlignmentError&) {
            correct = std::string(f.kind) == "alignment";
        } catch (const UnknownPhonemeError&) {
            correct = std::string(f.kind) == "inventory";
        } catch (const InvariantViolation&) {
            correct = std::string(f.kind) == "invariant";
        } catch (const SyntaxError&) {
            correct = std::string(f.kind) == "syntax";
        }
        check(correct, std::string("wrong rejection class for: ") + f.line);
    }
}

void accsim_geometry() {
    using Embs = std::vector<EmbeddingVector>;
    std::map<std::string, Embs> one = {{"spk", Embs{{"r", {1, 0, 0}}}}};
    check(std::fabs(accent_similarity(Embs{{"s", {1, 0, 0}}}, one) - 1.0) <= 1e-6,
          "identical direction != 1");
    check(std::fabs(accent_similarity(Embs{{"s", {0, 1, 0}}}, one) - 0.0) <= 1e-6,
          "orthogonal direction != 0");

    std::map<std::string, Embs> two = {{"a", Embs{{"r", {1, 0}}}},
                                       {"b", Embs{{"r", {0, 1}}}}};
    const double inv = 1.0 / std::sqrt(2.0);
    check(std::fabs(accent_similarity(Embs{{"s", {inv, inv}}}, two) -
                    std::cos(M_PI / 4)) <= 1e-6,
          "45-degree case != cos(45)");

    Rng gen(0xa5c);
    std::map<std::string, Embs> real;
    Embs synth;
    for (int s = 0; s < 3; ++s) {
        Embs embs;
        for (int i = 0; i < 4; ++i) {
            std::vector<double> v(6);
            for (auto& x : v) x = gen.unit() - 0.5;
            embs.push_back({"r", v});
        }
        real["spk" + std::to_string(s)] = embs;
    }
    for (int i = 0; i < 5; ++i) {
        std::vector<double> v(6);
        for (auto& x : v) x = gen.unit() - 0.5;
        synth.push_back({"s", v});
    }
    const double base = accent_similarity(synth, real);
    for (int trial = 0; trial < 20; ++trial) {
        auto r2 = real;
        auto s2 = synth;
        for (auto& [spk, embs] : r2) {
            for (auto& e : embs) {
                const double f = 0.01 + 100.0 * gen.unit();
                for (auto& x : e.values) x *= f;
            }
        }
        for (auto& e : s2) {
            const double f = 0.01 + 100.0 * gen.unit();
            for (auto& x : e.values) x *= f;
        }
        check(std::fabs(accent_similarity(s2, r2) - base) <= 1e-9,
              "rescaling moved the score");
    }
}

void validator_robustness() {
    const AlignedUtterance src = parse_sequence(kWillLine);
    using Kind = ValidationFailure::Kind;
    struct Adversarial {
        const char* response;
        Kind kind;
    };
    const Adversarial corpus[] = {
        {"utter nonsense", Kind::parse},
        {"", Kind::parse},
        {"# only thoughts, no answer", Kind::parse},
        {"TARGET: V IH1 L | d:10,7,7 | p:5.3,5.3,5.2 | e:0.8,3.6,3.1\n"
         "TARGET: V IH1 L | d:10,7,7 | p:5.3,5.3,5.2 | e:0.8,3.6,3.1",
         Kind::parse},
        {"TARGET: V IH1 L | d:10,7,7 | p:5.3,5.3,bad | e:0.8,3.6,3.1", Kind::parse},
        {"TARGET: V ZZ L | d:10,7,7 | p:5.3,5.3,5.2 | e:0.8,3.6,3.1",
         Kind::inventory},
        {"TARGET: V IH L | d:10,7,7 | p:5.3,5.3,5.2 | e:0.8,3.6,3.1",
         Kind::inventory},
        {"TARGET: V IH1 L | d:10,7 | p:5.3,5.3,5.2 | e:0.8,3.6,3.1",
         Kind::alignment},
        {"TARGET: V IH1 L | d:10,7,7 | p:5.3,5.3,5.2,9 | e:0.8,3.6,3.1",
         Kind::alignment},
        {"TARGET: V IH1 L | d:10,7,7 | p:5.3,9.9,5.2 | e:0.8,3.6,3.1",
         Kind::prosody_tamper},
        {"TARGET: V IH1 L | d:10,7,7 | p:5.3,5.3,5.2 | e:0.8,3.6,9.9",
         Kind::prosody_tamper},
        {"TARGET: V IH1 L | d:10,9,7 | p:5.3,5.3,5.2 | e:0.8,3.6,3.1",
         Kind::prosody_tamper},
        {"TARGET: W IH1 L N | d:10,7,7,3 | p:5.3,5.3,5.2,5.2 | e:0.8,3.6,3.1,3.1",
         Kind::structural_rule},
        {"TARGET: W IH1 L N | d:10,7,7,7 | p:5.3,5.3,5.2,9.9 | e:0.8,3.6,3.1,3.1",
         Kind::structural_rule},
    };
    for (const auto& a : corpus) {
        const auto result = validate_response(src, a.response);
        const auto* failure = std::get_if<ValidationFailure>(&result);
        check(failure != nullptr, std::string("false accept: ") + a.response);
        if (failure) {
            check(failure->kind == a.kind,
                  std::string("misclassified: ") + a.response);
        }
    }

    // valid responses still pass
    const auto ok = validate_response(
        src, "TARGET: V IH1 L | d:10,7,7 | p:5.3,5.3,5.2 | e:0.8,3.6,3.1");
    check(std::holds_alternative<ValidatedEdit>(ok), "false reject");

    // fallback after the configured retries
    int calls = 0;
    CallbackBackend garbage([&calls](const std::string&) {
        ++calls;
        return std::string("still nonsense");
    });
    const PromptSpec spec = make_prompt_spec({}, src, "x");
    const EditResponse resp = edit_with_llm(src, spec, garbage, 2);
    check(resp.fallback, "no fallback after exhaustion");
    check(resp.attempts_used == 3 && calls == 3,
          "fallback did not use retries+1 attempts");
    check(resp.edited == src, "fallback altered the source");
}

void plan_determinism_and_budget() {
    Manifest manifest;
    for (int i = 0; i < 120; ++i) {
        ManifestEntry e;
        e.utt_id = "real" + std::to_string(i);
        e.speaker_id = "TNI";
        e.role = Role::adaptation_train;
        manifest.entries.push_back(e);
    }
    for (int i = 0; i < 520; ++i) {
        ManifestEntry e;
        e.utt_id = "synth" + std::to_string(i);
        e.speaker_id = "TNI";
        e.role = Role::synthetic;
        manifest.entries.push_back(e);
    }
    for (int i = 0; i < 15; ++i) {
        ManifestEntry e;
        e.utt_id = "ref" + std::to_string(i);
        e.speaker_id = "TNI";
        e.role = Role::reference_pool;
        e.pool_rank = i + 1;
        manifest.entries.push_back(e);
    }

    SweepSpec spec;
    spec.kind = SweepSpec::Kind::n_scaling;
    spec.n_values = {1, 3, 5, 10, 25, 100};
    spec.runs = 7;
    spec.synth_budget = 500;
    spec.master_seed = 20250131;

    const auto plan1 = plan_scaling(spec, manifest);
    const auto plan2 = plan_scaling(spec, manifest);

    auto dump = [](const std::vector<JobPlan>& plan) {
        std::string s;
        for (const auto& j : plan) {
            s += j.job_id + "|" + j.condition + "|" + std::to_string(j.seed) + "|";
            for (const auto& id : j.train_real) s += id + ",";
            s += "|";
            for (const auto& id : j.train_synth) s += id + ",";
            s += "\n";
        }
        return s;
    };
    check(dump(plan1) == dump(plan2), "rerun produced a different plan");
    check(plan1.size() == 6 * 7 * 2, "unexpected job count");

    for (const auto& job : plan1) {
        if (job.condition != "real_plus_synth") continue;
        std::set<std::string> unique(job.train_real.begin(), job.train_real.end());
        unique.insert(job.train_synth.begin(), job.train_synth.end());
        check(static_cast<int>(unique.size()) == job.x + 500,
              "mixed job " + job.job_id + " does not hold exactly N+500 unique ids");
    }

    SweepSpec ks;
    ks.kind = SweepSpec::Kind::k_sweep;
    ks.varied_component = SweepSpec::Component::icl;
    ks.k_values = default_k_values(ks.varied_component);
    const auto kplan = plan_k_sweep(ks, manifest);
    check(kplan.size() == 6, "icl sweep does not enumerate 6 points");
    const std::vector<int> want = {0, 1, 3, 5, 10, 15};
    for (size_t i = 0; i < kplan.size(); ++i) {
        check(kplan[i].x == want[i], "icl sweep grid mismatch");
        check(kplan[i].component_refs.at("icl").size() ==
                  static_cast<size_t>(want[i]),
              "icl refs don't match K");
    }
}

void disjointness_enforcement() {
    Manifest m;
    auto add = [&](const std::string& id, const std::string& spk, Role role,
                   const std::string& text) {
        ManifestEntry e;
        e.utt_id = id;
        e.speaker_id = spk;
        e.role = role;
        e.text = text;
        if (role == Role::reference_pool) e.pool_rank = 1;
        m.entries.push_back(e);
    };
    // planted: one id overlap, two text overlaps
    add("shared", "TNI", Role::reference_pool, "number one");
    add("shared", "TNI", Role::eval, "number two");
    add("t1", "TNI", Role::adaptation_train, "The quick FOX.");
    add("e1", "TNI", Role::eval, "the quick fox");
    add("t2", "HKK", Role::synthetic, "hello world");
    add("e2", "HKK", Role::eval, "Hello, WORLD!");
    // clean entries
    add("c1", "TNI", Role::adaptation_train, "nothing shared here");
    add("c2", "TNI", Role::eval, "completely different text");

    const auto report = check_disjointness(m);
    check(report.violations.size() == 3,
          "expected exactly 3 findings, got " +
              std::to_string(report.violations.size()));
    int id_overlaps = 0, text_overlaps = 0;
    for (const auto& v : report.violations) {
        if (v.kind == "id_overlap") ++id_overlaps;
        if (v.kind == "text_overlap") ++text_overlaps;
    }
    check(id_overlaps == 1, "expected 1 id overlap");
    check(text_overlaps == 2, "expected 2 text overlaps");
}

}  // namespace

int main() {
    criterion(1, "worked-example fidelity (mock pipeline)", worked_example_fidelity);
    criterion(2, "matched-rate exactness", matched_rate_exactness);
    criterion(3, "edit-distance oracle agreement", edit_distance_oracle);
    criterion(4, "diff soundness", diff_soundness);
    criterion(5, "pitch tracker accuracy", pitch_tracker_accuracy);
    criterion(6, "energy homogeneity and zero input", energy_homogeneity);
    criterion(7, "normalization round trip", normalization_round_trip);
    criterion(8, "serialization round trip and rejection classes",
              serialization_round_trip);
    criterion(9, "accent-similarity geometry", accsim_geometry);
    criterion(10, "validator robustness and fallback", validator_robustness);
    criterion(11, "plan determinism and budget exactness",
              plan_determinism_and_budget);
    criterion(12, "disjointness enforcement", disjointness_enforcement);

    if (failures == 0) {
        std::printf("all 12 acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
