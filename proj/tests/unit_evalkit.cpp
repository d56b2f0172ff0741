#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "accentkit/evalkit.hpp"
#include "accentkit/rng.hpp"
#include "oracles.hpp"

using namespace accentkit;

namespace {

Transcript words(std::initializer_list<const char*> ws) {
    Transcript t;
    for (const char* w : ws) t.words.emplace_back(w);
    return t;
}

EmbeddingVector emb(const std::string& id, std::vector<double> v) {
    return EmbeddingVector{id, std::move(v)};
}

}  // namespace

TEST_CASE("normalize text") {
    CHECK(normalize_text("The CAT, sat!") == words({"the", "cat", "sat"}));
    CHECK(normalize_text("don't stop") == words({"don't", "stop"}));
    CHECK(normalize_text("  ").words.empty());
    CHECK(normalize_text("Route 66!") == words({"route", "66"}));
    CHECK(normalize_text("a\tb\nc") == words({"a", "b", "c"}));
}

TEST_CASE("wer basics") {
    CHECK(wer(words({"the", "cat", "sat"}), words({"the", "cat", "sat"})) == 0.0);
    CHECK(wer(words({"the", "cat", "sat"}), words({"the", "cat"})) ==
          doctest::Approx(1.0 / 3.0));
    // two substitutions plus one insertion; WER may exceed 1
    CHECK(wer(words({"a", "b"}), words({"x", "y", "z"})) == doctest::Approx(1.5));
    CHECK_THROWS_AS(wer(Transcript{}, words({"a"})), EmptyReferenceError);
}

TEST_CASE("wer counts split S/D/I") {
    const EditCounts c = word_edit_counts(words({"the", "cat", "sat"}),
                                          words({"the", "hat"}));
    CHECK(c.substitutions == 1);
    CHECK(c.deletions == 1);
    CHECK(c.insertions == 0);
    CHECK(c.total() == 2);
}

TEST_CASE("word distance agrees with the full-matrix oracle") {
    Rng rng(0x3e7);
    const char* alphabet[5] = {"aa", "bb", "cc", "dd", "ee"};
    for (int iter = 0; iter < 1000; ++iter) {
        Transcript a, b;
        const size_t la = rng.below(13), lb = rng.below(13);
        for (size_t i = 0; i < la; ++i) a.words.push_back(alphabet[rng.below(5)]);
        for (size_t i = 0; i < lb; ++i) b.words.push_back(alphabet[rng.below(5)]);
        const int got = word_edit_counts(a, b).total();
        CHECK(got == oracles::levenshtein_full(a.words, b.words));
        // distance is symmetric even though WER's denominator is not
        CHECK(got == word_edit_counts(b, a).total());
    }
}

TEST_CASE("accent similarity geometry") {
    std::map<std::string, std::vector<EmbeddingVector>> real;

    SUBCASE("identical direction scores 1") {
        real["spk1"] = {emb("r1", {1, 0, 0}), emb("r2", {2, 0, 0})};
        CHECK(accent_similarity({emb("s1", {1, 0, 0})}, real) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("orthogonal scores 0") {
        real["spk1"] = {emb("r1", {1, 0, 0})};
        CHECK(accent_similarity({emb("s1", {0, 1, 0})}, real) ==
              doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("two centroids at 45 degrees") {
        real["spk1"] = {emb("r1", {1, 0})};
        real["spk2"] = {emb("r2", {0, 1})};
        const double inv = 1.0 / std::sqrt(2.0);
        CHECK(accent_similarity({emb("s1", {inv, inv})}, real) ==
              doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-6));
    }
}

TEST_CASE("accent similarity is scale-invariant") {
    Rng rng(0xabcd);
    std::map<std::string, std::vector<EmbeddingVector>> real;
    std::vector<EmbeddingVector> synth;
    for (int s = 0; s < 3; ++s) {
        std::vector<EmbeddingVector> embs;
        for (int i = 0; i < 4; ++i) {
            std::vector<double> v(8);
            for (auto& x : v) x = rng.unit() - 0.5;
            embs.push_back(emb("r", v));
        }
        real["spk" + std::to_string(s)] = embs;
    }
    for (int i = 0; i < 5; ++i) {
        std::vector<double> v(8);
        for (auto& x : v) x = rng.unit() - 0.5;
        synth.push_back(emb("s", v));
    }
    const double base = accent_similarity(synth, real);

    auto scaled_real = real;
    auto scaled_synth = synth;
    for (auto& [spk, embs] : scaled_real) {
        for (auto& e : embs) {
            const double f = 0.1 + 10.0 * rng.unit();
            for (auto& x : e.values) x *= f;
        }
    }
    for (auto& e : scaled_synth) {
        const double f = 0.1 + 10.0 * rng.unit();
        for (auto& x : e.values) x *= f;
    }
    CHECK(accent_similarity(scaled_synth, scaled_real) ==
          doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("accent similarity separates matched from random directions") {
    Rng rng(0xc1a0);
    // real embeddings cluster around a direction per speaker
    std::map<std::string, std::vector<EmbeddingVector>> real;
    const size_t dim = 16;
    std::vector<std::vector<double>> anchors;
    for (int s = 0; s < 3; ++s) {
        std::vector<double> anchor(dim);
        for (auto& x : anchor) x = rng.unit() - 0.5;
        anchors.push_back(anchor);
        std::vector<EmbeddingVector> embs;
        for (int i = 0; i < 6; ++i) {
            std::vector<double> v = anchor;
            for (auto& x : v) x += 0.05 * (rng.unit() - 0.5);
            embs.push_back(emb("r", v));
        }
        real["spk" + std::to_string(s)] = embs;
    }
    std::vector<EmbeddingVector> matched, random_dirs;
    for (int i = 0; i < 10; ++i) {
        std::vector<double> v = anchors[i % anchors.size()];
        for (auto& x : v) x += 0.05 * (rng.unit() - 0.5);
        matched.push_back(emb("m", v));
        std::vector<double> r(dim);
        for (auto& x : r) x = rng.unit() - 0.5;
        random_dirs.push_back(emb("x", r));
    }
    CHECK(accent_similarity(matched, real) > accent_similarity(random_dirs, real));
}

TEST_CASE("accent similarity error paths") {
    std::map<std::string, std::vector<EmbeddingVector>> real;
    real["spk"] = {emb("r", {1, 0})};
    CHECK_THROWS_AS(accent_similarity({emb("s", {1, 0, 0})}, real),
                    DimensionMismatchError);
    CHECK_THROWS_AS(accent_similarity({emb("s", {0, 0})}, real), ZeroNormError);
    CHECK_THROWS_AS(accent_similarity({}, real), EmptyInputError);
}

TEST_CASE("aggregate runs") {
    const RunAggregate single = aggregate_runs({10.0});
    CHECK(single.mean == 10.0);
    CHECK(single.stddev == 0.0);
    CHECK(single.n_runs == 1);

    const RunAggregate three = aggregate_runs({1.0, 2.0, 3.0});
    CHECK(three.mean == doctest::Approx(2.0));
    CHECK(three.stddev == doctest::Approx(std::sqrt(2.0 / 3.0)));  // 0.8165

    const RunAggregate permuted = aggregate_runs({3.0, 1.0, 2.0});
    CHECK(permuted.mean == doctest::Approx(three.mean));
    CHECK(permuted.stddev == doctest::Approx(three.stddev));

    CHECK_THROWS_AS(aggregate_runs({}), EmptyInputError);
}

TEST_CASE("score csv format") {
    const std::string csv = score_csv({{"adapt_llm", "TNI", "wer", 18.9, 0.4, 7},
                                       {"real", "-", "wer", 12.2, 0.2, 7}});
    CHECK(csv ==
          "condition,speaker,metric,mean,std,n_runs\n"
          "adapt_llm,TNI,wer,18.900000,0.400000,7\n"
          "real,-,wer,12.200000,0.200000,7\n");
}

TEST_CASE("embedding and transcript files") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "accentkit_eval_test";
    fs::create_directories(dir);

    const std::string epath = (dir / "emb.txt").string();
    {
        std::ofstream out(epath);
        out << "# comment\nutt1 1.0 0.0 0.5\nutt2 0.25 -1 2\n";
    }
    const auto embs = read_embedding_file(epath);
    REQUIRE(embs.size() == 2);
    CHECK(embs[0].source_id == "utt1");
    CHECK(embs[1].values == std::vector<double>{0.25, -1.0, 2.0});

    {
        std::ofstream out(epath);
        out << "utt1 1.0 2.0\nutt2 1.0\n";
    }
    CHECK_THROWS_AS(read_embedding_file(epath), DimensionMismatchError);

    const std::string tpath = (dir / "trans.txt").string();
    {
        std::ofstream out(tpath);
        out << "utt1\tThe CAT sat.\nutt2\thello there\n";
    }
    const auto trans = read_transcript_file(tpath);
    REQUIRE(trans.size() == 2);
    CHECK(trans[0].first == "utt1");
    CHECK(trans[0].second == "The CAT sat.");
    fs::remove_all(dir);
}
