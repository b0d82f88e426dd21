#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "chemtext/cooc.hpp"
#include "support/oracles.hpp"
#include "support/testpaths.hpp"

using namespace chemtext;

namespace {

TokenizedCorpus one_sentence(std::vector<int> ids) {
    TokenizedCorpus c;
    c.sentences.push_back(std::move(ids));
    return c;
}

}  // namespace

TEST_CASE("build_cooccurrence: window 1, uniform, symmetric") {
    auto c = one_sentence({0, 1, 2});  // [a, b, c]
    CoocMatrix m = build_cooccurrence(c, 3, 1, CoocWeighting::Uniform, false);
    CHECK(m.value(0, 1) == doctest::Approx(1.0));
    CHECK(m.value(1, 0) == doctest::Approx(1.0));
    CHECK(m.value(1, 2) == doctest::Approx(1.0));
    CHECK(m.value(0, 2) == 0.0);
}

TEST_CASE("build_cooccurrence: inverse distance weighting") {
    auto c = one_sentence({0, 1, 2});
    CoocMatrix m = build_cooccurrence(c, 3, 2, CoocWeighting::InverseDistance, false);
    CHECK(m.value(0, 2) == doctest::Approx(0.5));  // distance 2 -> 1/2
    CHECK(m.value(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("build_cooccurrence: empty corpus and bad window") {
    TokenizedCorpus empty;
    CoocMatrix m = build_cooccurrence(empty, 5, 2, CoocWeighting::Uniform, false);
    CHECK(m.entries.empty());
    CHECK_THROWS(build_cooccurrence(empty, 5, 0, CoocWeighting::Uniform, false));
}

TEST_CASE("build_cooccurrence: asymmetric mode counts right contexts only") {
    auto c = one_sentence({0, 1});
    CoocMatrix m = build_cooccurrence(c, 2, 1, CoocWeighting::Uniform, true);
    CHECK(m.value(0, 1) == doctest::Approx(1.0));
    CHECK(m.value(1, 0) == 0.0);
}

TEST_CASE("iterate_nonzero is sorted and deterministic") {
    Rng rng(5);
    auto corpus = oracles::random_corpus(rng, 2000, 30);
    CoocMatrix a = build_cooccurrence(corpus, 30, 4, CoocWeighting::InverseDistance, false);
    CoocMatrix b = build_cooccurrence(corpus, 30, 4, CoocWeighting::InverseDistance, false);
    CHECK(a.entries == b.entries);
    for (std::size_t k = 1; k < a.entries.size(); ++k) {
        bool ordered = a.entries[k - 1].i < a.entries[k].i ||
                       (a.entries[k - 1].i == a.entries[k].i && a.entries[k - 1].j < a.entries[k].j);
        REQUIRE(ordered);
    }
    for (const auto& e : a.entries) CHECK(e.x > 0.0);
}

TEST_CASE("symmetric mode is exactly symmetric and has the right total mass") {
    Rng rng(6);
    for (int trial = 0; trial < 5; ++trial) {
        auto corpus = oracles::random_corpus(rng, 3000, 25);
        int m = 1 + static_cast<int>(rng.next_below(8));
        CoocMatrix mat = build_cooccurrence(corpus, 25, m, CoocWeighting::Uniform, false);
        for (const auto& e : mat.entries) {
            CHECK(mat.value(e.j, e.i) == e.x);
        }
        // 2 * (number of in-sentence pairs within distance m)
        std::int64_t pairs = 0;
        for (const auto& sent : corpus.sentences) {
            const int n = static_cast<int>(sent.size());
            for (int p = 0; p < n; ++p)
                for (int q = p + 1; q < n && q - p <= m; ++q) ++pairs;
        }
        CHECK(mat.total_mass() == doctest::Approx(2.0 * static_cast<double>(pairs)));
    }
}

TEST_CASE("brute-force oracle equivalence") {
    Rng rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        auto corpus = oracles::random_corpus(rng, 5000, 40);
        for (int m : {1, 3, 8}) {
            for (bool inv : {false, true}) {
                for (bool sides : {false, true}) {
                    CoocMatrix mat = build_cooccurrence(
                        corpus, 40, m, inv ? CoocWeighting::InverseDistance : CoocWeighting::Uniform,
                        sides);
                    auto oracle = oracles::brute_force_cooc(corpus, m, inv, sides);
                    REQUIRE(mat.entries.size() == oracle.size());
                    for (const auto& e : mat.entries) {
                        auto it = oracle.find({e.i, e.j});
                        REQUIRE(it != oracle.end());
                        CHECK(std::abs(e.x - it->second) <= 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("entries are monotone in the window size") {
    Rng rng(8);
    auto corpus = oracles::random_corpus(rng, 4000, 20);
    for (int m = 1; m < 6; ++m) {
        CoocMatrix small = build_cooccurrence(corpus, 20, m, CoocWeighting::Uniform, false);
        CoocMatrix large = build_cooccurrence(corpus, 20, m + 1, CoocWeighting::Uniform, false);
        for (const auto& e : small.entries) {
            CHECK(large.value(e.i, e.j) >= e.x);
        }
    }
}

TEST_CASE("cooc file round trip") {
    Rng rng(9);
    auto corpus = oracles::random_corpus(rng, 1000, 15);
    CoocMatrix mat = build_cooccurrence(corpus, 15, 5, CoocWeighting::InverseDistance, true);
    testsupport::TempDir tmp("cooc");
    mat.save(tmp / "cooc.bin");
    CoocMatrix back = CoocMatrix::load(tmp / "cooc.bin");
    CHECK(back.vocab_size == mat.vocab_size);
    CHECK(back.window == mat.window);
    CHECK(back.weighting == mat.weighting);
    CHECK(back.distinguish_sides == mat.distinguish_sides);
    CHECK(back.entries == mat.entries);
}
