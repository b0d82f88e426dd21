#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "chemtext/embedspace.hpp"
#include "support/synth.hpp"

using namespace chemtext;

namespace {

EmbeddingModel model_from_rows(const std::vector<std::vector<double>>& rows,
                               std::vector<std::string> tokens = {}) {
    EmbeddingModel m;
    m.algorithm = "word2vec";
    m.W = Matrix(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t d = 0; d < rows[i].size(); ++d) m.W.at(i, d) = rows[i][d];
    m.W_ctx = Matrix(rows.size(), rows[0].size());
    if (tokens.empty()) {
        for (std::size_t i = 0; i < rows.size(); ++i) tokens.push_back("w" + std::to_string(i));
    }
    m.tokens = tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) m.token_to_id.emplace(tokens[i], static_cast<int>(i));
    return m;
}

}  // namespace

TEST_CASE("cosine frozen values") {
    std::vector<double> a = {1.0, 2.0, -0.5};
    CHECK(cosine(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 1}) ==
          doctest::Approx(0.70711).epsilon(1e-5));
    CHECK_THROWS(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 1}));
    CHECK_THROWS(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 1, 0}));
}

TEST_CASE("cosine symmetry, bounds and scale invariance") {
    Rng rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t d = 1 + rng.next_below(10);
        std::vector<double> a(d), b(d);
        for (auto& v : a) v = 2.0 * rng.next_double() - 1.0;
        for (auto& v : b) v = 2.0 * rng.next_double() - 1.0;
        double na = 0, nb = 0;
        for (double v : a) na += v * v;
        for (double v : b) nb += v * v;
        if (na == 0.0 || nb == 0.0) continue;

        double c = cosine(a, b);
        CHECK(c >= -1.0);
        CHECK(c <= 1.0);
        CHECK(cosine(b, a) == c);

        double lam = 0.1 + 5.0 * rng.next_double();
        double mu = 0.1 + 5.0 * rng.next_double();
        std::vector<double> a2 = a, b2 = b;
        for (auto& v : a2) v *= lam;
        for (auto& v : b2) v *= mu;
        CHECK(std::abs(cosine(a2, b2) - c) <= 1e-12);
        CHECK(cosine(a2, a) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("euclidean") {
    CHECK(euclidean(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0.0);
    CHECK(euclidean(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(5.0));
    std::vector<double> a = {1, -2, 0.5}, b = {0, 1, 2};
    double d = euclidean(a, b);
    std::vector<double> a2 = a, b2 = b;
    for (auto& v : a2) v *= 2.0;
    for (auto& v : b2) v *= 2.0;
    CHECK(euclidean(a2, b2) == doctest::Approx(2.0 * d).epsilon(1e-12));
    CHECK_THROWS(euclidean(std::vector<double>{1}, std::vector<double>{1, 2}));
}

TEST_CASE("nearest: ranking order, exclusion, truncation") {
    auto m = model_from_rows({{1, 0}, {0.9, 0.1}, {0, 1}, {-1, 0}, {0.8, 0.3}},
                             {"query", "close", "ortho", "opposite", "near"});
    auto r = nearest("query", 2, FilterLevel::AllWords, m, nullptr);
    REQUIRE(r.items.size() == 2);
    CHECK(r.items[0].token == "close");
    CHECK(r.items[1].token == "near");
    CHECK(r.items[0].score >= r.items[1].score);
    for (const auto& it : r.items) CHECK(it.token != "query");

    // k larger than the candidate set: return everything
    auto all = nearest("query", 99, FilterLevel::AllWords, m, nullptr);
    CHECK(all.items.size() == 4);
    CHECK_THROWS(nearest("query", 0, FilterLevel::AllWords, m, nullptr));
}

TEST_CASE("nearest: OOV error lists close spellings") {
    auto m = model_from_rows({{1, 0}, {0, 1}}, {"detonator", "propellant"});
    try {
        nearest("detonater", 1, FilterLevel::AllWords, m, nullptr);
        FAIL("expected error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("detonator") != std::string::npos);
    }
}

TEST_CASE("nearest with lexicon filters") {
    auto m = model_from_rows({{1.0, 0.0}, {0.9, 0.1}, {0.8, 0.2}, {0.7, 0.3}},
                             {"underwater", "hmx", "wax", "blast"});
    ChemLexicon lex;
    lex.add_entry({"HMX", {}, "", std::nullopt, true});
    lex.add_entry({"wax", {}, "", std::nullopt, false});

    auto chems = nearest("underwater", 5, FilterLevel::ChemicalNames, m, &lex);
    REQUIRE(chems.items.size() == 2);
    CHECK(chems.items[0].token == "hmx");
    CHECK(chems.items[1].token == "wax");

    auto energetic = nearest("underwater", 5, FilterLevel::LikelyEnergetics, m, &lex);
    REQUIRE(energetic.items.size() == 1);
    CHECK(energetic.items[0].token == "hmx");

    ChemLexicon empty_energetics;
    empty_energetics.add_entry({"wax", {}, "", std::nullopt, false});
    CHECK_THROWS(nearest("underwater", 5, FilterLevel::LikelyEnergetics, m, &empty_energetics));
    CHECK_THROWS(nearest("underwater", 5, FilterLevel::ChemicalNames, m, nullptr));
}

TEST_CASE("nearest ties break by ascending token id") {
    auto m = model_from_rows({{1, 0}, {2, 0}, {3, 0}, {0.5, 0}}, {"q", "b", "a", "c"});
    // all candidates have cosine exactly 1 with the query
    auto r = nearest("q", 3, FilterLevel::AllWords, m, nullptr);
    REQUIRE(r.items.size() == 3);
    CHECK(r.items[0].token == "b");  // id 1
    CHECK(r.items[1].token == "a");  // id 2
    CHECK(r.items[2].token == "c");  // id 3
}

TEST_CASE("nearest matches an exhaustive scan (brute-force equivalence)") {
    Rng rng(2718);
    const int V = 300, D = 8;
    std::vector<std::vector<double>> rows(V, std::vector<double>(D));
    for (auto& row : rows)
        for (auto& v : row) v = 2.0 * rng.next_double() - 1.0;
    auto m = model_from_rows(rows);

    for (int trial = 0; trial < 25; ++trial) {
        int q = static_cast<int>(rng.next_below(V));
        int k = 1 + static_cast<int>(rng.next_below(20));
        auto r = nearest(m.tokens[static_cast<std::size_t>(q)], k, FilterLevel::AllWords, m, nullptr);

        // oracle: full scan + stable sort
        std::vector<std::pair<double, int>> scored;
        auto qv = m.query_vector(q);
        for (int i = 0; i < V; ++i) {
            if (i == q) continue;
            scored.emplace_back(cosine(qv, m.query_vector(i)), i);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        REQUIRE(r.items.size() == static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            CHECK(r.items[static_cast<std::size_t>(i)].id == scored[static_cast<std::size_t>(i)].second);
            CHECK(r.items[static_cast<std::size_t>(i)].score ==
                  doctest::Approx(scored[static_cast<std::size_t>(i)].first).epsilon(1e-12));
        }
    }
}

TEST_CASE("application_words") {
    auto m = model_from_rows({{1.0, 0.0}, {0.95, 0.05}, {0.0, 1.0}, {0.5, 0.5}},
                             {"fuelx", "rocket", "tablet", "binder"});
    auto r = application_words("fuelx", {"rocket", "tablet", "binder", "oovword"}, 2, m);
    REQUIRE(r.items.size() == 2);
    CHECK(r.items[0].token == "rocket");
    CHECK_THROWS(application_words("fuelx", {"oovword"}, 2, m));
}

TEST_CASE("group_similarity hand-computed case") {
    auto m = model_from_rows({{1, 0}, {0, 1}}, {"a", "b"});
    GroupSimilarity g = group_similarity({"a"}, {"b", "a"}, m);
    // pairs: (a,b) cos 0, (a,a) cos 1 -> mean 0.5; euclid: sqrt(2), 0 -> mean sqrt(2)/2
    CHECK(g.mean_cosine == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g.mean_euclidean == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("group_similarity: A == B uses distinct unordered pairs; singleton errors") {
    auto m = model_from_rows({{1, 0}, {0.6, 0.8}, {0, 1}}, {"x", "y", "z"});
    GroupSimilarity g = group_similarity({"x", "y", "z"}, {"x", "y", "z"}, m);
    double expected = (cosine(m.query_vector(0), m.query_vector(1)) +
                       cosine(m.query_vector(0), m.query_vector(2)) +
                       cosine(m.query_vector(1), m.query_vector(2))) / 3.0;
    CHECK(g.mean_cosine == doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS(group_similarity({"x"}, {"x"}, m));
}

TEST_CASE("group_similarity is symmetric and reports missing tokens") {
    auto m = model_from_rows({{1, 0}, {0.6, 0.8}, {0, 1}, {0.3, 0.7}}, {"p", "q", "r", "s"});
    GroupSimilarity ab = group_similarity({"p", "q"}, {"r", "s"}, m);
    GroupSimilarity ba = group_similarity({"r", "s"}, {"p", "q"}, m);
    CHECK(ab.mean_cosine == doctest::Approx(ba.mean_cosine).epsilon(1e-12));
    CHECK(ab.mean_euclidean == doctest::Approx(ba.mean_euclidean).epsilon(1e-12));

    GroupSimilarity with_missing = group_similarity({"p", "ghost"}, {"r"}, m);
    CHECK(with_missing.missing_a == std::vector<std::string>{"ghost"});

    try {
        group_similarity({"ghost1", "ghost2"}, {"r"}, m);
        FAIL("expected error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("ghost1") != std::string::npos);
    }
}

TEST_CASE("analogy") {
    auto m = model_from_rows({{1, 0}, {1, 0}, {0, 1}, {0.1, 0.9}, {0.9, 0.1}},
                             {"a", "b", "c", "cnear", "afar"});
    // w_a == w_b: ranking equals nearest(c) over the remaining words
    auto r = analogy("a", "b", "c", 2, m);
    auto n = nearest("c", 4, FilterLevel::AllWords, m, nullptr);
    std::vector<std::string> n_filtered;
    for (const auto& it : n.items) {
        if (it.token != "a" && it.token != "b") n_filtered.push_back(it.token);
    }
    REQUIRE(r.items.size() == 2);
    CHECK(r.items[0].token == n_filtered[0]);
    CHECK(r.items[1].token == n_filtered[1]);

    CHECK_THROWS(analogy("a", "b", "c", 0, m));
    CHECK_THROWS(analogy("a", "b", "missing", 2, m));
}

TEST_CASE("hubness: counting identity and exact ties") {
    // basis vectors: every pairwise cosine is exactly 0
    auto m = model_from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {"t0", "t1", "t2"});
    auto report = hubness(m, 1, {"t0", "t1", "t2"}, HubMetric::Cosine);
    // all pairwise cosines tie at -0.5; id tie-break means everyone picks the
    // lowest-id other token
    CHECK(report.counts == std::vector<int>{2, 1, 0});
    int total = 0;
    for (int c : report.counts) total += c;
    CHECK(total == 1 * 3);
}

TEST_CASE("hubness: total count identity on random models") {
    Rng rng(515);
    std::vector<std::vector<double>> rows(40, std::vector<double>(6));
    for (auto& row : rows)
        for (auto& v : row) v = rng.next_double() - 0.5;
    auto m = model_from_rows(rows);
    std::vector<std::string> cands(m.tokens.begin(), m.tokens.begin() + 30);
    for (int k : {1, 3, 7}) {
        auto cos_report = hubness(m, k, cands, HubMetric::Cosine);
        auto euc_report = hubness(m, k, cands, HubMetric::Euclidean);
        int cos_total = 0, euc_total = 0;
        for (int c : cos_report.counts) cos_total += c;
        for (int c : euc_report.counts) euc_total += c;
        CHECK(cos_total == k * 30);
        CHECK(euc_total == k * 30);
        CHECK(std::isfinite(cos_report.skewness));
    }
}

TEST_CASE("pca: rank-1 data on a line") {
    auto m = model_from_rows({{0, 0, 0}, {1, 1, 0}, {2, 2, 0}}, {"p0", "p1", "p2"});
    auto proj = pca_project(m, {"p0", "p1", "p2"}, 3);
    CHECK(proj.explained_variance[0] > 0.0);
    CHECK(proj.explained_variance[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(proj.explained_variance[2] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("pca: first component of the 3x2 toy set is (1,1)/sqrt(2)") {
    auto m = model_from_rows({{0, 0}, {1, 1}, {2, 2}}, {"p0", "p1", "p2"});
    auto proj = pca_project(m, {"p0", "p1", "p2"}, 1);
    CHECK(proj.components.at(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(proj.components.at(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    // explained variance equals the covariance eigenvalue 2
    CHECK(proj.explained_variance[0] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("pca: orthonormal components, descending variance, reconstruction") {
    Rng rng(616);
    const int n = 24, D = 7;
    std::vector<std::vector<double>> rows(n, std::vector<double>(D));
    for (auto& row : rows)
        for (auto& v : row) v = 3.0 * rng.next_double() - 1.5;
    auto m = model_from_rows(rows);
    std::vector<std::string> tokens = m.tokens;

    auto proj = pca_project(m, tokens, D);
    for (std::size_t a = 0; a < static_cast<std::size_t>(D); ++a) {
        for (std::size_t b = 0; b < static_cast<std::size_t>(D); ++b) {
            double dot = 0.0;
            for (std::size_t d = 0; d < static_cast<std::size_t>(D); ++d)
                dot += proj.components.at(a, d) * proj.components.at(b, d);
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-8);
        }
    }
    for (std::size_t i = 1; i < proj.explained_variance.size(); ++i)
        CHECK(proj.explained_variance[i] <= proj.explained_variance[i - 1] + 1e-12);

    // projecting then reconstructing with all D components reproduces the
    // centered data
    std::vector<double> mean(static_cast<std::size_t>(D), 0.0);
    for (const auto& row : rows)
        for (std::size_t d = 0; d < static_cast<std::size_t>(D); ++d) mean[d] += row[d] / n;
    for (int i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < static_cast<std::size_t>(D); ++d) {
            double rec = 0.0;
            for (std::size_t c = 0; c < static_cast<std::size_t>(D); ++c)
                rec += proj.coordinates.at(static_cast<std::size_t>(i), c) * proj.components.at(c, d);
            CHECK(std::abs(rec - (rows[static_cast<std::size_t>(i)][d] - mean[d])) <= 1e-8);
        }
    }
}

TEST_CASE("pca eigenvalues agree with an independent Eigen oracle") {
    Rng rng(717);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 12 + static_cast<int>(rng.next_below(10));
        const int D = 2 + static_cast<int>(rng.next_below(8));
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(n),
                                              std::vector<double>(static_cast<std::size_t>(D)));
        for (auto& row : rows)
            for (auto& v : row) v = 2.0 * rng.next_double() - 1.0;
        auto m = model_from_rows(rows);
        auto proj = pca_project(m, m.tokens, D);

        Eigen::MatrixXd X(n, D);
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < D; ++d) X(i, d) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
        Eigen::RowVectorXd mean = X.colwise().mean();
        Eigen::MatrixXd centered = X.rowwise() - mean;
        Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        std::vector<double> expected(solver.eigenvalues().data(),
                                     solver.eigenvalues().data() + D);
        std::sort(expected.rbegin(), expected.rend());
        for (int c = 0; c < D; ++c) {
            CHECK(std::abs(proj.explained_variance[static_cast<std::size_t>(c)] -
                           expected[static_cast<std::size_t>(c)]) <= 1e-8);
        }
    }
}

TEST_CASE("pca input validation") {
    auto m = model_from_rows({{1, 2, 3}, {4, 5, 6}}, {"u", "v"});
    CHECK_THROWS(pca_project(m, {"u", "v"}, 3));      // ncomp > min(n, D)
    CHECK_THROWS(pca_project(m, {"u"}, 1));           // need >= 2 points
    CHECK_THROWS(pca_project(m, {"u", "ghost"}, 1));  // OOV token
    CHECK_THROWS(pca_project(m, {"u", "v"}, 0));
}

TEST_CASE("glove models rank with combined vectors") {
    EmbeddingModel m;
    m.algorithm = "glove";
    m.W = Matrix(2, 2);
    m.W_ctx = Matrix(2, 2);
    m.W.at(0, 0) = 1.0;
    m.W_ctx.at(0, 1) = 1.0;  // combined row 0 = (1, 1)
    m.W.at(1, 1) = 1.0;      // combined row 1 = (0, 1)
    m.tokens = {"g0", "g1"};
    m.token_to_id = {{"g0", 0}, {"g1", 1}};
    m.query_combined = true;
    CHECK(m.query_vector(0) == std::vector<double>{1.0, 1.0});
    auto r = nearest("g0", 1, FilterLevel::AllWords, m, nullptr);
    CHECK(r.items[0].score == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}
