#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "chemtext/sgns.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"
#include "support/testpaths.hpp"

using namespace chemtext;

namespace {

EmbeddingModel random_model(int V, int D, std::uint64_t seed, bool zero_ctx = false) {
    EmbeddingModel m;
    m.algorithm = "word2vec";
    m.W = Matrix(static_cast<std::size_t>(V), static_cast<std::size_t>(D));
    m.W_ctx = Matrix(static_cast<std::size_t>(V), static_cast<std::size_t>(D));
    Rng rng(seed);
    for (auto& v : m.W.a) v = rng.next_double() - 0.5;
    if (!zero_ctx) {
        for (auto& v : m.W_ctx.a) v = rng.next_double() - 0.5;
    }
    for (int i = 0; i < V; ++i) {
        m.tokens.push_back("w" + std::to_string(i));
        m.token_to_id.emplace(m.tokens.back(), i);
    }
    return m;
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
}

// central finite differences over every parameter of W and W_ctx
void check_gradients(EmbeddingModel model, TrainConfig::Mode mode, int center,
                     const std::vector<int>& context, const std::vector<int>& negatives) {
    const double h = 1e-5;
    Matrix gW(model.W.rows, model.W.cols), gWctx(model.W.rows, model.W.cols);
    auto eval = [&](const EmbeddingModel& m) {
        return mode == TrainConfig::Mode::NegativeSampling
                   ? ns_pair_loss(center, context[0], negatives, m)
                   : skipgram_loss(center, context, m, mode);
    };
    if (mode == TrainConfig::Mode::NegativeSampling) {
        ns_pair_loss_grad(center, context[0], negatives, model, gW, gWctx);
    } else {
        skipgram_loss_grad(center, context, model, mode, gW, gWctx);
    }

    for (Matrix* mat : {&model.W, &model.W_ctx}) {
        Matrix& grad = (mat == &model.W) ? gW : gWctx;
        for (std::size_t k = 0; k < mat->a.size(); ++k) {
            double saved = mat->a[k];
            mat->a[k] = saved + h;
            double up = eval(model);
            mat->a[k] = saved - h;
            double down = eval(model);
            mat->a[k] = saved;
            double numeric = (up - down) / (2.0 * h);
            REQUIRE(rel_err(grad.a[k], numeric) <= 1e-4);
        }
    }
}

}  // namespace

TEST_CASE("softmax frozen values") {
    auto uniform = softmax(std::vector<double>{0.0, 0.0, 0.0});
    for (double p : uniform) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    auto y = softmax(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(y[0] == doctest::Approx(0.09003).epsilon(1e-4));
    CHECK(y[1] == doctest::Approx(0.24473).epsilon(1e-4));
    CHECK(y[2] == doctest::Approx(0.66524).epsilon(1e-4));

    auto big = softmax(std::vector<double>{1000.0, 1000.0});
    CHECK(big[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::isfinite(big[0]));

    CHECK_THROWS(softmax(std::vector<double>{}));
}

TEST_CASE("softmax properties: normalization and shift invariance") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 1 + rng.next_below(40);
        std::vector<double> u(n);
        for (auto& v : u) v = 20.0 * (rng.next_double() - 0.5);
        auto y = softmax(u);
        double sum = 0.0;
        for (double p : y) sum += p;
        CHECK(std::abs(sum - 1.0) <= 1e-12);

        double shift = 100.0 * (rng.next_double() - 0.5);
        std::vector<double> shifted = u;
        for (auto& v : shifted) v += shift;
        auto y2 = softmax(shifted);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - y2[i]) <= 1e-9);
    }
}

TEST_CASE("skipgram_forward: zero context matrix gives the uniform distribution") {
    EmbeddingModel m = random_model(7, 3, 4, /*zero_ctx=*/true);
    auto y = skipgram_forward(2, m, TrainConfig::Mode::FullSoftmax);
    for (double p : y) CHECK(p == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK_THROWS(skipgram_forward(7, m, TrainConfig::Mode::FullSoftmax));
    CHECK_THROWS(skipgram_forward(-1, m, TrainConfig::Mode::FullSoftmax));
}

TEST_CASE("skipgram_forward matches a hand-computed chain") {
    EmbeddingModel m;
    m.W = Matrix(3, 2);
    m.W_ctx = Matrix(3, 2);
    // w_c rows
    m.W.at(0, 0) = 0.5;  m.W.at(0, 1) = -1.0;
    m.W.at(1, 0) = 2.0;  m.W.at(1, 1) = 0.25;
    m.W.at(2, 0) = -0.5; m.W.at(2, 1) = 1.5;
    // W' rows
    m.W_ctx.at(0, 0) = 1.0;  m.W_ctx.at(0, 1) = 0.0;
    m.W_ctx.at(1, 0) = -1.0; m.W_ctx.at(1, 1) = 2.0;
    m.W_ctx.at(2, 0) = 0.5;  m.W_ctx.at(2, 1) = 0.5;

    // center 1: u = W' w_1 = (2.0, -1.5, 1.125)
    auto y = skipgram_forward(1, m, TrainConfig::Mode::FullSoftmax);
    double e0 = std::exp(2.0), e1 = std::exp(-1.5), e2 = std::exp(1.125);
    double z = e0 + e1 + e2;
    CHECK(std::abs(y[0] - e0 / z) <= 1e-12);
    CHECK(std::abs(y[1] - e1 / z) <= 1e-12);
    CHECK(std::abs(y[2] - e2 / z) <= 1e-12);
}

TEST_CASE("single softmax with orthonormal rows peaks at the center word") {
    EmbeddingModel m;
    m.W = Matrix(4, 4);
    for (int i = 0; i < 4; ++i) m.W.at(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = 1.0;
    m.W_ctx = Matrix(4, 4);
    auto y = skipgram_forward(2, m, TrainConfig::Mode::SingleSoftmax);
    int argmax = 0;
    for (int i = 1; i < 4; ++i)
        if (y[static_cast<std::size_t>(i)] > y[static_cast<std::size_t>(argmax)]) argmax = i;
    CHECK(argmax == 2);
}

TEST_CASE("skipgram_loss: uniform case and limits") {
    EmbeddingModel m = random_model(4, 3, 11, /*zero_ctx=*/true);
    double loss = skipgram_loss(0, {2}, m, TrainConfig::Mode::FullSoftmax);
    CHECK(loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    // zero matrices: loss is exactly |context| * log V
    EmbeddingModel zero;
    zero.W = Matrix(8, 3);
    zero.W_ctx = Matrix(8, 3);
    CHECK(skipgram_loss(1, {2}, zero, TrainConfig::Mode::FullSoftmax) == std::log(8.0));
    double l4 = skipgram_loss(1, {2, 3, 4, 5}, zero, TrainConfig::Mode::FullSoftmax);
    CHECK(l4 == doctest::Approx(4.0 * std::log(8.0)).epsilon(1e-15));

    // concentrating the mass on the single context word drives loss to 0
    EmbeddingModel peak;
    peak.W = Matrix(3, 2);
    peak.W_ctx = Matrix(3, 2);
    peak.W.at(0, 0) = 1.0;
    peak.W_ctx.at(1, 0) = 30.0;  // huge dot for word 1 only
    CHECK(skipgram_loss(0, {1}, peak, TrainConfig::Mode::FullSoftmax) < 1e-10);

    CHECK_THROWS(skipgram_loss(0, {}, m, TrainConfig::Mode::FullSoftmax));
}

TEST_CASE("skipgram_loss matches the independent scalar oracle") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        EmbeddingModel m = random_model(10, 4, 1000 + static_cast<std::uint64_t>(trial));
        int center = static_cast<int>(rng.next_below(10));
        std::vector<int> context;
        std::size_t n = 1 + rng.next_below(4);
        for (std::size_t k = 0; k < n; ++k) context.push_back(static_cast<int>(rng.next_below(10)));
        double mine = skipgram_loss(center, context, m, TrainConfig::Mode::FullSoftmax);
        double oracle = oracles::scalar_skipgram_loss(m.W, m.W_ctx, center, context);
        CHECK(std::abs(mine - oracle) <= 1e-12);
    }
}

TEST_CASE("full-softmax gradients match finite differences") {
    Rng rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        int V = 3 + static_cast<int>(rng.next_below(18));
        int D = 1 + static_cast<int>(rng.next_below(8));
        EmbeddingModel m = random_model(V, D, 500 + static_cast<std::uint64_t>(trial));
        int center = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(V)));
        std::vector<int> context;
        std::size_t n = 1 + rng.next_below(3);
        for (std::size_t k = 0; k < n; ++k)
            context.push_back(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(V))));
        check_gradients(m, TrainConfig::Mode::FullSoftmax, center, context, {});
    }
}

TEST_CASE("single-softmax gradients match finite differences") {
    Rng rng(321);
    for (int trial = 0; trial < 6; ++trial) {
        int V = 3 + static_cast<int>(rng.next_below(10));
        int D = 1 + static_cast<int>(rng.next_below(6));
        EmbeddingModel m = random_model(V, D, 900 + static_cast<std::uint64_t>(trial));
        int center = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(V)));
        std::vector<int> context = {static_cast<int>(rng.next_below(static_cast<std::uint64_t>(V)))};
        check_gradients(m, TrainConfig::Mode::SingleSoftmax, center, context, {});
    }
}

TEST_CASE("negative-sampling gradients match finite differences") {
    Rng rng(555);
    for (int trial = 0; trial < 10; ++trial) {
        int V = 4 + static_cast<int>(rng.next_below(16));
        int D = 1 + static_cast<int>(rng.next_below(8));
        EmbeddingModel m = random_model(V, D, 700 + static_cast<std::uint64_t>(trial));
        int center = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(V)));
        int target = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(V)));
        std::vector<int> negatives;
        std::size_t k = 1 + rng.next_below(5);
        for (std::size_t i = 0; i < k; ++i) {
            int neg = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(V)));
            if (neg != target) negatives.push_back(neg);
        }
        if (negatives.empty()) negatives.push_back((target + 1) % V);
        check_gradients(m, TrainConfig::Mode::NegativeSampling, center, {target}, negatives);
    }
}

TEST_CASE("train_skipgram: same seed gives bitwise-identical parameters") {
    auto data = synth::make_two_family_corpus(42, 20000, 8);
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.window = 3;
    cfg.epochs = 2;
    cfg.seed = 7;
    cfg.subsample_t = 1.0;
    EmbeddingModel a = train_skipgram(data.corpus, data.vocab, cfg);
    EmbeddingModel b = train_skipgram(data.corpus, data.vocab, cfg);
    CHECK(a.W.a == b.W.a);
    CHECK(a.W_ctx.a == b.W_ctx.a);
    CHECK(a.W.all_finite());
    CHECK(a.W_ctx.all_finite());
}

TEST_CASE("train_skipgram full-softmax: mean epoch loss is non-increasing early on") {
    auto data = synth::make_two_family_corpus(43, 4000, 5);
    TrainConfig cfg;
    cfg.dim = 6;
    cfg.window = 2;
    cfg.epochs = 5;
    cfg.learning_rate = 0.002;
    cfg.mode = TrainConfig::Mode::FullSoftmax;
    cfg.shrink_window = false;
    cfg.subsample_t = 1.0;
    TrainStats stats;
    train_skipgram(data.corpus, data.vocab, cfg, &stats);
    REQUIRE(stats.epoch_mean_loss.size() == 5);
    for (std::size_t e = 1; e < stats.epoch_mean_loss.size(); ++e) {
        CHECK(stats.epoch_mean_loss[e] <= stats.epoch_mean_loss[e - 1] + 1e-9);
    }
}

TEST_CASE("train_skipgram separates planted families (direction check)") {
    auto data = synth::make_two_family_corpus(44, 60000, 10);
    TrainConfig cfg;
    cfg.dim = 12;
    cfg.window = 3;
    cfg.epochs = 3;
    cfg.seed = 3;
    cfg.subsample_t = 1.0;
    EmbeddingModel m = train_skipgram(data.corpus, data.vocab, cfg);

    std::vector<int> ids_a, ids_b;
    for (const auto& w : data.family_a) ids_a.push_back(data.vocab.id(w));
    for (const auto& w : data.family_b) ids_b.push_back(data.vocab.id(w));
    double intra_a = synth::mean_group_cosine(m.W, ids_a, ids_a);
    double intra_b = synth::mean_group_cosine(m.W, ids_b, ids_b);
    double inter = synth::mean_group_cosine(m.W, ids_a, ids_b);
    CHECK(intra_a > inter);
    CHECK(intra_b > inter);
}

TEST_CASE("softmax training modes refuse oversized vocabularies") {
    TokenizedCorpus corpus;
    corpus.sentences.push_back({0, 1});
    std::vector<std::vector<std::string>> sents(1);
    for (int i = 0; i < 5001; ++i) sents[0].push_back("tok" + std::to_string(i));
    Vocabulary vocab = build_vocabulary(sents, 1);
    TrainConfig cfg;
    cfg.mode = TrainConfig::Mode::FullSoftmax;
    CHECK_THROWS(train_skipgram(corpus, vocab, cfg));
}

TEST_CASE("model file round trips, binary and text") {
    auto data = synth::make_two_family_corpus(45, 5000, 4);
    TrainConfig cfg;
    cfg.dim = 5;
    cfg.window = 2;
    cfg.epochs = 1;
    cfg.subsample_t = 1.0;
    EmbeddingModel m = train_skipgram(data.corpus, data.vocab, cfg);

    testsupport::TempDir tmp("model");
    save_model(m, tmp / "w2v.bin");
    EmbeddingModel back = load_model(tmp / "w2v.bin");
    CHECK(back.algorithm == m.algorithm);
    CHECK(back.tokens == m.tokens);
    CHECK(back.W.a == m.W.a);
    CHECK(back.W_ctx.a == m.W_ctx.a);
    CHECK(back.vocab_hash == m.vocab_hash);
    CHECK(back.query_combined == m.query_combined);

    save_model_text(m, tmp / "w2v.txt");
    auto lines = read_lines(tmp / "w2v.txt");
    REQUIRE(lines.size() == static_cast<std::size_t>(m.vocab_size()) + 1);
    CHECK(lines[0] == std::to_string(m.vocab_size()) + " " + std::to_string(m.dim()));
}
