#include "chemtext/sgns.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace chemtext {

namespace {

constexpr double kDotClip = 6.0;
constexpr double kLrFloorRatio = 1e-4;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log sigma with the dot product clamped to [-kDotClip, kDotClip]; the
// objective is flat beyond the clip, so its gradient there is zero.
double log_sigmoid_clipped(double x) {
    double c = std::clamp(x, -kDotClip, kDotClip);
    return -std::log1p(std::exp(-c));
}

double dot_rows(const Matrix& A, std::size_t i, const Matrix& B, std::size_t j) {
    const double* a = A.row(i);
    const double* b = B.row(j);
    double s = 0.0;
    for (std::size_t d = 0; d < A.cols; ++d) s += a[d] * b[d];
    return s;
}

void check_center(int center, const EmbeddingModel& model) {
    if (center < 0 || center >= model.vocab_size())
        throw std::out_of_range("skip-gram: word id out of range");
}

// u vector for a center word under the given mode.
std::vector<double> scores(int center, const EmbeddingModel& model, TrainConfig::Mode mode) {
    const Matrix& ctx = mode == TrainConfig::Mode::SingleSoftmax ? model.W : model.W_ctx;
    std::vector<double> u(static_cast<std::size_t>(model.vocab_size()));
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = dot_rows(ctx, i, model.W, static_cast<std::size_t>(center));
    return u;
}

}  // namespace

std::vector<double> softmax(std::span<const double> u) {
    if (u.empty()) throw std::invalid_argument("softmax: empty input");
    double umax = *std::max_element(u.begin(), u.end());
    std::vector<double> y(u.size());
    double z = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        y[i] = std::exp(u[i] - umax);
        z += y[i];
    }
    for (auto& v : y) v /= z;
    return y;
}

std::vector<double> skipgram_forward(int center, const EmbeddingModel& model,
                                     TrainConfig::Mode mode) {
    if (mode == TrainConfig::Mode::NegativeSampling)
        throw std::invalid_argument("skipgram_forward: forward pass is a softmax-mode operation");
    check_center(center, model);
    return softmax(scores(center, model, mode));
}

double skipgram_loss(int center, const std::vector<int>& context, const EmbeddingModel& model,
                     TrainConfig::Mode mode) {
    if (context.empty()) throw std::invalid_argument("skipgram_loss: empty context");
    check_center(center, model);
    for (int j : context) check_center(j, model);

    std::vector<double> u = scores(center, model, mode);
    double umax = *std::max_element(u.begin(), u.end());
    double z = 0.0;
    for (double v : u) z += std::exp(v - umax);
    double log_z = std::log(z);
    double loss = 0.0;
    for (int j : context) {
        loss -= (u[static_cast<std::size_t>(j)] - umax) - log_z;
    }
    return loss;
}

double skipgram_loss_grad(int center, const std::vector<int>& context, const EmbeddingModel& model,
                          TrainConfig::Mode mode, Matrix& gW, Matrix& gWctx) {
    if (context.empty()) throw std::invalid_argument("skipgram_loss_grad: empty context");
    check_center(center, model);
    const auto V = static_cast<std::size_t>(model.vocab_size());
    const std::size_t D = model.W.cols;
    const auto c = static_cast<std::size_t>(center);

    std::vector<double> u = scores(center, model, mode);
    std::vector<double> y = softmax(u);

    // grad wrt u: |context| * y - context multiplicity
    std::vector<double> e(V);
    for (std::size_t i = 0; i < V; ++i) e[i] = static_cast<double>(context.size()) * y[i];
    double loss = 0.0;
    double umax = *std::max_element(u.begin(), u.end());
    double z = 0.0;
    for (double v : u) z += std::exp(v - umax);
    double log_z = std::log(z);
    for (int j : context) {
        check_center(j, model);
        e[static_cast<std::size_t>(j)] -= 1.0;
        loss -= (u[static_cast<std::size_t>(j)] - umax) - log_z;
    }

    const Matrix& ctx = mode == TrainConfig::Mode::SingleSoftmax ? model.W : model.W_ctx;
    Matrix& gctx = mode == TrainConfig::Mode::SingleSoftmax ? gW : gWctx;
    for (std::size_t i = 0; i < V; ++i) {
        const double* wc = model.W.row(c);
        double* grow = gctx.row(i);
        for (std::size_t d = 0; d < D; ++d) grow[d] += e[i] * wc[d];
    }
    double* gc = gW.row(c);
    for (std::size_t i = 0; i < V; ++i) {
        const double* crow = ctx.row(i);
        for (std::size_t d = 0; d < D; ++d) gc[d] += e[i] * crow[d];
    }
    return loss;
}

double ns_pair_loss(int center, int target, const std::vector<int>& negatives,
                    const EmbeddingModel& model) {
    check_center(center, model);
    check_center(target, model);
    double loss = -log_sigmoid_clipped(
        dot_rows(model.W_ctx, static_cast<std::size_t>(target), model.W, static_cast<std::size_t>(center)));
    for (int n : negatives) {
        check_center(n, model);
        loss -= log_sigmoid_clipped(-dot_rows(model.W_ctx, static_cast<std::size_t>(n), model.W,
                                              static_cast<std::size_t>(center)));
    }
    return loss;
}

double ns_pair_loss_grad(int center, int target, const std::vector<int>& negatives,
                         const EmbeddingModel& model, Matrix& gW, Matrix& gWctx) {
    check_center(center, model);
    const auto c = static_cast<std::size_t>(center);
    const std::size_t D = model.W.cols;
    double loss = 0.0;

    auto accumulate = [&](int word, double label) {
        auto t = static_cast<std::size_t>(word);
        double dot = dot_rows(model.W_ctx, t, model.W, c);
        loss -= label > 0.5 ? log_sigmoid_clipped(dot) : log_sigmoid_clipped(-dot);
        if (std::abs(dot) >= kDotClip) return;  // flat region of the clipped objective
        double g = sigmoid(dot) - label;        // dL/d(dot)
        const double* wc = model.W.row(c);
        const double* wt = model.W_ctx.row(t);
        double* gt = gWctx.row(t);
        double* gc = gW.row(c);
        for (std::size_t d = 0; d < D; ++d) {
            gt[d] += g * wc[d];
            gc[d] += g * wt[d];
        }
    };

    check_center(target, model);
    accumulate(target, 1.0);
    for (int n : negatives) {
        check_center(n, model);
        accumulate(n, 0.0);
    }
    return loss;
}

namespace {

// Stateless per-(epoch, position) window draw so that the pair-count
// pre-pass and the training loop see identical window sizes.
int window_at(std::uint64_t wseed, int epoch, std::int64_t pos, int m, bool shrink) {
    if (!shrink) return m;
    std::uint64_t h = mix64(mix64(wseed ^ static_cast<std::uint64_t>(epoch + 1)) ^
                            static_cast<std::uint64_t>(pos));
    return 1 + static_cast<int>(h % static_cast<std::uint64_t>(m));
}

std::int64_t count_pairs(const TokenizedCorpus& corpus, const TrainConfig& cfg,
                         std::uint64_t wseed) {
    std::int64_t total = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::int64_t pos = 0;
        for (const auto& sent : corpus.sentences) {
            const int n = static_cast<int>(sent.size());
            for (int i = 0; i < n; ++i, ++pos) {
                int b = window_at(wseed, epoch, pos, cfg.window, cfg.shrink_window);
                int lo = std::max(0, i - b);
                int hi = std::min(n - 1, i + b);
                total += (hi - lo);  // window minus the center itself
            }
        }
    }
    return total;
}

struct NsTrainer {
    const TokenizedCorpus& corpus;
    const TrainConfig& cfg;
    EmbeddingModel& model;
    const AliasSampler& noise;
    std::uint64_t window_seed;
    std::int64_t total_pairs;
    std::atomic<std::int64_t> pair_counter{0};

    double train_range(std::size_t begin, std::size_t end, std::int64_t pos_offset, int epoch,
                       Rng& rng, std::int64_t* pairs_seen) {
        const std::size_t D = model.W.cols;
        std::vector<double> neu1e(D);
        double loss_sum = 0.0;
        std::int64_t local_pairs = 0;

        std::int64_t pos = pos_offset;
        for (std::size_t s = begin; s < end; ++s) {
            const auto& sent = corpus.sentences[s];
            const int n = static_cast<int>(sent.size());
            for (int i = 0; i < n; ++i, ++pos) {
                int b = window_at(window_seed, epoch, pos, cfg.window, cfg.shrink_window);
                auto c = static_cast<std::size_t>(sent[static_cast<std::size_t>(i)]);
                for (int off = -b; off <= b; ++off) {
                    if (off == 0) continue;
                    int j = i + off;
                    if (j < 0 || j >= n) continue;
                    auto target = static_cast<std::size_t>(sent[static_cast<std::size_t>(j)]);

                    std::int64_t done = pair_counter.fetch_add(1, std::memory_order_relaxed);
                    double lr = cfg.learning_rate *
                                std::max(kLrFloorRatio,
                                         1.0 - static_cast<double>(done) /
                                                   static_cast<double>(total_pairs));
                    ++local_pairs;

                    std::fill(neu1e.begin(), neu1e.end(), 0.0);
                    double* wc = model.W.row(c);
                    auto update = [&](std::size_t t, double label) {
                        double* wt = model.W_ctx.row(t);
                        double dot = 0.0;
                        for (std::size_t d = 0; d < D; ++d) dot += wt[d] * wc[d];
                        loss_sum -= label > 0.5 ? log_sigmoid_clipped(dot)
                                                : log_sigmoid_clipped(-dot);
                        if (std::abs(dot) >= kDotClip) return;
                        double g = lr * (label - sigmoid(dot));
                        for (std::size_t d = 0; d < D; ++d) {
                            neu1e[d] += g * wt[d];
                            wt[d] += g * wc[d];
                        }
                    };
                    update(target, 1.0);
                    for (int k = 0; k < cfg.negatives; ++k) {
                        std::size_t neg = noise.sample(rng);
                        if (neg == target) continue;
                        update(neg, 0.0);
                    }
                    for (std::size_t d = 0; d < D; ++d) wc[d] += neu1e[d];
                }
            }
        }
        if (pairs_seen) *pairs_seen = local_pairs;
        return loss_sum;
    }
};

// Exact gradient steps on the softmax cross-entropy pair loss.
void softmax_epoch(const TokenizedCorpus& corpus, const TrainConfig& cfg, EmbeddingModel& model,
                   std::uint64_t wseed, int epoch, std::int64_t total_pairs,
                   std::int64_t& pair_counter, double& loss_sum) {
    const bool single = cfg.mode == TrainConfig::Mode::SingleSoftmax;
    const auto V = static_cast<std::size_t>(model.vocab_size());
    const std::size_t D = model.W.cols;
    std::vector<double> u(V), y(V), gc(D);

    std::int64_t pos = 0;
    for (const auto& sent : corpus.sentences) {
        const int n = static_cast<int>(sent.size());
        for (int i = 0; i < n; ++i, ++pos) {
            int b = window_at(wseed, epoch, pos, cfg.window, cfg.shrink_window);
            auto c = static_cast<std::size_t>(sent[static_cast<std::size_t>(i)]);
            Matrix& ctx_mat = single ? model.W : model.W_ctx;
            for (int off = -b; off <= b; ++off) {
                if (off == 0) continue;
                int j = i + off;
                if (j < 0 || j >= n) continue;
                auto target = static_cast<std::size_t>(sent[static_cast<std::size_t>(j)]);

                double lr = cfg.learning_rate *
                            std::max(kLrFloorRatio, 1.0 - static_cast<double>(pair_counter) /
                                                              static_cast<double>(total_pairs));
                ++pair_counter;

                const double* wc = model.W.row(c);
                double umax = -1e300;
                for (std::size_t v = 0; v < V; ++v) {
                    double dot = 0.0;
                    const double* row = ctx_mat.row(v);
                    for (std::size_t d = 0; d < D; ++d) dot += row[d] * wc[d];
                    u[v] = dot;
                    umax = std::max(umax, dot);
                }
                double z = 0.0;
                for (std::size_t v = 0; v < V; ++v) {
                    y[v] = std::exp(u[v] - umax);
                    z += y[v];
                }
                loss_sum -= (u[target] - umax) - std::log(z);

                // e = y_hat - onehot(target); gc uses pre-update rows
                std::fill(gc.begin(), gc.end(), 0.0);
                for (std::size_t v = 0; v < V; ++v) {
                    double e = y[v] / z - (v == target ? 1.0 : 0.0);
                    const double* row = ctx_mat.row(v);
                    for (std::size_t d = 0; d < D; ++d) gc[d] += e * row[d];
                }
                for (std::size_t v = 0; v < V; ++v) {
                    double e = y[v] / z - (v == target ? 1.0 : 0.0);
                    double* row = ctx_mat.row(v);
                    const double* wc_now = model.W.row(c);
                    for (std::size_t d = 0; d < D; ++d) row[d] -= lr * e * wc_now[d];
                }
                double* wc_mut = model.W.row(c);
                for (std::size_t d = 0; d < D; ++d) wc_mut[d] -= lr * gc[d];
            }
        }
    }
}

}  // namespace

EmbeddingModel train_skipgram(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                              const TrainConfig& cfg, TrainStats* stats) {
    if (corpus.sentences.empty()) throw std::invalid_argument("train_skipgram: empty corpus");
    if (cfg.dim < 1 || cfg.window < 1 || cfg.epochs < 1 || cfg.negatives < 1 ||
        cfg.learning_rate <= 0.0)
        throw std::invalid_argument("train_skipgram: bad configuration");
    const bool softmax_mode = cfg.mode != TrainConfig::Mode::NegativeSampling;
    if (softmax_mode && vocab.size() > 5000)
        throw std::invalid_argument(
            "train_skipgram: softmax modes are limited to V <= 5000; use negative sampling");

    TokenizedCorpus subsampled;
    const TokenizedCorpus* train_corpus = &corpus;
    if (cfg.subsample_t < 1.0) {
        subsampled = subsample(corpus, vocab, cfg.subsample_t, derive_seed(cfg.seed, "subsample"));
        train_corpus = &subsampled;
    }
    if (train_corpus->sentences.empty())
        throw std::invalid_argument("train_skipgram: corpus empty after subsampling");

    EmbeddingModel model;
    model.algorithm = "word2vec";
    model.set_tokens(vocab);
    const auto V = static_cast<std::size_t>(vocab.size());
    const auto D = static_cast<std::size_t>(cfg.dim);
    model.W = Matrix(V, D);
    model.W_ctx = Matrix(V, D);
    {
        Rng init_rng(derive_seed(cfg.seed, "init"));
        for (auto& v : model.W.a) v = (init_rng.next_double() - 0.5) / static_cast<double>(D);
    }

    const std::uint64_t wseed = derive_seed(cfg.seed, "window");
    const std::int64_t total_pairs = count_pairs(*train_corpus, cfg, wseed);
    if (total_pairs == 0) throw std::invalid_argument("train_skipgram: no training pairs");

    if (stats) {
        stats->epoch_mean_loss.clear();
        stats->pairs_processed = 0;
    }

    if (softmax_mode) {
        std::int64_t pair_counter = 0;
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            double loss_sum = 0.0;
            std::int64_t before = pair_counter;
            softmax_epoch(*train_corpus, cfg, model, wseed, epoch, total_pairs, pair_counter,
                          loss_sum);
            if (stats) {
                stats->epoch_mean_loss.push_back(loss_sum /
                                                 static_cast<double>(pair_counter - before));
                stats->pairs_processed = pair_counter;
            }
        }
        return model;
    }

    // negative sampling: unigram^(3/4) noise distribution
    std::vector<double> noise_weights(V);
    for (std::size_t i = 0; i < V; ++i)
        noise_weights[i] = std::pow(static_cast<double>(vocab.count(static_cast<int>(i))), 0.75);
    AliasSampler noise(noise_weights);

    NsTrainer trainer{*train_corpus, cfg, model, noise, wseed, total_pairs};

    const int workers = std::max(1, cfg.workers);
    // sentence start offsets for stateless window draws
    std::vector<std::int64_t> offsets(train_corpus->sentences.size() + 1, 0);
    for (std::size_t s = 0; s < train_corpus->sentences.size(); ++s)
        offsets[s + 1] = offsets[s] + static_cast<std::int64_t>(train_corpus->sentences[s].size());

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        std::int64_t epoch_pairs = 0;
        if (workers == 1) {
            Rng rng(derive_seed(cfg.seed, "negatives") + static_cast<std::uint64_t>(epoch));
            epoch_loss = trainer.train_range(0, train_corpus->sentences.size(), 0, epoch, rng,
                                             &epoch_pairs);
        } else {
            std::vector<std::thread> threads;
            std::vector<double> losses(static_cast<std::size_t>(workers), 0.0);
            std::vector<std::int64_t> pair_counts(static_cast<std::size_t>(workers), 0);
            const std::size_t per = (train_corpus->sentences.size() + static_cast<std::size_t>(workers) - 1) /
                                    static_cast<std::size_t>(workers);
            for (int w = 0; w < workers; ++w) {
                std::size_t begin = static_cast<std::size_t>(w) * per;
                std::size_t end = std::min(train_corpus->sentences.size(), begin + per);
                if (begin >= end) continue;
                threads.emplace_back([&, w, begin, end] {
                    Rng rng(derive_seed(cfg.seed, "negatives") +
                            mix64((static_cast<std::uint64_t>(epoch) << 16) ^
                                  static_cast<std::uint64_t>(w)));
                    losses[static_cast<std::size_t>(w)] = trainer.train_range(
                        begin, end, offsets[begin], epoch, rng,
                        &pair_counts[static_cast<std::size_t>(w)]);
                });
            }
            for (auto& t : threads) t.join();
            for (double l : losses) epoch_loss += l;
            for (auto c : pair_counts) epoch_pairs += c;
        }
        if (stats) {
            stats->epoch_mean_loss.push_back(epoch_loss / static_cast<double>(epoch_pairs));
            stats->pairs_processed += epoch_pairs;
        }
    }
    return model;
}

}  // namespace chemtext
