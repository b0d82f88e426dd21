#include "chemtext/glove.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace chemtext {

bool GloveModel::all_finite() const {
    if (!W.all_finite() || !W_tilde.all_finite()) return false;
    for (double v : b)
        if (!std::isfinite(v)) return false;
    for (double v : b_tilde)
        if (!std::isfinite(v)) return false;
    return true;
}

double glove_pair_residual(const GloveModel& model, int i, int j, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("glove_pair_residual: x must be positive");
    auto ii = static_cast<std::size_t>(i);
    auto jj = static_cast<std::size_t>(j);
    const double* wi = model.W.row(ii);
    const double* wj = model.W_tilde.row(jj);
    double dot = 0.0;
    for (std::size_t d = 0; d < model.W.cols; ++d) dot += wi[d] * wj[d];
    return dot + model.b[ii] + model.b_tilde[jj] - std::log1p(x);
}

double glove_weight(double x, double x_max, double alpha) {
    if (x >= x_max) return 1.0;
    return std::pow(x / x_max, alpha);
}

double glove_loss(const GloveModel& model, const CoocMatrix& cooc) {
    double loss = 0.0;
    for (const auto& e : cooc.entries) {
        double r = glove_pair_residual(model, static_cast<int>(e.i), static_cast<int>(e.j), e.x);
        loss += glove_weight(e.x, model.x_max, model.alpha) * r * r;
    }
    return loss;
}

double glove_loss_grad(const GloveModel& model, const CoocMatrix& cooc, Matrix& gW,
                       Matrix& gW_tilde, std::vector<double>& gb, std::vector<double>& gb_tilde) {
    const std::size_t D = model.W.cols;
    double loss = 0.0;
    for (const auto& e : cooc.entries) {
        auto i = static_cast<std::size_t>(e.i);
        auto j = static_cast<std::size_t>(e.j);
        double r = glove_pair_residual(model, static_cast<int>(e.i), static_cast<int>(e.j), e.x);
        double f = glove_weight(e.x, model.x_max, model.alpha);
        loss += f * r * r;
        double coeff = 2.0 * f * r;
        const double* wi = model.W.row(i);
        const double* wj = model.W_tilde.row(j);
        double* gi = gW.row(i);
        double* gj = gW_tilde.row(j);
        for (std::size_t d = 0; d < D; ++d) {
            gi[d] += coeff * wj[d];
            gj[d] += coeff * wi[d];
        }
        gb[i] += coeff;
        gb_tilde[j] += coeff;
    }
    return loss;
}

namespace {

struct Accumulators {
    Matrix W, W_tilde;
    std::vector<double> b, b_tilde;
};

// One stochastic update on a single nonzero entry; returns its pre-update
// weighted squared residual.
double update_entry(GloveModel& m, const CoocEntry& e, const GloveConfig& cfg, Accumulators* acc) {
    const std::size_t D = m.W.cols;
    auto i = static_cast<std::size_t>(e.i);
    auto j = static_cast<std::size_t>(e.j);
    double* wi = m.W.row(i);
    double* wj = m.W_tilde.row(j);

    double dot = 0.0;
    for (std::size_t d = 0; d < D; ++d) dot += wi[d] * wj[d];
    double r = dot + m.b[i] + m.b_tilde[j] - std::log1p(e.x);
    double f = glove_weight(e.x, m.x_max, m.alpha);
    double coeff = 2.0 * f * r;

    if (cfg.optimizer == GloveConfig::Optimizer::AdaGrad) {
        double* ai = acc->W.row(i);
        double* aj = acc->W_tilde.row(j);
        for (std::size_t d = 0; d < D; ++d) {
            double gi = coeff * wj[d];
            double gj = coeff * wi[d];
            wi[d] -= cfg.learning_rate * gi / std::sqrt(ai[d]);
            wj[d] -= cfg.learning_rate * gj / std::sqrt(aj[d]);
            ai[d] += gi * gi;
            aj[d] += gj * gj;
        }
        m.b[i] -= cfg.learning_rate * coeff / std::sqrt(acc->b[i]);
        m.b_tilde[j] -= cfg.learning_rate * coeff / std::sqrt(acc->b_tilde[j]);
        acc->b[i] += coeff * coeff;
        acc->b_tilde[j] += coeff * coeff;
    } else {
        for (std::size_t d = 0; d < D; ++d) {
            double gi = coeff * wj[d];
            double gj = coeff * wi[d];
            wi[d] -= cfg.learning_rate * gi;
            wj[d] -= cfg.learning_rate * gj;
        }
        m.b[i] -= cfg.learning_rate * coeff;
        m.b_tilde[j] -= cfg.learning_rate * coeff;
    }
    return f * r * r;
}

}  // namespace

GloveModel train_glove(const CoocMatrix& cooc, const GloveConfig& cfg, TrainStats* stats) {
    if (cooc.entries.empty() && cfg.epochs > 0)
        throw std::invalid_argument("train_glove: empty co-occurrence matrix");
    if (cfg.dim < 1 || cfg.epochs < 0 || cfg.learning_rate <= 0.0 || cfg.x_max <= 0.0 ||
        cfg.alpha <= 0.0)
        throw std::invalid_argument("train_glove: bad configuration");

    const std::size_t V = cooc.vocab_size;
    const auto D = static_cast<std::size_t>(cfg.dim);

    GloveModel model;
    model.x_max = cfg.x_max;
    model.alpha = cfg.alpha;
    model.W = Matrix(V, D);
    model.W_tilde = Matrix(V, D);
    model.b.assign(V, 0.0);
    model.b_tilde.assign(V, 0.0);
    {
        Rng init_rng(derive_seed(cfg.seed, "glove-init"));
        auto u = [&] { return (init_rng.next_double() - 0.5) / static_cast<double>(D); };
        for (auto& v : model.W.a) v = u();
        for (auto& v : model.W_tilde.a) v = u();
        for (auto& v : model.b) v = u();
        for (auto& v : model.b_tilde) v = u();
    }

    Accumulators acc;
    if (cfg.optimizer == GloveConfig::Optimizer::AdaGrad) {
        acc.W = Matrix(V, D);
        acc.W_tilde = Matrix(V, D);
        std::fill(acc.W.a.begin(), acc.W.a.end(), 1.0);
        std::fill(acc.W_tilde.a.begin(), acc.W_tilde.a.end(), 1.0);
        acc.b.assign(V, 1.0);
        acc.b_tilde.assign(V, 1.0);
    }

    if (stats) {
        stats->epoch_mean_loss.clear();
        stats->pairs_processed = 0;
    }

    std::vector<std::size_t> order(cooc.entries.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(cfg.seed, "glove-shuffle"));
    const int workers = std::max(1, cfg.workers);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        if (workers == 1) {
            for (std::size_t k : order) {
                epoch_loss += update_entry(model, cooc.entries[k], cfg, &acc);
            }
        } else {
            std::vector<std::thread> threads;
            std::vector<double> losses(static_cast<std::size_t>(workers), 0.0);
            const std::size_t per =
                (order.size() + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
            for (int w = 0; w < workers; ++w) {
                std::size_t begin = static_cast<std::size_t>(w) * per;
                std::size_t end = std::min(order.size(), begin + per);
                if (begin >= end) continue;
                threads.emplace_back([&, w, begin, end] {
                    double local = 0.0;
                    for (std::size_t k = begin; k < end; ++k)
                        local += update_entry(model, cooc.entries[order[k]], cfg, &acc);
                    losses[static_cast<std::size_t>(w)] = local;
                });
            }
            for (auto& t : threads) t.join();
            for (double l : losses) epoch_loss += l;
        }
        if (stats) {
            stats->epoch_mean_loss.push_back(epoch_loss / static_cast<double>(cooc.entries.size()));
            stats->pairs_processed += static_cast<std::int64_t>(cooc.entries.size());
        }
    }
    return model;
}

Matrix combined_vectors(const GloveModel& model) {
    Matrix out = model.W;
    for (std::size_t k = 0; k < out.a.size(); ++k) out.a[k] += model.W_tilde.a[k];
    return out;
}

EmbeddingModel to_embedding_model(const GloveModel& model, const Vocabulary& vocab,
                                  bool query_combined) {
    if (static_cast<int>(model.W.rows) != vocab.size())
        throw std::invalid_argument("to_embedding_model: vocabulary size mismatch");
    EmbeddingModel out;
    out.algorithm = "glove";
    out.set_tokens(vocab);
    out.W = model.W;
    out.W_ctx = model.W_tilde;
    out.b = model.b;
    out.b_ctx = model.b_tilde;
    out.query_combined = query_combined;
    return out;
}

}  // namespace chemtext
