#pragma once

#include <cstdint>

#include "chemtext/cooc.hpp"
#include "chemtext/embedding.hpp"

namespace chemtext {

// GloVe parameters: two vector sets plus per-word biases on both sides.
struct GloveModel {
    Matrix W;       // w_i
    Matrix W_tilde; // w~_j
    std::vector<double> b;
    std::vector<double> b_tilde;
    double x_max = 100.0;
    double alpha = 0.75;

    int vocab_size() const { return static_cast<int>(W.rows); }
    int dim() const { return static_cast<int>(W.cols); }
    bool all_finite() const;
};

struct GloveConfig {
    int dim = 200;
    int epochs = 25;
    double learning_rate = 0.05;
    double x_max = 100.0;
    double alpha = 0.75;
    std::uint64_t seed = 1;
    enum class Optimizer { AdaGrad, Sgd };
    Optimizer optimizer = Optimizer::AdaGrad;
    int workers = 1;
};

// w_i . w~_j + b_i + b_j - log(1 + x); the model's fit error on one entry.
double glove_pair_residual(const GloveModel& model, int i, int j, double x);

// Least-squares weight: (x / x_max)^alpha below the cap, 1 at and above it.
double glove_weight(double x, double x_max, double alpha);

// Sum of f(x) * residual^2 over the stored nonzeros.
double glove_loss(const GloveModel& model, const CoocMatrix& cooc);

// Analytic gradient of glove_loss accumulated into the g* buffers.
double glove_loss_grad(const GloveModel& model, const CoocMatrix& cooc, Matrix& gW,
                       Matrix& gW_tilde, std::vector<double>& gb, std::vector<double>& gb_tilde);

// Per-entry stochastic updates over a seeded shuffle of the nonzeros.
// Deterministic for a fixed seed when workers == 1.
GloveModel train_glove(const CoocMatrix& cooc, const GloveConfig& cfg, TrainStats* stats = nullptr);

Matrix combined_vectors(const GloveModel& model);

// Packages a trained GloVe model for the shared query/model-file machinery.
EmbeddingModel to_embedding_model(const GloveModel& model, const Vocabulary& vocab,
                                  bool query_combined = true);

}  // namespace chemtext
