#pragma once

#include <span>
#include <vector>

#include "chemtext/embedding.hpp"

namespace chemtext {

// Overflow-safe softmax (max subtraction). Output sums to 1 within 1e-12 and
// is invariant to adding a constant to every input.
std::vector<double> softmax(std::span<const double> u);

// Predicted context distribution for a center word. FullSoftmax uses
// softmax(W_ctx * w_c); SingleSoftmax uses softmax over dot products within
// W alone.
std::vector<double> skipgram_forward(int center, const EmbeddingModel& model,
                                     TrainConfig::Mode mode);

// Cross-entropy of the context set under the predicted distribution:
// -sum_{j in context} log y_hat_j.
double skipgram_loss(int center, const std::vector<int>& context, const EmbeddingModel& model,
                     TrainConfig::Mode mode);

// Loss plus analytic gradients (accumulated into gW / gWctx, which must be
// zero-initialized to read the gradient alone). Shared by the trainer and
// the finite-difference checks.
double skipgram_loss_grad(int center, const std::vector<int>& context, const EmbeddingModel& model,
                          TrainConfig::Mode mode, Matrix& gW, Matrix& gWctx);

// Negative-sampling objective for one (center, observed-context) pair with a
// fixed negative set: -log s(w~_o . w_c) - sum_k log s(-w~_k . w_c), with
// dot products clamped to [-6, 6] inside the sigmoid (flat beyond).
double ns_pair_loss(int center, int target, const std::vector<int>& negatives,
                    const EmbeddingModel& model);
double ns_pair_loss_grad(int center, int target, const std::vector<int>& negatives,
                         const EmbeddingModel& model, Matrix& gW, Matrix& gWctx);

// Skip-gram trainer. Softmax modes do exact gradient steps on the
// cross-entropy loss and are limited to V <= 5000; negative sampling draws
// from unigram^(3/4). Deterministic for a fixed seed when workers == 1.
EmbeddingModel train_skipgram(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                              const TrainConfig& cfg, TrainStats* stats = nullptr);

}  // namespace chemtext
