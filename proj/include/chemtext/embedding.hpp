#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "chemtext/textprep.hpp"
#include "chemtext/util.hpp"

namespace chemtext {

// Trained embedding matrices plus the vocabulary they index. W holds the
// center/word vectors; W_ctx holds the context-side vectors (word2vec's W'
// or GloVe's w-tilde).
struct EmbeddingModel {
    std::string algorithm;  // "word2vec" | "glove"
    std::vector<std::string> tokens;
    std::unordered_map<std::string, int> token_to_id;
    Matrix W;
    Matrix W_ctx;
    std::vector<double> b;      // GloVe biases; empty for word2vec
    std::vector<double> b_ctx;
    bool query_combined = false;  // query vectors = W + W_ctx rows (GloVe)
    std::uint64_t vocab_hash = 0;

    int vocab_size() const { return static_cast<int>(W.rows); }
    int dim() const { return static_cast<int>(W.cols); }

    int id(std::string_view token) const;
    // Per-algorithm query vector convention: word2vec uses W rows, GloVe the
    // combined w + w~ rows (switchable via query_combined).
    std::vector<double> query_vector(int id) const;
    Matrix query_matrix() const;

    void set_tokens(const Vocabulary& vocab);
};

void save_model(const EmbeddingModel& model, const std::filesystem::path& p);
EmbeddingModel load_model(const std::filesystem::path& p);

// Interop text format: header "V D", then one word and D values per line.
void save_model_text(const EmbeddingModel& model, const std::filesystem::path& p);

struct TrainConfig {
    int dim = 200;
    int window = 8;
    int epochs = 5;
    double learning_rate = 0.025;
    int negatives = 5;
    double subsample_t = 1e-4;
    int min_count = 5;
    std::uint64_t seed = 1;
    enum class Mode { FullSoftmax, SingleSoftmax, NegativeSampling };
    Mode mode = Mode::NegativeSampling;
    bool shrink_window = true;  // per-center window size uniform in [1, m]
    int workers = 1;            // >1 enables lock-free parallel updates
};

struct TrainStats {
    std::vector<double> epoch_mean_loss;
    std::int64_t pairs_processed = 0;
};

}  // namespace chemtext
