#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chemtext/smiles.hpp"

namespace chemtext {

struct LinearModel {
    std::vector<std::string> schema;
    std::vector<double> weights;
    double bias = 0.0;
    double decision_threshold = 0.0;
    std::map<std::string, double> metadata;  // training settings + hold-out metrics

    void save_json(const std::filesystem::path& p) const;
    static LinearModel load_json(const std::filesystem::path& p);
};

struct SvmConfig {
    int epochs = 80;
    double learning_rate = 0.1;
    double lambda = 1e-3;  // L2 regularization strength
    std::uint64_t seed = 1;
    double holdout_fraction = 0.2;  // 0 trains on everything, no metrics
};

struct HoldoutMetrics {
    double accuracy = 0.0;
    double auroc = 0.0;
    double false_positive_rate = 0.0;
    int n_train = 0;
    int n_test = 0;
};

// Hinge loss + L2, minimized by seeded stochastic subgradient descent.
// With a hold-out fraction, training uses a stratified 80/20-style split and
// reports metrics on the held-out part.
LinearModel train_linear_classifier(const std::vector<FeatureVector>& features,
                                    const std::vector<bool>& labels, const SvmConfig& cfg,
                                    HoldoutMetrics* metrics = nullptr);

struct Classification {
    double score;
    bool label;
};

// score = w.x + bias; label = score > decision_threshold.
Classification classify_energetic(const LinearModel& model, const FeatureVector& x);

// Rank-sum (Mann-Whitney) AUC with midrank tie handling.
double rank_sum_auroc(const std::vector<double>& scores, const std::vector<bool>& labels);

}  // namespace chemtext
