#include "chemtext/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "chemtext/util.hpp"

using json = nlohmann::json;

namespace chemtext {

void LinearModel::save_json(const std::filesystem::path& p) const {
    json j = {{"algorithm", "linear_svm"},
              {"schema", schema},
              {"weights", weights},
              {"bias", bias},
              {"decision_threshold", decision_threshold},
              {"metadata", metadata}};
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write model: " + p.string());
    out << j.dump(2) << "\n";
}

LinearModel LinearModel::load_json(const std::filesystem::path& p) {
    json j = json::parse(read_file(p));
    LinearModel m;
    m.schema = j.at("schema").get<std::vector<std::string>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.decision_threshold = j.at("decision_threshold").get<double>();
    if (j.contains("metadata")) {
        for (auto& [k, v] : j.at("metadata").items()) m.metadata[k] = v.get<double>();
    }
    if (m.weights.size() != m.schema.size())
        throw std::runtime_error("model weights do not match schema length");
    return m;
}

double rank_sum_auroc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("auroc: size mismatch");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // midranks over tied score groups
    std::vector<double> rank(scores.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }

    double pos_rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k]) {
            pos_rank_sum += rank[k];
            ++n_pos;
        }
    }
    std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auroc: needs both classes");
    double u = pos_rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

double dot(const std::vector<double>& w, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
}

}  // namespace

LinearModel train_linear_classifier(const std::vector<FeatureVector>& features,
                                    const std::vector<bool>& labels, const SvmConfig& cfg,
                                    HoldoutMetrics* metrics) {
    if (features.size() != labels.size())
        throw std::invalid_argument("train_linear_classifier: features/labels size mismatch");
    if (features.empty()) throw std::invalid_argument("train_linear_classifier: no data");

    const std::vector<std::string>& schema = features[0].schema;
    for (const auto& f : features) {
        if (f.schema != schema)
            throw std::invalid_argument("train_linear_classifier: feature schemas differ");
        if (f.values.size() != schema.size())
            throw std::invalid_argument("train_linear_classifier: feature length mismatch");
    }

    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (pos.size() < 2 || neg.size() < 2)
        throw std::invalid_argument("train_linear_classifier: need at least 2 examples per class");

    // stratified split, seeded
    Rng rng(derive_seed(cfg.seed, "svm-split"));
    rng.shuffle(pos);
    rng.shuffle(neg);
    auto take = [&](const std::vector<std::size_t>& idx, double frac) {
        std::size_t n_test = static_cast<std::size_t>(std::floor(frac * static_cast<double>(idx.size())));
        if (frac > 0.0 && n_test == 0 && idx.size() > 2) n_test = 1;
        return n_test;
    };
    std::size_t pos_test = take(pos, cfg.holdout_fraction);
    std::size_t neg_test = take(neg, cfg.holdout_fraction);

    std::vector<std::size_t> train_idx, test_idx;
    train_idx.insert(train_idx.end(), pos.begin() + static_cast<std::ptrdiff_t>(pos_test), pos.end());
    train_idx.insert(train_idx.end(), neg.begin() + static_cast<std::ptrdiff_t>(neg_test), neg.end());
    test_idx.insert(test_idx.end(), pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(pos_test));
    test_idx.insert(test_idx.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(neg_test));

    LinearModel model;
    model.schema = schema;
    model.weights.assign(schema.size(), 0.0);
    model.bias = 0.0;
    model.decision_threshold = 0.0;

    Rng order_rng(derive_seed(cfg.seed, "svm-order"));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        order_rng.shuffle(train_idx);
        double lr = cfg.learning_rate / (1.0 + static_cast<double>(epoch));
        for (std::size_t idx : train_idx) {
            const auto& x = features[idx].values;
            double y = labels[idx] ? 1.0 : -1.0;
            double margin = y * (dot(model.weights, x) + model.bias);
            for (std::size_t d = 0; d < model.weights.size(); ++d) {
                double grad = cfg.lambda * model.weights[d];
                if (margin < 1.0) grad -= y * x[d];
                model.weights[d] -= lr * grad;
            }
            if (margin < 1.0) model.bias += lr * y;
        }
    }

    model.metadata["epochs"] = cfg.epochs;
    model.metadata["learning_rate"] = cfg.learning_rate;
    model.metadata["lambda"] = cfg.lambda;
    model.metadata["seed"] = static_cast<double>(cfg.seed);
    model.metadata["n_train"] = static_cast<double>(train_idx.size());

    if (!test_idx.empty()) {
        std::vector<double> scores;
        std::vector<bool> truth;
        int correct = 0, fp = 0, n_neg_test = 0;
        for (std::size_t idx : test_idx) {
            double s = dot(model.weights, features[idx].values) + model.bias;
            bool predicted = s > model.decision_threshold;
            scores.push_back(s);
            truth.push_back(labels[idx]);
            if (predicted == labels[idx]) ++correct;
            if (!labels[idx]) {
                ++n_neg_test;
                if (predicted) ++fp;
            }
        }
        HoldoutMetrics hm;
        hm.accuracy = static_cast<double>(correct) / static_cast<double>(test_idx.size());
        hm.auroc = rank_sum_auroc(scores, truth);
        hm.false_positive_rate =
            n_neg_test > 0 ? static_cast<double>(fp) / static_cast<double>(n_neg_test) : 0.0;
        hm.n_train = static_cast<int>(train_idx.size());
        hm.n_test = static_cast<int>(test_idx.size());
        model.metadata["holdout_accuracy"] = hm.accuracy;
        model.metadata["holdout_auroc"] = hm.auroc;
        model.metadata["holdout_fpr"] = hm.false_positive_rate;
        model.metadata["n_test"] = static_cast<double>(hm.n_test);
        if (metrics) *metrics = hm;
    } else if (metrics) {
        *metrics = HoldoutMetrics{};
        metrics->n_train = static_cast<int>(train_idx.size());
    }
    return model;
}

Classification classify_energetic(const LinearModel& model, const FeatureVector& x) {
    if (x.values.size() != model.weights.size())
        throw std::invalid_argument("classify_energetic: feature schema mismatch");
    double score = dot(model.weights, x.values) + model.bias;
    return {score, score > model.decision_threshold};
}

}  // namespace chemtext
