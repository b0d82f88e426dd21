#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chemtext/chemlex.hpp"
#include "chemtext/embedding.hpp"

namespace chemtext {

// Cosine similarity, clamped to [-1, 1]; rejects zero vectors.
double cosine(std::span<const double> w1, std::span<const double> w2);
double euclidean(std::span<const double> w1, std::span<const double> w2);

enum class FilterLevel { AllWords, ChemicalNames, LikelyEnergetics };

std::string to_string(FilterLevel f);
FilterLevel filter_level_from_string(std::string_view s);

struct RankedItem {
    std::string token;
    int id;
    double score;
};

struct SimilarityRanking {
    std::string query;
    FilterLevel filter_level = FilterLevel::AllWords;
    std::vector<RankedItem> items;  // scores non-increasing, ties by ascending id
};

// Top-k by cosine over the candidate set the filter defines; the query
// itself is excluded. Out-of-vocabulary queries raise an error that names
// the closest spellings.
SimilarityRanking nearest(const std::string& query, int k, FilterLevel filter,
                          const EmbeddingModel& model, const ChemLexicon* lexicon);

// Top-k application words for a chemical token, over the in-vocabulary part
// of the application list.
SimilarityRanking application_words(const std::string& chem,
                                    const std::vector<std::string>& app_list, int k,
                                    const EmbeddingModel& model);

struct GroupSimilarity {
    double mean_cosine = 0.0;
    double mean_euclidean = 0.0;
    double mean_euclidean_normalized = 0.0;  // after scaling vectors to unit norm
    std::vector<std::string> used_a, used_b;
    std::vector<std::string> missing_a, missing_b;
};

// Mean pairwise similarity between groups; for A == B, distinct unordered
// pairs only. Raises when a group has no in-vocabulary tokens.
GroupSimilarity group_similarity(const std::vector<std::string>& group_a,
                                 const std::vector<std::string>& group_b,
                                 const EmbeddingModel& model);

// Ranks the vocabulary (minus a, b, c) by cosine to w_b - w_a + w_c.
SimilarityRanking analogy(const std::string& a, const std::string& b, const std::string& c, int k,
                          const EmbeddingModel& model);

enum class HubMetric { Cosine, Euclidean };

struct HubnessReport {
    std::vector<std::string> tokens;
    std::vector<int> counts;  // appearances in other tokens' k-NN lists
    double skewness = 0.0;
};

// Exact brute-force k-NN hub counts over a candidate set.
HubnessReport hubness(const EmbeddingModel& model, int k, const std::vector<std::string>& candidates,
                      HubMetric metric);

struct PcaProjection {
    Matrix components;                      // ncomp x D, orthonormal rows
    std::vector<double> explained_variance; // non-increasing
    Matrix coordinates;                     // n x ncomp
    std::vector<std::string> tokens;
};

// Mean-centered covariance eigendecomposition via cyclic Jacobi sweeps.
// Sign convention: the largest-magnitude entry of each component is
// positive.
PcaProjection pca_project(const EmbeddingModel& model, const std::vector<std::string>& tokens,
                          int ncomp);

// Jacobi eigendecomposition of a symmetric matrix; eigenpairs sorted by
// descending eigenvalue. Exposed for direct testing.
void jacobi_eigen(const Matrix& symmetric, std::vector<double>& eigenvalues, Matrix& eigenvectors);

}  // namespace chemtext
