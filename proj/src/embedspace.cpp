#include "chemtext/embedspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chemtext {

double cosine(std::span<const double> w1, std::span<const double> w2) {
    if (w1.size() != w2.size()) throw std::invalid_argument("cosine: length mismatch");
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t d = 0; d < w1.size(); ++d) {
        dot += w1[d] * w2[d];
        n1 += w1[d] * w1[d];
        n2 += w2[d] * w2[d];
    }
    if (n1 == 0.0 || n2 == 0.0) throw std::invalid_argument("cosine: zero vector");
    return std::clamp(dot / (std::sqrt(n1) * std::sqrt(n2)), -1.0, 1.0);
}

double euclidean(std::span<const double> w1, std::span<const double> w2) {
    if (w1.size() != w2.size()) throw std::invalid_argument("euclidean: length mismatch");
    double sum = 0.0;
    for (std::size_t d = 0; d < w1.size(); ++d) {
        double diff = w1[d] - w2[d];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

std::string to_string(FilterLevel f) {
    switch (f) {
        case FilterLevel::AllWords: return "all_words";
        case FilterLevel::ChemicalNames: return "chemical_names";
        case FilterLevel::LikelyEnergetics: return "likely_energetics";
    }
    return "all_words";
}

FilterLevel filter_level_from_string(std::string_view s) {
    if (s == "all_words" || s == "all") return FilterLevel::AllWords;
    if (s == "chemical_names" || s == "chemicals") return FilterLevel::ChemicalNames;
    if (s == "likely_energetics" || s == "energetics") return FilterLevel::LikelyEnergetics;
    throw std::invalid_argument("unknown filter level: " + std::string(s));
}

namespace {

int resolve_token(const EmbeddingModel& model, const std::string& token) {
    int id = model.id(token);
    if (id < 0) id = model.id(to_lower(token));
    return id;
}

[[noreturn]] void oov_error(const EmbeddingModel& model, const std::string& token) {
    std::vector<std::pair<std::size_t, std::string>> scored;
    std::string lower = to_lower(token);
    for (const auto& t : model.tokens) scored.emplace_back(levenshtein(lower, t), t);
    std::sort(scored.begin(), scored.end());
    std::string suggestions;
    for (std::size_t i = 0; i < scored.size() && i < 3; ++i) {
        if (i) suggestions += ", ";
        suggestions += scored[i].second;
    }
    throw std::invalid_argument("'" + token + "' is not in the vocabulary; nearest spellings: " +
                                suggestions);
}

std::vector<int> candidate_ids(const EmbeddingModel& model, FilterLevel filter,
                               const ChemLexicon* lexicon) {
    std::vector<int> ids;
    if (filter == FilterLevel::AllWords) {
        ids.resize(static_cast<std::size_t>(model.vocab_size()));
        std::iota(ids.begin(), ids.end(), 0);
        return ids;
    }
    if (!lexicon)
        throw std::invalid_argument("chemical-name filters need a lexicon");
    for (int i = 0; i < model.vocab_size(); ++i) {
        int entry = lexicon->lookup_surface(model.tokens[static_cast<std::size_t>(i)]);
        if (entry < 0) continue;
        if (filter == FilterLevel::LikelyEnergetics) {
            const auto& label = lexicon->entry(entry).energetic_label;
            if (!label.has_value() || !*label) continue;
        }
        ids.push_back(i);
    }
    return ids;
}

SimilarityRanking rank_by_cosine(const EmbeddingModel& model, const std::vector<double>& target,
                                 const std::vector<int>& candidates, int k) {
    std::vector<RankedItem> items;
    items.reserve(candidates.size());
    for (int id : candidates) {
        std::vector<double> v = model.query_vector(id);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        if (norm == 0.0) continue;  // unrankable
        items.push_back({model.tokens[static_cast<std::size_t>(id)], id, cosine(target, v)});
    }
    std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (static_cast<int>(items.size()) > k) items.resize(static_cast<std::size_t>(k));
    SimilarityRanking r;
    r.items = std::move(items);
    return r;
}

}  // namespace

SimilarityRanking nearest(const std::string& query, int k, FilterLevel filter,
                          const EmbeddingModel& model, const ChemLexicon* lexicon) {
    if (k < 1) throw std::invalid_argument("nearest: k must be >= 1");
    int q = resolve_token(model, query);
    if (q < 0) oov_error(model, query);

    std::vector<int> candidates = candidate_ids(model, filter, lexicon);
    candidates.erase(std::remove(candidates.begin(), candidates.end(), q), candidates.end());
    if (candidates.empty())
        throw std::invalid_argument("nearest: empty candidate set for filter " + to_string(filter));

    SimilarityRanking r = rank_by_cosine(model, model.query_vector(q), candidates, k);
    r.query = model.tokens[static_cast<std::size_t>(q)];
    r.filter_level = filter;
    return r;
}

SimilarityRanking application_words(const std::string& chem,
                                    const std::vector<std::string>& app_list, int k,
                                    const EmbeddingModel& model) {
    if (k < 1) throw std::invalid_argument("application_words: k must be >= 1");
    int c = resolve_token(model, chem);
    if (c < 0) oov_error(model, chem);

    std::vector<int> candidates;
    for (const auto& w : app_list) {
        int id = resolve_token(model, w);
        if (id >= 0 && id != c) candidates.push_back(id);
    }
    if (candidates.empty())
        throw std::invalid_argument("application_words: no application words in the vocabulary");

    SimilarityRanking r = rank_by_cosine(model, model.query_vector(c), candidates, k);
    r.query = model.tokens[static_cast<std::size_t>(c)];
    return r;
}

GroupSimilarity group_similarity(const std::vector<std::string>& group_a,
                                 const std::vector<std::string>& group_b,
                                 const EmbeddingModel& model) {
    GroupSimilarity out;
    auto resolve_group = [&](const std::vector<std::string>& group, std::vector<std::string>& used,
                             std::vector<std::string>& missing) {
        std::vector<int> ids;
        for (const auto& t : group) {
            int id = resolve_token(model, t);
            if (id >= 0) {
                ids.push_back(id);
                used.push_back(model.tokens[static_cast<std::size_t>(id)]);
            } else {
                missing.push_back(t);
            }
        }
        return ids;
    };
    std::vector<int> ids_a = resolve_group(group_a, out.used_a, out.missing_a);
    std::vector<int> ids_b = resolve_group(group_b, out.used_b, out.missing_b);
    if (ids_a.empty())
        throw std::invalid_argument("group A has no vocabulary tokens; missing: " +
                                    join(out.missing_a, ", "));
    if (ids_b.empty())
        throw std::invalid_argument("group B has no vocabulary tokens; missing: " +
                                    join(out.missing_b, ", "));

    auto unit = [](std::vector<double> v) {
        double n = 0.0;
        for (double x : v) n += x * x;
        n = std::sqrt(n);
        for (double& x : v) x /= n;
        return v;
    };

    double cos_sum = 0.0, euc_sum = 0.0, euc_norm_sum = 0.0;
    int pairs = 0;
    auto accumulate = [&](int a, int b) {
        auto va = model.query_vector(a);
        auto vb = model.query_vector(b);
        cos_sum += cosine(va, vb);
        euc_sum += euclidean(va, vb);
        euc_norm_sum += euclidean(unit(va), unit(vb));
        ++pairs;
    };

    if (ids_a == ids_b) {
        if (ids_a.size() < 2)
            throw std::invalid_argument("group_similarity: a group compared with itself needs "
                                        "at least 2 distinct tokens");
        for (std::size_t p = 0; p < ids_a.size(); ++p)
            for (std::size_t q = p + 1; q < ids_a.size(); ++q) accumulate(ids_a[p], ids_a[q]);
    } else {
        for (int a : ids_a)
            for (int b : ids_b) accumulate(a, b);
    }
    out.mean_cosine = cos_sum / pairs;
    out.mean_euclidean = euc_sum / pairs;
    out.mean_euclidean_normalized = euc_norm_sum / pairs;
    return out;
}

SimilarityRanking analogy(const std::string& a, const std::string& b, const std::string& c, int k,
                          const EmbeddingModel& model) {
    if (k < 1) throw std::invalid_argument("analogy: k must be >= 1");
    int ia = resolve_token(model, a);
    if (ia < 0) oov_error(model, a);
    int ib = resolve_token(model, b);
    if (ib < 0) oov_error(model, b);
    int ic = resolve_token(model, c);
    if (ic < 0) oov_error(model, c);

    auto va = model.query_vector(ia);
    auto vb = model.query_vector(ib);
    auto vc = model.query_vector(ic);
    std::vector<double> target(va.size());
    for (std::size_t d = 0; d < target.size(); ++d) target[d] = vb[d] - va[d] + vc[d];

    std::vector<int> candidates;
    for (int i = 0; i < model.vocab_size(); ++i) {
        if (i == ia || i == ib || i == ic) continue;
        candidates.push_back(i);
    }
    if (candidates.empty()) throw std::invalid_argument("analogy: no candidates left");
    SimilarityRanking r = rank_by_cosine(model, target, candidates, k);
    r.query = a + ":" + b + "::" + c;
    return r;
}

HubnessReport hubness(const EmbeddingModel& model, int k, const std::vector<std::string>& candidates,
                      HubMetric metric) {
    if (k < 1) throw std::invalid_argument("hubness: k must be >= 1");
    std::vector<int> ids;
    for (const auto& t : candidates) {
        int id = resolve_token(model, t);
        if (id < 0) oov_error(model, t);
        ids.push_back(id);
    }
    const std::size_t n = ids.size();
    std::vector<std::vector<double>> vecs;
    vecs.reserve(n);
    for (int id : ids) vecs.push_back(model.query_vector(id));

    HubnessReport report;
    report.tokens = candidates;
    report.counts.assign(n, 0);

    for (std::size_t q = 0; q < n; ++q) {
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == q) continue;
            double s = metric == HubMetric::Cosine ? -cosine(vecs[q], vecs[j])
                                                   : euclidean(vecs[q], vecs[j]);
            scored.emplace_back(s, j);  // smaller is nearer for both metrics now
        }
        std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return ids[a.second] < ids[b.second];
        });
        std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
        for (std::size_t r = 0; r < take; ++r) ++report.counts[scored[r].second];
    }

    // sample skewness of the hub-count distribution
    double mean = 0.0;
    for (int c : report.counts) mean += c;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0;
    for (int c : report.counts) {
        double d = c - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    report.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    return report;
}

void jacobi_eigen(const Matrix& symmetric, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
    const std::size_t n = symmetric.rows;
    if (symmetric.cols != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");
    Matrix S = symmetric;
    Matrix V(n, n);
    for (std::size_t i = 0; i < n; ++i) V.at(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += S.at(p, q) * S.at(p, q);
        if (off < 1e-28 * (1.0 + static_cast<double>(n))) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = S.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double phi = 0.5 * (S.at(q, q) - S.at(p, p)) / apq;
                double t = (phi >= 0.0 ? 1.0 : -1.0) / (std::abs(phi) + std::sqrt(phi * phi + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (std::size_t kx = 0; kx < n; ++kx) {
                    double skp = S.at(kx, p), skq = S.at(kx, q);
                    S.at(kx, p) = c * skp - s * skq;
                    S.at(kx, q) = s * skp + c * skq;
                }
                for (std::size_t kx = 0; kx < n; ++kx) {
                    double spk = S.at(p, kx), sqk = S.at(q, kx);
                    S.at(p, kx) = c * spk - s * sqk;
                    S.at(q, kx) = s * spk + c * sqk;
                }
                for (std::size_t kx = 0; kx < n; ++kx) {
                    double vkp = V.at(kx, p), vkq = V.at(kx, q);
                    V.at(kx, p) = c * vkp - s * vkq;
                    V.at(kx, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return S.at(a, a) > S.at(b, b); });

    eigenvalues.resize(n);
    eigenvectors = Matrix(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        eigenvalues[r] = S.at(order[r], order[r]);
        for (std::size_t d = 0; d < n; ++d) eigenvectors.at(r, d) = V.at(d, order[r]);
    }
}

PcaProjection pca_project(const EmbeddingModel& model, const std::vector<std::string>& tokens,
                          int ncomp) {
    const std::size_t n = tokens.size();
    const auto D = static_cast<std::size_t>(model.dim());
    if (ncomp < 1) throw std::invalid_argument("pca_project: ncomp must be >= 1");
    if (n < 2) throw std::invalid_argument("pca_project: need at least 2 points");
    if (static_cast<std::size_t>(ncomp) > std::min(n, D))
        throw std::invalid_argument("pca_project: ncomp exceeds min(subset size, dimension)");

    Matrix X(n, D);
    for (std::size_t i = 0; i < n; ++i) {
        int id = resolve_token(model, tokens[i]);
        if (id < 0) oov_error(model, tokens[i]);
        auto v = model.query_vector(id);
        for (std::size_t d = 0; d < D; ++d) X.at(i, d) = v[d];
    }

    std::vector<double> mean(D, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < D; ++d) mean[d] += X.at(i, d);
    for (auto& v : mean) v /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < D; ++d) X.at(i, d) -= mean[d];

    Matrix cov(D, D);
    for (std::size_t a = 0; a < D; ++a) {
        for (std::size_t b = a; b < D; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += X.at(i, a) * X.at(i, b);
            s /= static_cast<double>(n - 1);
            cov.at(a, b) = s;
            cov.at(b, a) = s;
        }
    }

    std::vector<double> eigenvalues;
    Matrix eigenvectors;
    jacobi_eigen(cov, eigenvalues, eigenvectors);

    PcaProjection proj;
    proj.tokens = tokens;
    proj.explained_variance.assign(eigenvalues.begin(),
                                   eigenvalues.begin() + static_cast<std::ptrdiff_t>(ncomp));
    proj.components = Matrix(static_cast<std::size_t>(ncomp), D);
    for (std::size_t c = 0; c < static_cast<std::size_t>(ncomp); ++c) {
        // sign convention: the largest-magnitude entry is positive
        std::size_t arg = 0;
        for (std::size_t d = 1; d < D; ++d) {
            if (std::abs(eigenvectors.at(c, d)) > std::abs(eigenvectors.at(c, arg))) arg = d;
        }
        double flip = eigenvectors.at(c, arg) < 0.0 ? -1.0 : 1.0;
        for (std::size_t d = 0; d < D; ++d) proj.components.at(c, d) = flip * eigenvectors.at(c, d);
    }

    proj.coordinates = Matrix(n, static_cast<std::size_t>(ncomp));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < static_cast<std::size_t>(ncomp); ++c) {
            double s = 0.0;
            for (std::size_t d = 0; d < D; ++d) s += X.at(i, d) * proj.components.at(c, d);
            proj.coordinates.at(i, c) = s;
        }
    }
    return proj;
}

}  // namespace chemtext
