#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <regex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chemtext/util.hpp"

namespace chemtext {

class ChemLexicon;

// Text cleaning configuration: stop words, abbreviation rewrite patterns and
// numeric-token handling. Patterns are validated (compiled) on construction.
struct CleaningConfig {
    std::unordered_set<std::string> stopwords;        // lowercase
    std::vector<std::string> abbreviation_patterns;   // regex strings
    bool drop_numeric = true;
    // Lines whose non-whitespace characters are more than this fraction
    // non-alphabetic are treated as table/reference residue and dropped.
    double max_non_alpha_fraction = 0.40;

    CleaningConfig();
    explicit CleaningConfig(std::unordered_set<std::string> stopwords_,
                            std::vector<std::string> patterns,
                            bool drop_numeric_ = true);

    static std::vector<std::string> default_abbreviation_patterns();
    void load_stopwords(const std::filesystem::path& file);

    const std::vector<std::regex>& compiled_patterns() const { return compiled_; }

  private:
    void compile();
    std::vector<std::regex> compiled_;
};

// Token->id mapping with raw counts. Ids are dense in [0, V), assigned by
// descending frequency with lexicographic tie-break.
class Vocabulary {
  public:
    Vocabulary() = default;

    static Vocabulary build(const std::vector<std::vector<std::string>>& sentences, int min_count);

    int size() const { return static_cast<int>(tokens_.size()); }
    const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    const std::vector<std::string>& tokens() const { return tokens_; }
    std::int64_t count(int id) const { return counts_.at(static_cast<std::size_t>(id)); }
    const std::vector<std::int64_t>& counts() const { return counts_; }
    std::int64_t total_tokens() const { return total_tokens_; }
    int min_count() const { return min_count_; }

    // -1 when the token is not in the vocabulary.
    int id(std::string_view token) const;
    double frequency(int id) const;

    // FNV over "token\n" in id order; ties models to the vocabulary they
    // were trained with.
    std::uint64_t hash() const;

    void save_tsv(const std::filesystem::path& p) const;
    static Vocabulary load_tsv(const std::filesystem::path& p);

  private:
    std::vector<std::string> tokens_;
    std::vector<std::int64_t> counts_;
    std::unordered_map<std::string, int> token_to_id_;
    std::int64_t total_tokens_ = 0;
    int min_count_ = 1;
};

// Sentences as dense token ids; never stores an empty sentence.
struct TokenizedCorpus {
    std::vector<std::vector<int>> sentences;
    std::uint64_t vocab_hash = 0;

    std::int64_t token_count() const;
};

// Pipeline step 2/4 cleaning: drops table-like lines, joins line breaks,
// rewrites sentence-confusing abbreviations, removes decimal/percentage
// numbers, collapses whitespace.
std::string clean_text(std::string_view raw, const CleaningConfig& cfg);

// Rewrites every lexicon name that contains spaces or dashes to its merged
// (space/dash-free) form, longest match first, case-insensitively.
std::string merge_entities(std::string_view text, const ChemLexicon& lexicon);

// Splits on sentence-final punctuation followed by whitespace and an
// uppercase letter or digit.
std::vector<std::string> segment_sentences(std::string_view text);

// Lowercases and splits into alphanumeric runs; drops tokens shorter than 2
// characters, stop words and (optionally) pure-digit tokens.
std::vector<std::string> tokenize(std::string_view sentence, const CleaningConfig& cfg);

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& sentences, int min_count);

// Maps token strings to ids, dropping out-of-vocabulary tokens and sentences
// that end up empty.
TokenizedCorpus encode_corpus(const std::vector<std::vector<std::string>>& sentences,
                              const Vocabulary& vocab);

// Frequency subsampling: an occurrence of w with f(w) > t is removed with
// probability 1 - sqrt(t / f(w)). One derived generator per sentence index.
TokenizedCorpus subsample(const TokenizedCorpus& corpus, const Vocabulary& vocab, double t,
                          std::uint64_t seed);

// Corpus file: one sentence per line, space-separated tokens.
void save_corpus_text(const std::vector<std::vector<std::string>>& sentences,
                      const std::filesystem::path& p);
std::vector<std::vector<std::string>> load_corpus_text(const std::filesystem::path& p);

}  // namespace chemtext
