#include "chemtext/textprep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chemtext/chemlex.hpp"

namespace chemtext {

std::vector<std::string> CleaningConfig::default_abbreviation_patterns() {
    return {
        R"(\bDr\.)",  R"(\bMr\.)",  R"(\bMs\.)",   R"(\bProf\.)", R"(\bNo\.)",
        R"(\bFig\.)", R"(\bFigs\.)", R"(\bEq\.)",  R"(\bEqs\.)",  R"(\bRef\.)",
        R"(\bRefs\.)", R"(\bTab\.)", R"(\bSec\.)", R"(\bvs\.)",   R"(\bca\.)",
        R"(\bcf\.)",  R"(\bet al\.)", R"(\be\.g\.)", R"(\bi\.e\.)", R"(\bapprox\.)",
    };
}

CleaningConfig::CleaningConfig()
    : abbreviation_patterns(default_abbreviation_patterns()) {
    compile();
}

CleaningConfig::CleaningConfig(std::unordered_set<std::string> stopwords_,
                               std::vector<std::string> patterns, bool drop_numeric_)
    : stopwords(std::move(stopwords_)),
      abbreviation_patterns(std::move(patterns)),
      drop_numeric(drop_numeric_) {
    compile();
}

void CleaningConfig::compile() {
    compiled_.clear();
    compiled_.reserve(abbreviation_patterns.size());
    for (const auto& p : abbreviation_patterns) {
        compiled_.emplace_back(p);  // throws std::regex_error on a bad pattern
    }
}

void CleaningConfig::load_stopwords(const std::filesystem::path& file) {
    for (auto& line : read_lines(file)) {
        std::string w = to_lower(trim(line));
        if (!w.empty() && w[0] != '#') stopwords.insert(w);
    }
}

namespace {

bool line_is_table_residue(std::string_view line, double max_non_alpha_fraction) {
    std::size_t non_ws = 0, alpha = 0;
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        ++non_ws;
        if (is_ascii_alpha(c)) ++alpha;
    }
    if (non_ws == 0) return true;
    double non_alpha = 1.0 - static_cast<double>(alpha) / static_cast<double>(non_ws);
    return non_alpha > max_non_alpha_fraction;
}

// "1.89", "45%", "12.5%" -> removable numeric token
bool is_decimal_or_percent(std::string_view tok) {
    if (tok.empty()) return false;
    bool percent = tok.back() == '%';
    if (percent) tok.remove_suffix(1);
    if (tok.empty()) return false;
    std::size_t dot = tok.find('.');
    for (std::size_t i = 0; i < tok.size(); ++i) {
        if (tok[i] == '.' && i == dot) continue;
        if (!is_ascii_digit(tok[i])) return false;
    }
    bool decimal = dot != std::string_view::npos && dot + 1 < tok.size() && dot > 0;
    return percent || decimal;
}

std::string strip_periods(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c != '.') out += c;
    }
    return out;
}

}  // namespace

std::string clean_text(std::string_view raw, const CleaningConfig& cfg) {
    // step 2: line filtering + line-break removal
    std::string joined;
    {
        std::string current;
        auto flush_line = [&](std::string_view line) {
            if (line_is_table_residue(line, cfg.max_non_alpha_fraction)) return;
            if (!joined.empty()) joined += ' ';
            joined += line;
        };
        std::size_t start = 0;
        for (std::size_t i = 0; i <= raw.size(); ++i) {
            if (i == raw.size() || raw[i] == '\n' || raw[i] == '\r') {
                if (i > start) flush_line(raw.substr(start, i - start));
                start = i + 1;
            }
        }
    }

    // step 4a: abbreviation rewriting (match text minus its periods)
    std::string text = joined;
    for (const auto& re : cfg.compiled_patterns()) {
        std::string out;
        out.reserve(text.size());
        auto begin = std::sregex_iterator(text.begin(), text.end(), re);
        auto end = std::sregex_iterator();
        std::size_t last = 0;
        for (auto it = begin; it != end; ++it) {
            out.append(text, last, static_cast<std::size_t>(it->position()) - last);
            out += strip_periods(it->str());
            last = static_cast<std::size_t>(it->position() + it->length());
        }
        out.append(text, last, text.size() - last);
        text = std::move(out);
    }

    // step 4b: decimal / percentage removal, then whitespace collapse
    std::string result;
    for (auto& tok : split_ws(text)) {
        std::string_view tv = tok;
        if (is_decimal_or_percent(tv)) continue;
        // keep a trailing sentence delimiter when the numeric token carries one
        if (tv.size() > 1 && (tv.back() == '.' || tv.back() == ',' || tv.back() == ';') &&
            is_decimal_or_percent(tv.substr(0, tv.size() - 1))) {
            if (!result.empty()) {
                result += tv.back();
            }
            continue;
        }
        if (!result.empty()) result += ' ';
        result += tok;
    }
    return result;
}

std::string merge_entities(std::string_view text, const ChemLexicon& lexicon) {
    const auto& buckets = lexicon.surfaces_by_first_token();
    if (buckets.empty()) return std::string(text);

    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_ascii_alnum(text[i])) {
            out += text[i++];
            continue;
        }
        // word start (position 0 or preceded by a non-alphanumeric character)
        std::size_t j = i;
        while (j < n && is_ascii_alnum(text[j])) ++j;
        std::string first = to_lower(text.substr(i, j - i));
        auto bucket = buckets.find(first);
        std::size_t matched_len = 0;
        if (bucket != buckets.end()) {
            for (const auto& surf : bucket->second) {  // sorted longest first
                const std::size_t len = surf.lower.size();
                if (i + len > n) continue;
                if (i + len < n && is_ascii_alnum(text[i + len])) continue;
                bool eq = true;
                for (std::size_t k = 0; k < len; ++k) {
                    if (ascii_lower(text[i + k]) != surf.lower[k]) {
                        eq = false;
                        break;
                    }
                }
                if (eq) {
                    matched_len = len;
                    break;
                }
            }
        }
        if (matched_len > 0) {
            for (std::size_t k = 0; k < matched_len; ++k) {
                char c = text[i + k];
                if (c != ' ' && c != '-') out += c;
            }
            i += matched_len;
        } else {
            out.append(text.substr(i, j - i));
            i = j;
        }
    }
    return out;
}

std::vector<std::string> segment_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    const std::size_t n = text.size();
    std::size_t i = 0;
    auto emit = [&](std::size_t end) {
        std::string s = trim(text.substr(start, end - start));
        if (!s.empty()) sentences.push_back(std::move(s));
    };
    while (i < n) {
        if (text[i] == '.' || text[i] == '!' || text[i] == '?') {
            std::size_t p = i;
            while (p + 1 < n && (text[p + 1] == '.' || text[p + 1] == '!' || text[p + 1] == '?')) ++p;
            std::size_t q = p + 1;
            bool ws = false;
            while (q < n && std::isspace(static_cast<unsigned char>(text[q]))) {
                ws = true;
                ++q;
            }
            if (ws && q < n && (std::isupper(static_cast<unsigned char>(text[q])) || is_ascii_digit(text[q]))) {
                emit(p + 1);
                start = q;
                i = q;
                continue;
            }
            i = p + 1;
            continue;
        }
        ++i;
    }
    emit(n);
    return sentences;
}

std::vector<std::string> tokenize(std::string_view sentence, const CleaningConfig& cfg) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = sentence.size();
    while (i < n) {
        if (!is_ascii_alnum(sentence[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        bool has_alpha = false;
        std::string tok;
        while (j < n && is_ascii_alnum(sentence[j])) {
            char c = ascii_lower(sentence[j]);
            has_alpha = has_alpha || is_ascii_alpha(c);
            tok += c;
            ++j;
        }
        i = j;
        if (tok.size() < 2) continue;
        if (cfg.drop_numeric && !has_alpha) continue;
        if (cfg.stopwords.count(tok)) continue;
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& sentences, int min_count) {
    return Vocabulary::build(sentences, min_count);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sentences, int min_count) {
    if (min_count < 1) throw std::invalid_argument("build_vocabulary: min_count must be >= 1");
    std::unordered_map<std::string, std::int64_t> counts;
    std::int64_t total = 0;
    for (const auto& s : sentences) {
        for (const auto& t : s) {
            ++counts[t];
            ++total;
        }
    }
    if (total == 0) throw std::invalid_argument("build_vocabulary: empty corpus");

    std::vector<std::pair<std::string, std::int64_t>> retained;
    retained.reserve(counts.size());
    for (auto& [tok, c] : counts) {
        if (c >= min_count) retained.emplace_back(tok, c);
    }
    std::sort(retained.begin(), retained.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.min_count_ = min_count;
    v.total_tokens_ = total;
    v.tokens_.reserve(retained.size());
    v.counts_.reserve(retained.size());
    for (auto& [tok, c] : retained) {
        v.token_to_id_.emplace(tok, static_cast<int>(v.tokens_.size()));
        v.tokens_.push_back(tok);
        v.counts_.push_back(c);
    }
    return v;
}

int Vocabulary::id(std::string_view token) const {
    auto it = token_to_id_.find(std::string(token));
    return it == token_to_id_.end() ? -1 : it->second;
}

double Vocabulary::frequency(int id_) const {
    return static_cast<double>(count(id_)) / static_cast<double>(total_tokens_);
}

std::uint64_t Vocabulary::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& t : tokens_) {
        h = fnv1a64(t.data(), t.size(), h);
        h = fnv1a64("\n", 1, h);
    }
    return h;
}

void Vocabulary::save_tsv(const std::filesystem::path& p) const {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write vocabulary: " + p.string());
    out << "#total_tokens\t" << total_tokens_ << "\n";
    out << "#min_count\t" << min_count_ << "\n";
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        out << tokens_[i] << '\t' << i << '\t' << counts_[i] << "\n";
    }
}

Vocabulary Vocabulary::load_tsv(const std::filesystem::path& p) {
    Vocabulary v;
    for (auto& line : read_lines(p)) {
        if (line.empty()) continue;
        auto cols = split(line, '\t');
        if (line[0] == '#') {
            if (cols.size() == 2 && cols[0] == "#total_tokens") v.total_tokens_ = std::stoll(cols[1]);
            if (cols.size() == 2 && cols[0] == "#min_count") v.min_count_ = std::stoi(cols[1]);
            continue;
        }
        if (cols.size() != 3) throw std::runtime_error("bad vocabulary row: " + line);
        int id_ = std::stoi(cols[1]);
        if (id_ != static_cast<int>(v.tokens_.size()))
            throw std::runtime_error("vocabulary ids must be dense and ordered: " + line);
        v.token_to_id_.emplace(cols[0], id_);
        v.tokens_.push_back(cols[0]);
        v.counts_.push_back(std::stoll(cols[2]));
    }
    if (v.total_tokens_ == 0) {
        for (auto c : v.counts_) v.total_tokens_ += c;
    }
    return v;
}

std::int64_t TokenizedCorpus::token_count() const {
    std::int64_t n = 0;
    for (const auto& s : sentences) n += static_cast<std::int64_t>(s.size());
    return n;
}

TokenizedCorpus encode_corpus(const std::vector<std::vector<std::string>>& sentences,
                              const Vocabulary& vocab) {
    TokenizedCorpus corpus;
    corpus.vocab_hash = vocab.hash();
    corpus.sentences.reserve(sentences.size());
    for (const auto& s : sentences) {
        std::vector<int> ids;
        ids.reserve(s.size());
        for (const auto& t : s) {
            int id_ = vocab.id(t);
            if (id_ >= 0) ids.push_back(id_);
        }
        if (!ids.empty()) corpus.sentences.push_back(std::move(ids));
    }
    return corpus;
}

TokenizedCorpus subsample(const TokenizedCorpus& corpus, const Vocabulary& vocab, double t,
                          std::uint64_t seed) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("subsample: t must be in (0, 1]");
    // removal probability per retained-vocabulary word; <= 0 means keep always
    std::vector<double> removal(static_cast<std::size_t>(vocab.size()), 0.0);
    for (int w = 0; w < vocab.size(); ++w) {
        double f = vocab.frequency(w);
        if (f > t) removal[static_cast<std::size_t>(w)] = 1.0 - std::sqrt(t / f);
    }

    TokenizedCorpus out;
    out.vocab_hash = corpus.vocab_hash;
    out.sentences.reserve(corpus.sentences.size());
    for (std::size_t si = 0; si < corpus.sentences.size(); ++si) {
        Rng rng(mix64(seed ^ mix64(si + 1)));
        std::vector<int> kept;
        kept.reserve(corpus.sentences[si].size());
        for (int w : corpus.sentences[si]) {
            double p = removal[static_cast<std::size_t>(w)];
            if (p > 0.0 && rng.next_double() < p) continue;
            kept.push_back(w);
        }
        if (!kept.empty()) out.sentences.push_back(std::move(kept));
    }
    return out;
}

void save_corpus_text(const std::vector<std::vector<std::string>>& sentences,
                      const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write corpus: " + p.string());
    for (const auto& s : sentences) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out << ' ';
            out << s[i];
        }
        out << "\n";
    }
}

std::vector<std::vector<std::string>> load_corpus_text(const std::filesystem::path& p) {
    std::vector<std::vector<std::string>> sentences;
    for (auto& line : read_lines(p)) {
        auto toks = split_ws(line);
        if (!toks.empty()) sentences.push_back(std::move(toks));
    }
    return sentences;
}

}  // namespace chemtext
