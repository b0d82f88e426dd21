#include "chemtext/chemlex.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "chemtext/util.hpp"

namespace chemtext {

std::string ChemLexicon::merged_form(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        if (c == ' ' || c == '-') continue;
        out += ascii_lower(c);
    }
    return out;
}

void ChemLexicon::index_surface(const std::string& surface, int entry) {
    std::string lower = to_lower(trim(surface));
    if (lower.empty()) return;
    auto [it, inserted] = surface_to_entry_.emplace(lower, entry);
    if (!inserted) {
        if (it->second != entry)
            throw std::runtime_error("lexicon: surface form '" + lower +
                                     "' maps to more than one entry");
        return;
    }
    max_surface_len_ = std::max(max_surface_len_, lower.size());

    // first alphanumeric run keys the scan bucket
    std::size_t i = 0;
    while (i < lower.size() && !is_ascii_alnum(lower[i])) ++i;
    std::size_t j = i;
    while (j < lower.size() && is_ascii_alnum(lower[j])) ++j;
    if (j == i) return;  // no alphanumeric content, not matchable
    std::string first = lower.substr(i, j - i);
    auto& bucket = by_first_token_[first];
    bucket.push_back({lower, entry});
    std::sort(bucket.begin(), bucket.end(), [](const Surface& a, const Surface& b) {
        if (a.lower.size() != b.lower.size()) return a.lower.size() > b.lower.size();
        return a.lower < b.lower;
    });
}

void ChemLexicon::add_entry(LexiconEntry entry) {
    if (trim(entry.canonical).empty()) throw std::runtime_error("lexicon: empty canonical name");
    int idx = static_cast<int>(entries_.size());
    std::string lower_canonical = to_lower(trim(entry.canonical));
    auto existing = surface_to_entry_.find(lower_canonical);
    if (existing != surface_to_entry_.end())
        throw std::runtime_error("lexicon: duplicate canonical name '" + lower_canonical + "'");

    entries_.push_back(std::move(entry));
    const LexiconEntry& e = entries_.back();
    index_surface(e.canonical, idx);
    index_surface(merged_form(e.canonical), idx);
    for (const auto& syn : e.synonyms) {
        index_surface(syn, idx);
        index_surface(merged_form(syn), idx);
    }
}

int ChemLexicon::lookup_surface(std::string_view lower_surface) const {
    auto it = surface_to_entry_.find(std::string(lower_surface));
    return it == surface_to_entry_.end() ? -1 : it->second;
}

ChemLexicon ChemLexicon::load_tsv(const std::filesystem::path& p) {
    ChemLexicon lex;
    for (auto& line : read_lines(p)) {
        if (line.empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        LexiconEntry e;
        e.canonical = trim(cols[0]);
        if (e.canonical.empty()) continue;
        if (cols.size() > 1) {
            for (auto& s : split(cols[1], ';')) {
                std::string syn = trim(s);
                if (!syn.empty()) e.synonyms.push_back(syn);
            }
        }
        if (cols.size() > 2) e.smiles = trim(cols[2]);
        if (cols.size() > 3) {
            std::string label = to_lower(trim(cols[3]));
            if (label == "1" || label == "true" || label == "energetic") e.energetic_label = true;
            else if (label == "0" || label == "false") e.energetic_label = false;
        }
        lex.add_entry(std::move(e));
    }
    return lex;
}

void ChemLexicon::save_tsv(const std::filesystem::path& p) const {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write lexicon: " + p.string());
    out << "#canonical\tsynonyms\tsmiles\tlabel\n";
    for (const auto& e : entries_) {
        out << e.canonical << '\t' << join(e.synonyms, ";") << '\t' << e.smiles << '\t';
        if (e.energetic_label.has_value()) out << (*e.energetic_label ? "1" : "0");
        out << "\n";
    }
}

std::vector<Mention> find_chemical_mentions(std::string_view text, const ChemLexicon& lexicon) {
    if (lexicon.empty()) throw std::invalid_argument("find_chemical_mentions: empty lexicon");
    const auto& buckets = lexicon.surfaces_by_first_token();
    std::vector<Mention> mentions;

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_ascii_alnum(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && is_ascii_alnum(text[j])) ++j;
        std::string first = to_lower(text.substr(i, j - i));
        auto bucket = buckets.find(first);
        std::size_t matched_len = 0;
        int matched_entry = -1;
        if (bucket != buckets.end()) {
            for (const auto& surf : bucket->second) {  // longest first
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
                    matched_entry = surf.entry;
                    break;
                }
            }
        }
        if (matched_entry >= 0) {
            mentions.push_back(
                {matched_entry, i, i + matched_len, std::string(text.substr(i, matched_len))});
            i += matched_len;
        } else {
            i = j;
        }
    }
    return mentions;
}

std::vector<Mention> find_chemical_mentions(const std::vector<std::string>& tokens,
                                            const ChemLexicon& lexicon) {
    return find_chemical_mentions(join(tokens, " "), lexicon);
}

std::vector<MentionStat> mention_stats(const std::vector<std::vector<std::string>>& token_sentences,
                                       const ChemLexicon& lexicon,
                                       const std::unordered_set<std::string>& stop_chems) {
    std::vector<std::int64_t> n_total(lexicon.size(), 0);
    std::vector<std::int64_t> n_ner(lexicon.size(), 0);

    for (const auto& sent : token_sentences) {
        for (const auto& tok : sent) {
            int e = lexicon.lookup_surface(tok);
            if (e >= 0) ++n_total[static_cast<std::size_t>(e)];
        }
        for (const auto& m : find_chemical_mentions(sent, lexicon)) {
            ++n_ner[static_cast<std::size_t>(m.entry)];
        }
    }

    std::vector<MentionStat> stats;
    for (std::size_t e = 0; e < lexicon.size(); ++e) {
        const auto& entry = lexicon.entry(static_cast<int>(e));
        if (stop_chems.count(to_lower(entry.canonical))) continue;
        if (n_total[e] == 0 && n_ner[e] == 0) continue;
        stats.push_back({static_cast<int>(e), entry.canonical, n_total[e], n_ner[e]});
    }
    std::sort(stats.begin(), stats.end(), [](const MentionStat& a, const MentionStat& b) {
        if (a.n_total != b.n_total) return a.n_total > b.n_total;
        return a.entry < b.entry;
    });
    return stats;
}

}  // namespace chemtext
