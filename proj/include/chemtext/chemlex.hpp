#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace chemtext {

struct LexiconEntry {
    std::string canonical;
    std::vector<std::string> synonyms;
    std::string smiles;  // empty when unknown
    std::optional<double> energetic_score;
    std::optional<bool> energetic_label;
};

// Gazetteer of chemical names. Every surface form (canonical, synonyms and
// their merged space/dash-free variants) maps to exactly one entry.
class ChemLexicon {
  public:
    ChemLexicon() = default;

    void add_entry(LexiconEntry entry);

    // TSV columns: canonical <tab> synonyms(;-separated) <tab> smiles <tab> label
    static ChemLexicon load_tsv(const std::filesystem::path& p);
    void save_tsv(const std::filesystem::path& p) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<LexiconEntry>& entries() const { return entries_; }
    LexiconEntry& entry(int i) { return entries_.at(static_cast<std::size_t>(i)); }
    const LexiconEntry& entry(int i) const { return entries_.at(static_cast<std::size_t>(i)); }

    // Entry index for a lowercase surface form, or -1.
    int lookup_surface(std::string_view lower_surface) const;

    // Surface forms that contain a space or dash, longest first, bucketed by
    // their first alphanumeric run; drives merge_entities and mention search.
    struct Surface {
        std::string lower;  // lowercase surface text
        int entry;
    };
    const std::unordered_map<std::string, std::vector<Surface>>& surfaces_by_first_token() const {
        return by_first_token_;
    }
    std::size_t max_surface_length() const { return max_surface_len_; }

    // Space/dash-free lowercase form of a name.
    static std::string merged_form(std::string_view name);

  private:
    void index_surface(const std::string& surface, int entry);

    std::vector<LexiconEntry> entries_;
    std::unordered_map<std::string, int> surface_to_entry_;
    std::unordered_map<std::string, std::vector<Surface>> by_first_token_;
    std::size_t max_surface_len_ = 0;
};

struct Mention {
    int entry;          // lexicon entry index
    std::size_t begin;  // character span in the scanned text
    std::size_t end;
    std::string surface;  // matched text as it appeared
};

// Case-insensitive longest-match-first gazetteer scan; matches must be
// bounded by non-alphanumeric characters, so list-style text ("HMX, RDX")
// works as well as running sentences.
std::vector<Mention> find_chemical_mentions(std::string_view text, const ChemLexicon& lexicon);
std::vector<Mention> find_chemical_mentions(const std::vector<std::string>& tokens,
                                            const ChemLexicon& lexicon);

struct MentionStat {
    int entry;
    std::string name;       // canonical name
    std::int64_t n_total;   // token occurrences of the entry's surface forms
    std::int64_t n_ner;     // gazetteer mentions on sentence text
};

// Per-chemical corpus statistics over tokenized sentences, sorted by
// descending N. Names in stop_chems are excluded from the report.
std::vector<MentionStat> mention_stats(const std::vector<std::vector<std::string>>& token_sentences,
                                       const ChemLexicon& lexicon,
                                       const std::unordered_set<std::string>& stop_chems = {});

}  // namespace chemtext
