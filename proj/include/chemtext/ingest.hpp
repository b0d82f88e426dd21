#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace chemtext {

struct PatentDoc {
    std::string patent_id;
    std::vector<std::string> classifications;  // normalized uppercase, no whitespace
    std::string title;
    std::string body_text;  // abstract + description, document order
};

struct PatentParseResult {
    std::vector<PatentDoc> patents;
    std::vector<std::string> errors;
};

// Parses a patent XML file, or a bulk-download concatenation of several XML
// documents. Malformed documents are recorded as errors and skipped.
PatentParseResult parse_patent_xml(std::string_view xml_bytes);

// True iff any classification code starts with one of the wanted prefixes.
bool filter_by_classification(const PatentDoc& doc, const std::set<std::string>& wanted_prefixes);

enum class SourceKind { Patent, Proceedings, Other };

std::string to_string(SourceKind k);
SourceKind source_kind_from_string(std::string_view s);

struct Document {
    std::string doc_id;
    SourceKind source_kind = SourceKind::Other;
    std::string text;
    std::map<std::string, std::string> meta;
};

// Reads a UTF-8 text file; invalid byte sequences are replaced with U+FFFD
// and counted. Empty files are rejected.
Document load_plain_text(const std::filesystem::path& path,
                         const std::map<std::string, std::string>& meta,
                         std::size_t* replacement_count = nullptr);

Document document_from_patent(const PatentDoc& p);

class DocumentStore {
  public:
    void add(Document doc);

    const std::vector<Document>& documents() const { return docs_; }
    std::size_t size() const { return docs_.size(); }

    std::size_t count(SourceKind k) const;

    void save_jsonl(const std::filesystem::path& p) const;  // plus <p>.manifest.json
    static DocumentStore load_jsonl(const std::filesystem::path& p);

  private:
    std::vector<Document> docs_;
    std::map<std::string, std::size_t> id_index_;
    std::map<SourceKind, std::size_t> counts_;
};

struct CorpusStats {
    std::size_t patents = 0;
    std::size_t proceedings = 0;
    std::size_t other = 0;
    std::size_t total_documents = 0;
    std::size_t total_characters = 0;
};

CorpusStats corpus_stats(const DocumentStore& store);

}  // namespace chemtext
