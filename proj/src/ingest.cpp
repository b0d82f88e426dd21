#include "chemtext/ingest.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chemtext/util.hpp"

namespace pt = boost::property_tree;
using json = nlohmann::json;

namespace chemtext {

namespace {

std::string normalize_code(std::string_view raw) {
    std::string out;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

// Bulk downloads concatenate one XML document per patent; split on the
// declaration boundaries so each parses independently.
std::vector<std::string> split_xml_documents(std::string_view bytes) {
    std::vector<std::string> chunks;
    std::vector<std::size_t> starts;
    std::size_t pos = 0;
    while ((pos = bytes.find("<?xml", pos)) != std::string_view::npos) {
        starts.push_back(pos);
        pos += 5;
    }
    if (starts.empty()) {
        chunks.emplace_back(bytes);
        return chunks;
    }
    for (std::size_t i = 0; i < starts.size(); ++i) {
        std::size_t end = (i + 1 < starts.size()) ? starts[i + 1] : bytes.size();
        chunks.emplace_back(bytes.substr(starts[i], end - starts[i]));
    }
    return chunks;
}

void collect_text(const pt::ptree& node, std::string& out) {
    std::string data = trim(node.data());
    if (!data.empty()) {
        if (!out.empty()) out += ' ';
        out += collapse_ws(data);
    }
    for (const auto& [key, child] : node) {
        if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
        collect_text(child, out);
    }
}

const pt::ptree* find_first(const pt::ptree& node, std::string_view key) {
    for (const auto& [k, child] : node) {
        if (k == key) return &child;
    }
    for (const auto& [k, child] : node) {
        if (k == "<xmlattr>") continue;
        if (const pt::ptree* hit = find_first(child, key)) return hit;
    }
    return nullptr;
}

template <typename Fn>
void for_each_named(const pt::ptree& node, std::string_view key, Fn&& fn) {
    for (const auto& [k, child] : node) {
        if (k == "<xmlattr>") continue;
        if (k == key) fn(child);
        for_each_named(child, key, fn);
    }
}

std::string child_text(const pt::ptree& node, const char* key) {
    if (const pt::ptree* c = find_first(node, key)) {
        std::string s;
        collect_text(*c, s);
        return s;
    }
    return {};
}

// CPC/IPCR element groups: section + class + subclass + main-group/subgroup.
std::string cpc_code(const pt::ptree& cls) {
    std::string code = normalize_code(child_text(cls, "section")) +
                       normalize_code(child_text(cls, "class")) +
                       normalize_code(child_text(cls, "subclass"));
    std::string mg = normalize_code(child_text(cls, "main-group"));
    std::string sg = normalize_code(child_text(cls, "subgroup"));
    if (!mg.empty()) {
        code += mg;
        if (!sg.empty()) code += "/" + sg;
    }
    return code;
}

PatentDoc patent_from_tree(const pt::ptree& root) {
    PatentDoc doc;

    if (const pt::ptree* pubref = find_first(root, "publication-reference")) {
        doc.patent_id = trim(child_text(*pubref, "doc-number"));
    }
    if (doc.patent_id.empty()) doc.patent_id = trim(child_text(root, "doc-number"));

    doc.title = child_text(root, "invention-title");

    auto add_code = [&doc](std::string code) {
        if (code.empty()) return;
        for (const auto& c : doc.classifications) {
            if (c == code) return;
        }
        doc.classifications.push_back(std::move(code));
    };
    for_each_named(root, "classification-cpc", [&](const pt::ptree& c) { add_code(cpc_code(c)); });
    for_each_named(root, "classification-ipcr", [&](const pt::ptree& c) { add_code(cpc_code(c)); });
    for_each_named(root, "main-classification",
                   [&](const pt::ptree& c) { add_code(normalize_code(c.data())); });
    for_each_named(root, "further-classification",
                   [&](const pt::ptree& c) { add_code(normalize_code(c.data())); });

    std::string text;
    if (const pt::ptree* abstract = find_first(root, "abstract")) collect_text(*abstract, text);
    if (const pt::ptree* description = find_first(root, "description")) collect_text(*description, text);
    doc.body_text = text;
    return doc;
}

}  // namespace

PatentParseResult parse_patent_xml(std::string_view xml_bytes) {
    PatentParseResult result;
    if (trim(xml_bytes).empty()) {
        result.errors.push_back("empty input");
        return result;
    }
    auto chunks = split_xml_documents(xml_bytes);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        try {
            std::istringstream ss(chunks[i]);
            pt::ptree tree;
            pt::read_xml(ss, tree, pt::xml_parser::no_comments);
            if (tree.empty()) throw std::runtime_error("no root element");
            PatentDoc doc = patent_from_tree(tree);
            if (doc.patent_id.empty()) throw std::runtime_error("missing patent id");
            result.patents.push_back(std::move(doc));
        } catch (const std::exception& e) {
            result.errors.push_back("document " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    if (result.patents.empty() && result.errors.empty()) {
        result.errors.push_back("no parseable patents");
    }
    return result;
}

bool filter_by_classification(const PatentDoc& doc, const std::set<std::string>& wanted_prefixes) {
    for (const auto& code : doc.classifications) {
        for (const auto& prefix : wanted_prefixes) {
            if (!prefix.empty() && code.starts_with(prefix)) return true;
        }
    }
    return false;
}

std::string to_string(SourceKind k) {
    switch (k) {
        case SourceKind::Patent: return "patent";
        case SourceKind::Proceedings: return "proceedings";
        case SourceKind::Other: return "other";
    }
    return "other";
}

SourceKind source_kind_from_string(std::string_view s) {
    if (s == "patent") return SourceKind::Patent;
    if (s == "proceedings") return SourceKind::Proceedings;
    return SourceKind::Other;
}

namespace {

// Validates UTF-8, replacing each invalid sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes, std::size_t& replacements) {
    std::string out;
    out.reserve(bytes.size());
    replacements = 0;
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    auto bad = [&]() {
        out += "\xEF\xBF\xBD";
        ++replacements;
        ++i;
    };
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        std::size_t len;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0) len = 4;
        else { bad(); continue; }
        if (i + len > n) { bad(); continue; }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(bytes[i + k]) & 0xC0) != 0x80) { ok = false; break; }
        }
        if (!ok) { bad(); continue; }
        out.append(bytes.substr(i, len));
        i += len;
    }
    return out;
}

}  // namespace

Document load_plain_text(const std::filesystem::path& path,
                         const std::map<std::string, std::string>& meta,
                         std::size_t* replacement_count) {
    std::string bytes = read_file(path);
    std::size_t replacements = 0;
    std::string text = sanitize_utf8(bytes, replacements);
    if (replacement_count) *replacement_count = replacements;
    if (trim(text).empty()) throw std::runtime_error("empty document: " + path.string());

    Document doc;
    doc.meta = meta;
    auto id_it = meta.find("doc_id");
    doc.doc_id = id_it != meta.end() ? id_it->second : path.stem().string();
    auto kind_it = meta.find("source_kind");
    doc.source_kind =
        kind_it != meta.end() ? source_kind_from_string(kind_it->second) : SourceKind::Other;
    doc.meta.erase("doc_id");
    doc.meta.erase("source_kind");
    if (replacements > 0) doc.meta["utf8_replacements"] = std::to_string(replacements);
    doc.text = std::move(text);
    return doc;
}

Document document_from_patent(const PatentDoc& p) {
    Document doc;
    doc.doc_id = p.patent_id;
    doc.source_kind = SourceKind::Patent;
    doc.text = p.body_text;
    doc.meta["title"] = p.title;
    doc.meta["classifications"] = join(p.classifications, ";");
    doc.meta["text_fields"] = "abstract+description";
    return doc;
}

void DocumentStore::add(Document doc) {
    if (doc.doc_id.empty()) throw std::runtime_error("document with empty id");
    if (trim(doc.text).empty()) throw std::runtime_error("document '" + doc.doc_id + "' has empty text");
    if (id_index_.count(doc.doc_id))
        throw std::runtime_error("duplicate document id: " + doc.doc_id);
    id_index_.emplace(doc.doc_id, docs_.size());
    ++counts_[doc.source_kind];
    docs_.push_back(std::move(doc));
}

std::size_t DocumentStore::count(SourceKind k) const {
    auto it = counts_.find(k);
    return it == counts_.end() ? 0 : it->second;
}

void DocumentStore::save_jsonl(const std::filesystem::path& p) const {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write store: " + p.string());
    for (const auto& d : docs_) {
        json j = {{"doc_id", d.doc_id},
                  {"source_kind", to_string(d.source_kind)},
                  {"text", d.text},
                  {"meta", d.meta}};
        out << j.dump() << "\n";
    }
    out.close();

    CorpusStats stats = corpus_stats(*this);
    json manifest = {{"total_documents", stats.total_documents},
                     {"total_characters", stats.total_characters},
                     {"counts",
                      {{"patent", stats.patents},
                       {"proceedings", stats.proceedings},
                       {"other", stats.other}}}};
    std::ofstream mf(p.string() + ".manifest.json");
    mf << manifest.dump(2) << "\n";
}

DocumentStore DocumentStore::load_jsonl(const std::filesystem::path& p) {
    DocumentStore store;
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open store: " + p.string());
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json j = json::parse(line);
        Document d;
        d.doc_id = j.at("doc_id").get<std::string>();
        d.source_kind = source_kind_from_string(j.at("source_kind").get<std::string>());
        d.text = j.at("text").get<std::string>();
        if (j.contains("meta")) {
            for (auto& [k, v] : j.at("meta").items()) d.meta[k] = v.get<std::string>();
        }
        store.add(std::move(d));
    }
    return store;
}

CorpusStats corpus_stats(const DocumentStore& store) {
    CorpusStats stats;
    stats.total_documents = store.size();
    stats.patents = store.count(SourceKind::Patent);
    stats.proceedings = store.count(SourceKind::Proceedings);
    stats.other = store.count(SourceKind::Other);
    for (const auto& d : store.documents()) stats.total_characters += d.text.size();
    return stats;
}

}  // namespace chemtext
