#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>

#include "chemtext/ingest.hpp"
#include "chemtext/util.hpp"
#include "support/testpaths.hpp"

using namespace chemtext;

namespace {

const char* kTwoPatents = R"(<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE us-patent-grant SYSTEM "us-patent-grant-v45.dtd">
<us-patent-grant file="US01000001-20150101.XML">
  <us-bibliographic-data-grant>
    <publication-reference>
      <document-id><country>US</country><doc-number>01000001</doc-number></document-id>
    </publication-reference>
    <classifications-cpc>
      <main-cpc>
        <classification-cpc>
          <section>C</section><class>06</class><subclass>B</subclass>
          <main-group>45</main-group><subgroup>10</subgroup>
        </classification-cpc>
      </main-cpc>
    </classifications-cpc>
    <invention-title>Explosive composition</invention-title>
  </us-bibliographic-data-grant>
  <abstract><p>An insensitive explosive composition containing HMX.</p></abstract>
  <description><p>The composition is cast-cured.</p><p>It resists shock.</p></description>
</us-patent-grant>
<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE us-patent-grant SYSTEM "us-patent-grant-v45.dtd">
<us-patent-grant file="US01000002-20150101.XML">
  <us-bibliographic-data-grant>
    <publication-reference>
      <document-id><country>US</country><doc-number>01000002</doc-number></document-id>
    </publication-reference>
    <classification-national>
      <country>US</country>
      <main-classification> 424/9.1 </main-classification>
    </classification-national>
    <invention-title>Pharmaceutical carrier</invention-title>
  </us-bibliographic-data-grant>
  <abstract><p>A carrier for drug delivery.</p></abstract>
  <description><p>Not an energetic material.</p></description>
</us-patent-grant>
)";

}  // namespace

TEST_CASE("parse_patent_xml: two-patent bulk fixture") {
    auto result = parse_patent_xml(kTwoPatents);
    CHECK(result.errors.empty());
    REQUIRE(result.patents.size() == 2);

    const PatentDoc& first = result.patents[0];
    CHECK(first.patent_id == "01000001");
    REQUIRE(!first.classifications.empty());
    CHECK(first.classifications[0] == "C06B45/10");
    CHECK(first.title == "Explosive composition");
    CHECK(first.body_text ==
          "An insensitive explosive composition containing HMX. The composition is cast-cured. "
          "It resists shock.");

    const PatentDoc& second = result.patents[1];
    CHECK(second.patent_id == "01000002");
    REQUIRE(second.classifications.size() == 1);
    CHECK(second.classifications[0] == "424/9.1");
}

TEST_CASE("parse_patent_xml: empty input") {
    auto result = parse_patent_xml("");
    CHECK(result.patents.empty());
    CHECK(result.errors.size() == 1);
}

TEST_CASE("parse_patent_xml: missing classification element") {
    std::string xml = R"(<?xml version="1.0"?>
<us-patent-grant>
  <us-bibliographic-data-grant>
    <publication-reference>
      <document-id><doc-number>777</doc-number></document-id>
    </publication-reference>
    <invention-title>Untitled widget</invention-title>
  </us-bibliographic-data-grant>
  <abstract><p>Widget text.</p></abstract>
</us-patent-grant>)";
    auto result = parse_patent_xml(xml);
    CHECK(result.errors.empty());
    REQUIRE(result.patents.size() == 1);
    CHECK(result.patents[0].classifications.empty());
}

TEST_CASE("parse_patent_xml: malformed document is skipped, parsing continues") {
    std::string xml = std::string(kTwoPatents) +
                      "<?xml version=\"1.0\"?>\n<us-patent-grant><broken></us-patent-grant>\n";
    auto result = parse_patent_xml(xml);
    CHECK(result.patents.size() == 2);
    CHECK(result.errors.size() == 1);
}

TEST_CASE("parse_patent_xml is deterministic") {
    auto a = parse_patent_xml(kTwoPatents);
    auto b = parse_patent_xml(kTwoPatents);
    REQUIRE(a.patents.size() == b.patents.size());
    for (std::size_t i = 0; i < a.patents.size(); ++i) {
        CHECK(a.patents[i].patent_id == b.patents[i].patent_id);
        CHECK(a.patents[i].body_text == b.patents[i].body_text);
        CHECK(a.patents[i].classifications == b.patents[i].classifications);
    }
}

TEST_CASE("filter_by_classification") {
    PatentDoc doc;
    doc.classifications = {"C06B45/10"};
    CHECK(filter_by_classification(doc, {"C06B"}));

    PatentDoc empty;
    CHECK(!filter_by_classification(empty, {"C06B"}));

    PatentDoc other;
    other.classifications = {"A61K"};
    CHECK(!filter_by_classification(other, {"C06B", "149"}));

    PatentDoc national;
    national.classifications = {"149/2"};
    CHECK(filter_by_classification(national, {"C06B", "149"}));
}

TEST_CASE("filter_by_classification distributes over prefix-set union") {
    Rng rng(11);
    std::vector<std::string> codes = {"C06B45/10", "C06B", "149/2", "A61K", "F42B3/10", "C07C"};
    for (int trial = 0; trial < 200; ++trial) {
        PatentDoc doc;
        std::size_t n = rng.next_below(4);
        for (std::size_t i = 0; i < n; ++i) doc.classifications.push_back(codes[rng.next_below(codes.size())]);
        std::set<std::string> a = {"C06B"}, b = {"149", "A61K"}, both = {"C06B", "149", "A61K"};
        CHECK(filter_by_classification(doc, both) ==
              (filter_by_classification(doc, a) || filter_by_classification(doc, b)));
    }
}

TEST_CASE("load_plain_text") {
    testsupport::TempDir tmp("ingest");
    {
        std::ofstream f(tmp / "doc.txt");
        f << "line one\nline two\nline three\n";
    }
    std::size_t repl = 0;
    Document d = load_plain_text(tmp / "doc.txt", {{"venue", "NTREM"}, {"source_kind", "proceedings"}}, &repl);
    CHECK(d.text == "line one\nline two\nline three\n");
    CHECK(d.meta.at("venue") == "NTREM");
    CHECK(d.source_kind == SourceKind::Proceedings);
    CHECK(repl == 0);
}

TEST_CASE("load_plain_text replaces invalid UTF-8 and reports the count") {
    testsupport::TempDir tmp("ingest_utf8");
    {
        std::ofstream f(tmp / "bad.txt", std::ios::binary);
        f << "abc";
        f.put(static_cast<char>(0xFF));
        f << "def";
    }
    std::size_t repl = 0;
    Document d = load_plain_text(tmp / "bad.txt", {}, &repl);
    CHECK(repl == 1);
    CHECK(d.text == std::string("abc\xEF\xBF\xBD""def"));
    CHECK(d.source_kind == SourceKind::Other);
}

TEST_CASE("load_plain_text rejects empty files and missing files") {
    testsupport::TempDir tmp("ingest_empty");
    { std::ofstream f(tmp / "empty.txt"); }
    CHECK_THROWS(load_plain_text(tmp / "empty.txt", {}));
    CHECK_THROWS(load_plain_text(tmp / "missing.txt", {}));
}

TEST_CASE("document store counts, uniqueness and persistence") {
    DocumentStore store;
    CHECK(corpus_stats(store).total_documents == 0);

    Document p1{"p1", SourceKind::Patent, "patent text one", {{"cls", "C06B"}}};
    Document p2{"p2", SourceKind::Patent, "patent text two", {}};
    Document pr{"pr1", SourceKind::Proceedings, "proceedings text", {{"venue", "IDS"}}};
    store.add(p1);
    store.add(p2);
    store.add(pr);

    CHECK_THROWS(store.add(Document{"p1", SourceKind::Patent, "dup", {}}));
    CHECK_THROWS(store.add(Document{"p3", SourceKind::Patent, "", {}}));  // empty text

    CorpusStats stats = corpus_stats(store);
    CHECK(stats.patents == 2);
    CHECK(stats.proceedings == 1);
    CHECK(stats.other == 0);
    CHECK(stats.total_documents == 3);
    CHECK(stats.total_characters ==
          p1.text.size() + p2.text.size() + pr.text.size());

    testsupport::TempDir tmp("store");
    store.save_jsonl(tmp / "store.jsonl");
    CHECK(std::filesystem::exists(tmp / "store.jsonl.manifest.json"));

    DocumentStore back = DocumentStore::load_jsonl(tmp / "store.jsonl");
    REQUIRE(back.size() == 3);
    CHECK(back.documents()[0].doc_id == "p1");
    CHECK(back.documents()[0].text == "patent text one");
    CHECK(back.documents()[0].meta.at("cls") == "C06B");
    CHECK(back.documents()[2].source_kind == SourceKind::Proceedings);
    CHECK(corpus_stats(back).patents == 2);
}

TEST_CASE("bundled fixture: 10 patents, exactly 3 match C06B/149") {
    std::string bytes = read_file(testsupport::fixture("patents.xml"));
    auto result = parse_patent_xml(bytes);
    CHECK(result.errors.empty());
    REQUIRE(result.patents.size() == 10);
    int matched = 0;
    for (const auto& p : result.patents) {
        if (filter_by_classification(p, {"C06B", "149"})) ++matched;
    }
    CHECK(matched == 3);
}
