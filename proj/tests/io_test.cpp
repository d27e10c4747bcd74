#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "ttq/errors.hpp"
#include "ttq/io.hpp"
#include "ttq/model.hpp"

using namespace ttq;
using namespace ttq::test;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

XmlError parse_failure(const std::string& xml) {
  try {
    parse_document_xml(xml);
  } catch (const XmlError& e) {
    return e;
  }
  FAIL("expected the document to be rejected");
  return XmlError("unreachable", 0, 0);
}

}  // namespace

TEST_CASE("the stored fixture parses and reserializes byte for byte") {
  std::string text = slurp(std::string(TTQ_DATA_DIR) + "/fixture1.xml");
  Document doc = parse_document_xml(text);
  CHECK(serialize_document(doc, "UTF-8") == text);
  CHECK(structurally_equal(doc, *fixture1()));
}

TEST_CASE("attributes are canonicalized on output") {
  Document doc = parse_document_xml(
      "<document><sentence>"
      "<node name=\"x\" note=\"hi\" tag=\"NP\" lex=\"w\"/>"
      "</sentence></document>");
  std::string out = serialize_document(doc, "UTF-8");
  CHECK(out.find("<node tag=\"NP\" lex=\"w\" name=\"x\" note=\"hi\"/>") !=
        std::string::npos);
}

TEST_CASE("entities decode on input and re-encode on output") {
  Document doc = parse_document_xml(
      "<document><sentence>"
      "<node tag=\"NN\" lex=\"a&amp;b &lt;c&gt; &quot;d&quot; &apos;e&apos; "
      "&#233;\"/>"
      "</sentence></document>");
  const Node& n = doc.node(doc.sentences()[0].root);
  CHECK(*n.lex == "a&b <c> \"d\" 'e' \xC3\xA9");
  std::string out = serialize_document(doc, "UTF-8");
  CHECK(out.find("a&amp;b &lt;c&gt; &quot;d&quot; 'e' \xC3\xA9") !=
        std::string::npos);
  Document again = parse_document_xml(out);
  CHECK(structurally_equal(doc, again));
}

TEST_CASE("malformed documents are rejected with a position") {
  XmlError missing_tag = parse_failure(
      "<document>\n <sentence>\n  <node lex=\"x\"/>\n </sentence>\n</document>");
  CHECK(missing_tag.line() == 3);
  CHECK(std::string(missing_tag.what()).find("missing its tag") !=
        std::string::npos);

  CHECK_THROWS_AS(parse_document_xml("<document><sentence>"
                                     "<node tag=\"A\" tag=\"B\"/>"
                                     "</sentence></document>"),
                  XmlError);
  CHECK_THROWS_AS(parse_document_xml("<document><sentence><node tag=\"A\">"
                                     "<node tag=\"B\" name=\"x\"/>"
                                     "<node tag=\"C\" name=\"x\"/>"
                                     "</node></sentence></document>"),
                  XmlError);
  CHECK_THROWS_AS(parse_document_xml("<root/>"), XmlError);
  CHECK_THROWS_AS(parse_document_xml("<document><para/></document>"), XmlError);
  CHECK_THROWS_AS(parse_document_xml("<document><sentence>hello"
                                     "</sentence></document>"),
                  XmlError);
  CHECK_THROWS_AS(parse_document_xml("<document><sentence>"
                                     "<node tag=\"A\"/><node tag=\"B\"/>"
                                     "</sentence></document>"),
                  XmlError);
  CHECK_THROWS_AS(parse_document_xml("<document><sentence/></document>"),
                  XmlError);
  CHECK_THROWS_AS(parse_document_xml("<document><sentence>"
                                     "<node tag=\"A\"/>"),
                  XmlError);
  CHECK_THROWS_AS(parse_document_xml("<document><sentence>"
                                     "<node tag=\"A\" lex=\"&nope;\"/>"
                                     "</sentence></document>"),
                  XmlError);
  CHECK_THROWS_AS(parse_document_xml("<document/><document/>"), XmlError);
  CHECK_THROWS_AS(parse_document_xml(""), XmlError);
}

TEST_CASE("comments and processing instructions are skipped") {
  Document doc = parse_document_xml(
      "<?xml version=\"1.0\"?><!-- head -->\n<document>\n<!-- x -->"
      "<sentence><node tag=\"A\"/></sentence></document><!-- tail -->");
  CHECK(doc.sentence_count() == 1);
}

TEST_CASE("latin-1 text transcodes in both directions") {
  CHECK(decode_to_utf8("caf\xE9", "ISO-8859-1") == "caf\xC3\xA9");
  CHECK(encode_from_utf8("caf\xC3\xA9", "ISO-8859-1") == "caf\xE9");
  CHECK(decode_to_utf8("plain", "US-ASCII") == "plain");
  CHECK(encode_from_utf8("plain", "UTF-8") == "plain");

  CHECK_THROWS_AS(encode_from_utf8("\xE6\x97\xA5", "ISO-8859-1"), IoError);
  CHECK_THROWS_AS(encode_from_utf8("caf\xC3\xA9", "US-ASCII"), IoError);
  CHECK_THROWS_AS(decode_to_utf8("caf\xE9", "US-ASCII"), IoError);
  CHECK_THROWS_AS(decode_to_utf8("x", "KOI8-R"), IoError);

  CHECK(known_charset("utf-8"));
  CHECK(known_charset("ISO-8859-1"));
  CHECK(known_charset("us-ascii"));
  CHECK_FALSE(known_charset("KOI8-R"));
}

TEST_CASE("a document survives a latin-1 write and read") {
  auto doc = std::make_shared<Document>();
  add_sentence(*doc, n("S", {leaf("NN", "caf\xC3\xA9")}));

  IoSpec spec = parse_io_spec("xml:mem:ISO-8859-1");
  std::ostringstream out;
  write_document(*doc, out, spec);
  std::string bytes = out.str();
  CHECK(bytes.find("encoding=\"ISO-8859-1\"") != std::string::npos);
  CHECK(bytes.find("caf\xE9") != std::string::npos);
  CHECK(bytes.find("caf\xC3\xA9") == std::string::npos);

  std::istringstream in(bytes);
  Document readback = read_document(in, spec);
  CHECK(structurally_equal(*doc, readback));
}

TEST_CASE("io specifications parse their three parts") {
  IoSpec full = parse_io_spec("xml:src.txt:UTF-8/s");
  CHECK(full.format == IoSpec::Format::Xml);
  CHECK(full.location == "src.txt");
  CHECK(full.charset == "UTF-8");
  REQUIRE(full.alias.has_value());
  CHECK(*full.alias == "s");

  IoSpec bare = parse_io_spec("raw:-");
  CHECK(bare.format == IoSpec::Format::Raw);
  CHECK(bare.location == "-");
  CHECK(bare.charset == "UTF-8");
  CHECK_FALSE(bare.alias.has_value());

  CHECK(parse_io_spec("xml:f.xml:iso-8859-1").charset == "ISO-8859-1");
  IoSpec aliased = parse_io_spec("xml:f.xml:/al");
  CHECK(aliased.charset == "UTF-8");
  CHECK(aliased.alias == "al");

  CHECK_THROWS_AS(parse_io_spec("file.xml"), IoError);
  CHECK_THROWS_AS(parse_io_spec("foo:x"), IoError);
  CHECK_THROWS_AS(parse_io_spec("xml:"), IoError);
  CHECK_THROWS_AS(parse_io_spec("xml:f.xml:UTF-8/"), IoError);
  CHECK_THROWS_AS(parse_io_spec("xml:f.xml:KOI8-R"), IoError);

  for (const char* text : {"xml:src.txt:UTF-8/s", "raw:-:UTF-8",
                           "xml:f.xml:ISO-8859-1"}) {
    IoSpec spec = parse_io_spec(text);
    CHECK(parse_io_spec(format_io_spec(spec)) == spec);
  }
}

TEST_CASE("raw results list one labelled line per record") {
  auto doc = fixture1();
  RunOutput out = run_text("C.t='NN' -> C and P and N", sources_of(doc));
  std::ostringstream raw;
  std::size_t count = write_results(out.records, raw, parse_io_spec("raw:-"));
  CHECK(count == 3);
  CHECK(raw.str() == "C: book\nP: a\nwarning: N: no matching node\n");
}

TEST_CASE("xml results render node fragments and wrapped text") {
  auto doc = fixture1();
  RunOutput out = run_text("C.t='NN' -> C and N", sources_of(doc));
  std::ostringstream xml;
  write_results(out.records, xml, parse_io_spec("xml:-"));
  CHECK(xml.str() ==
        "<node tag=\"NN\" lex=\"book\" name=\"n42\"/>\n"
        "<result label=\"warning\">N: no matching node</result>\n");

  RunOutput sent = run_text("C.l='book' -> S", sources_of(doc));
  std::ostringstream sx;
  write_results(sent.records, sx, parse_io_spec("xml:-"));
  CHECK(sx.str().rfind("<sentence>\n", 0) == 0);
  CHECK(sx.str().find("</sentence>\n") != std::string::npos);
}

TEST_CASE("documents only read and write as xml") {
  auto doc = fixture1();
  std::ostringstream out;
  CHECK_THROWS_AS(write_document(*doc, out, parse_io_spec("raw:-")), IoError);
  std::istringstream in("x");
  CHECK_THROWS_AS(read_document(in, parse_io_spec("raw:-")), IoError);
}
