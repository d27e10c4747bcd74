#include "ttq/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ttq/errors.hpp"

namespace ttq {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string canonical_charset(const std::string& name) {
  std::string n = lower(name);
  if (n == "utf-8" || n == "utf8") return "UTF-8";
  if (n == "us-ascii" || n == "ascii") return "US-ASCII";
  if (n == "iso-8859-1" || n == "latin-1" || n == "latin1") return "ISO-8859-1";
  return "";
}

}  // namespace

bool known_charset(const std::string& charset) {
  return !canonical_charset(charset).empty();
}

std::string decode_to_utf8(const std::string& bytes, const std::string& charset) {
  std::string cs = canonical_charset(charset);
  if (cs == "UTF-8") return bytes;
  if (cs == "US-ASCII") {
    for (unsigned char c : bytes)
      if (c >= 0x80)
        throw IoError("byte outside US-ASCII in input declared as US-ASCII");
    return bytes;
  }
  if (cs == "ISO-8859-1") {
    std::string out;
    out.reserve(bytes.size());
    for (unsigned char c : bytes) {
      if (c < 0x80) {
        out += static_cast<char>(c);
      } else {
        out += static_cast<char>(0xC0 | (c >> 6));
        out += static_cast<char>(0x80 | (c & 0x3F));
      }
    }
    return out;
  }
  throw IoError("unknown charset '" + charset + "'");
}

std::string encode_from_utf8(const std::string& utf8, const std::string& charset) {
  std::string cs = canonical_charset(charset);
  if (cs == "UTF-8") return utf8;
  if (cs == "US-ASCII") {
    for (unsigned char c : utf8)
      if (c >= 0x80) throw IoError("text is not representable in US-ASCII");
    return utf8;
  }
  if (cs == "ISO-8859-1") {
    std::string out;
    std::size_t i = 0;
    while (i < utf8.size()) {
      unsigned char c = static_cast<unsigned char>(utf8[i]);
      if (c < 0x80) {
        out += static_cast<char>(c);
        ++i;
        continue;
      }
      if ((c & 0xE0) == 0xC0 && i + 1 < utf8.size()) {
        unsigned char c2 = static_cast<unsigned char>(utf8[i + 1]);
        unsigned int cp = ((c & 0x1Fu) << 6) | (c2 & 0x3Fu);
        if (cp <= 0xFF) {
          out += static_cast<char>(cp);
          i += 2;
          continue;
        }
      }
      throw IoError("text is not representable in ISO-8859-1");
    }
    return out;
  }
  throw IoError("unknown charset '" + charset + "'");
}

IoSpec parse_io_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (parts.size() < 2) {
    std::size_t colon = text.find(':', start);
    if (colon == std::string::npos) break;
    parts.push_back(text.substr(start, colon - start));
    start = colon + 1;
  }
  parts.push_back(text.substr(start));
  if (parts.size() < 2)
    throw IoError("a source or destination needs the form format:location");

  IoSpec spec;
  std::string fmt = lower(parts[0]);
  if (fmt == "xml")
    spec.format = IoSpec::Format::Xml;
  else if (fmt == "raw")
    spec.format = IoSpec::Format::Raw;
  else
    throw IoError("unknown format '" + parts[0] + "'");

  spec.location = parts[1];
  if (spec.location.empty()) throw IoError("empty location");

  if (parts.size() == 3) {
    std::string rest = parts[2];
    std::size_t slash = rest.find('/');
    std::string charset = slash == std::string::npos ? rest : rest.substr(0, slash);
    if (slash != std::string::npos) {
      std::string alias = rest.substr(slash + 1);
      if (alias.empty()) throw IoError("empty alias after '/'");
      spec.alias = alias;
    }
    if (!charset.empty()) {
      if (!known_charset(charset)) throw IoError("unknown charset '" + charset + "'");
      spec.charset = canonical_charset(charset);
    }
  }
  return spec;
}

std::string format_io_spec(const IoSpec& spec) {
  std::string out = spec.format == IoSpec::Format::Xml ? "xml:" : "raw:";
  out += spec.location;
  out += ":" + spec.charset;
  if (spec.alias) out += "/" + *spec.alias;
  return out;
}

// ------------------------------------------------------------------ XML in

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  bool eof() const { return i >= s.size(); }
  char peek(std::size_t k = 0) const { return i + k < s.size() ? s[i + k] : '\0'; }
  bool starts_with(const char* t) const { return s.compare(i, std::char_traits<char>::length(t), t) == 0; }

  void advance() {
    if (eof()) return;
    if (s[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }
  void advance_n(std::size_t n) {
    while (n--) advance();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw XmlError(msg, line, col);
  }
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.' || c == ':';
}

void skip_ws(Cursor& c) {
  while (!c.eof() && std::isspace(static_cast<unsigned char>(c.peek()))) c.advance();
}

void skip_misc(Cursor& c) {
  for (;;) {
    skip_ws(c);
    if (c.starts_with("<!--")) {
      c.advance_n(4);
      while (!c.eof() && !c.starts_with("-->")) c.advance();
      if (c.eof()) c.fail("unterminated comment");
      c.advance_n(3);
      continue;
    }
    if (c.starts_with("<?")) {
      c.advance_n(2);
      while (!c.eof() && !c.starts_with("?>")) c.advance();
      if (c.eof()) c.fail("unterminated processing instruction");
      c.advance_n(2);
      continue;
    }
    return;
  }
}

std::string decode_entities(Cursor& c, char quote) {
  std::string out;
  while (!c.eof() && c.peek() != quote) {
    char ch = c.peek();
    if (ch == '<') c.fail("'<' inside an attribute value");
    if (ch != '&') {
      out += ch;
      c.advance();
      continue;
    }
    std::size_t semi = c.s.find(';', c.i);
    if (semi == std::string::npos) c.fail("unterminated entity reference");
    std::string ent = c.s.substr(c.i + 1, semi - c.i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (!ent.empty() && ent[0] == '#') {
      long cp = -1;
      try {
        cp = ent[1] == 'x' || ent[1] == 'X' ? std::stol(ent.substr(2), nullptr, 16)
                                            : std::stol(ent.substr(1));
      } catch (...) {
        c.fail("bad character reference '&" + ent + ";'");
      }
      // encode the code point as UTF-8
      if (cp < 0 || cp > 0x10FFFF) c.fail("character reference out of range");
      unsigned int u = static_cast<unsigned int>(cp);
      if (u < 0x80) out += static_cast<char>(u);
      else if (u < 0x800) {
        out += static_cast<char>(0xC0 | (u >> 6));
        out += static_cast<char>(0x80 | (u & 0x3F));
      } else if (u < 0x10000) {
        out += static_cast<char>(0xE0 | (u >> 12));
        out += static_cast<char>(0x80 | ((u >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (u & 0x3F));
      } else {
        out += static_cast<char>(0xF0 | (u >> 18));
        out += static_cast<char>(0x80 | ((u >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((u >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (u & 0x3F));
      }
    } else {
      c.fail("unknown entity '&" + ent + ";'");
    }
    while (c.i <= semi) c.advance();
  }
  if (c.eof()) c.fail("unterminated attribute value");
  return out;
}

using AttrList = std::vector<std::pair<std::string, std::string>>;

AttrList parse_attrs(Cursor& c) {
  AttrList attrs;
  for (;;) {
    skip_ws(c);
    if (c.eof()) c.fail("unterminated element tag");
    char ch = c.peek();
    if (ch == '>' || ch == '/' ) return attrs;
    if (!std::isalpha(static_cast<unsigned char>(ch)) && ch != '_')
      c.fail("expected an attribute name");
    std::string name;
    while (!c.eof() && name_char(c.peek())) {
      name += c.peek();
      c.advance();
    }
    skip_ws(c);
    if (c.peek() != '=') c.fail("expected '=' after attribute name");
    c.advance();
    skip_ws(c);
    char quote = c.peek();
    if (quote != '"' && quote != '\'') c.fail("expected a quoted attribute value");
    c.advance();
    std::string value = decode_entities(c, quote);
    c.advance();  // closing quote
    for (const auto& [k, v] : attrs)
      if (k == name) c.fail("duplicate attribute '" + name + "'");
    attrs.emplace_back(std::move(name), std::move(value));
  }
}

struct ElementOpen {
  std::string name;
  AttrList attrs;
  bool self_closed = false;
  std::size_t line = 0;
  std::size_t col = 0;
};

/// At '<' of an opening tag; returns std::nullopt at a closing tag.
std::optional<ElementOpen> parse_open(Cursor& c) {
  if (c.peek() != '<') c.fail("expected an element");
  if (c.peek(1) == '/') return std::nullopt;
  ElementOpen el;
  el.line = c.line;
  el.col = c.col;
  c.advance();
  if (!std::isalpha(static_cast<unsigned char>(c.peek())) && c.peek() != '_')
    c.fail("expected an element name");
  while (!c.eof() && name_char(c.peek())) {
    el.name += c.peek();
    c.advance();
  }
  el.attrs = parse_attrs(c);
  if (c.peek() == '/') {
    c.advance();
    if (c.peek() != '>') c.fail("expected '>' after '/'");
    c.advance();
    el.self_closed = true;
    return el;
  }
  if (c.peek() != '>') c.fail("expected '>'");
  c.advance();
  return el;
}

void parse_close(Cursor& c, const std::string& name) {
  if (!(c.peek() == '<' && c.peek(1) == '/')) c.fail("expected </" + name + ">");
  c.advance_n(2);
  std::string got;
  while (!c.eof() && name_char(c.peek())) {
    got += c.peek();
    c.advance();
  }
  if (got != name) c.fail("mismatched closing tag </" + got + ">, expected </" + name + ">");
  skip_ws(c);
  if (c.peek() != '>') c.fail("expected '>'");
  c.advance();
}

/// Skips whitespace/comments before the next tag; any other text fails.
void to_next_tag(Cursor& c) {
  for (;;) {
    while (!c.eof() && std::isspace(static_cast<unsigned char>(c.peek()))) c.advance();
    if (c.starts_with("<!--")) {
      c.advance_n(4);
      while (!c.eof() && !c.starts_with("-->")) c.advance();
      if (c.eof()) c.fail("unterminated comment");
      c.advance_n(3);
      continue;
    }
    if (!c.eof() && c.peek() != '<') c.fail("unexpected text content");
    return;
  }
}

struct NameSeen {
  std::size_t line;
  std::size_t col;
};

NodeId build_node(Document& doc, Cursor& c, const ElementOpen& el,
                  std::map<std::string, NameSeen>& names) {
  if (el.name != "node")
    throw XmlError("unknown element <" + el.name + ">", el.line, el.col);

  std::string tag;
  std::optional<std::string> lex;
  AttrList rest;
  std::optional<std::pair<std::string, std::string>> name_attr;
  for (const auto& [k, v] : el.attrs) {
    if (k == "tag") tag = v;
    else if (k == "lex") lex = v;
    else if (k == "name") name_attr = {k, v};
    else rest.emplace_back(k, v);
  }
  if (tag.empty())
    throw XmlError("<node> is missing its tag attribute", el.line, el.col);
  if (name_attr) {
    auto [it, fresh] = names.try_emplace(name_attr->second,
                                         NameSeen{el.line, el.col});
    if (!fresh)
      throw XmlError("duplicate node name '" + name_attr->second + "'", el.line,
                     el.col);
  }

  NodeId id = doc.create_node(tag);
  doc.node(id).lex = lex;
  if (name_attr) doc.node(id).attrs.push_back(*name_attr);
  for (auto& kv : rest) doc.node(id).attrs.push_back(std::move(kv));

  if (el.self_closed) return id;
  for (;;) {
    to_next_tag(c);
    if (c.eof()) c.fail("unterminated <node>");
    std::optional<ElementOpen> child = parse_open(c);
    if (!child) {
      parse_close(c, "node");
      return id;
    }
    NodeId cid = build_node(doc, c, *child, names);
    doc.attach(cid, id);
  }
}

}  // namespace

Document parse_document_xml(const std::string& xml_text) {
  Cursor c{xml_text};
  Document doc;
  std::map<std::string, NameSeen> names;

  skip_misc(c);
  if (c.eof()) c.fail("empty input, expected <document>");
  std::optional<ElementOpen> root = parse_open(c);
  if (!root) c.fail("expected <document>");
  if (root->name != "document")
    throw XmlError("unknown element <" + root->name + ">, expected <document>",
                   root->line, root->col);
  if (root->self_closed) {
    skip_misc(c);
    if (!c.eof()) c.fail("content after <document/>");
    return doc;
  }
  for (;;) {
    to_next_tag(c);
    if (c.eof()) c.fail("unterminated <document>");
    std::optional<ElementOpen> el = parse_open(c);
    if (!el) {
      parse_close(c, "document");
      break;
    }
    if (el->name != "sentence")
      throw XmlError("unknown element <" + el->name + ">, expected <sentence>",
                     el->line, el->col);
    if (el->self_closed)
      throw XmlError("a sentence needs exactly one root node", el->line, el->col);
    NodeId root_node = kNoNode;
    for (;;) {
      to_next_tag(c);
      if (c.eof()) c.fail("unterminated <sentence>");
      std::optional<ElementOpen> child = parse_open(c);
      if (!child) {
        parse_close(c, "sentence");
        break;
      }
      NodeId nid = build_node(doc, c, *child, names);
      if (root_node != kNoNode)
        throw XmlError("a sentence has more than one root node", child->line,
                       child->col);
      root_node = nid;
    }
    if (root_node == kNoNode)
      throw XmlError("a sentence needs exactly one root node", el->line, el->col);
    doc.add_sentence(root_node);
  }
  skip_misc(c);
  if (!c.eof()) c.fail("content after </document>");
  return doc;
}

// ----------------------------------------------------------------- XML out

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void serialize_node(const Document& doc, NodeId id, int indent, std::string& out) {
  const Node& n = doc.node(id);
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += "<node tag=\"" + escape_xml(n.tag) + "\"";
  if (n.lex) out += " lex=\"" + escape_xml(*n.lex) + "\"";
  if (const std::string* name = n.name())
    out += " name=\"" + escape_xml(*name) + "\"";
  for (const auto& [k, v] : n.attrs) {
    if (k == "name") continue;
    out += " " + k + "=\"" + escape_xml(v) + "\"";
  }
  std::vector<NodeId> kids;
  for (NodeId c : n.children)
    if (doc.valid(c)) kids.push_back(c);
  if (kids.empty()) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  for (NodeId c : kids) serialize_node(doc, c, indent + 1, out);
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += "</node>\n";
}

}  // namespace

std::string xml_node_fragment(const Document& doc, NodeId node) {
  std::string out;
  if (doc.valid(node)) serialize_node(doc, node, 0, out);
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string xml_sentence_fragment(const Document& doc, int sentence_idx) {
  if (sentence_idx < 0 || sentence_idx >= doc.sentence_count()) return "";
  std::string out = "<sentence>\n";
  serialize_node(doc, doc.sentences()[sentence_idx].root, 1, out);
  out += "</sentence>";
  return out;
}

std::string serialize_document(const Document& doc, const std::string& charset) {
  std::string out = "<?xml version=\"1.0\" encoding=\"" + charset + "\"?>\n";
  if (doc.sentence_count() == 0) {
    out += "<document/>\n";
    return out;
  }
  out += "<document>\n";
  for (int s = 0; s < doc.sentence_count(); ++s) {
    out += "  <sentence>\n";
    serialize_node(doc, doc.sentences()[s].root, 2, out);
    out += "  </sentence>\n";
  }
  out += "</document>\n";
  return out;
}

// ----------------------------------------------------------------- streams

namespace {

std::string read_all(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Document read_document(std::istream& in, const IoSpec& spec) {
  if (spec.format != IoSpec::Format::Xml)
    throw IoError("only xml sources can be read as documents");
  std::string bytes = read_all(in);
  Document doc = parse_document_xml(decode_to_utf8(bytes, spec.charset));
  doc.set_origin(spec.location);
  return doc;
}

Document read_document(const IoSpec& spec) {
  if (spec.location == "-") return read_document(std::cin, spec);
  std::ifstream f(spec.location, std::ios::binary);
  if (!f) throw IoError("cannot open '" + spec.location + "' for reading");
  return read_document(f, spec);
}

void write_document(const Document& doc, std::ostream& out, const IoSpec& spec) {
  if (spec.format != IoSpec::Format::Xml)
    throw IoError("a whole document can only be written to an xml destination");
  out << encode_from_utf8(serialize_document(doc, spec.charset), spec.charset);
  if (!out) throw IoError("cannot write to '" + spec.location + "'");
}

void write_document(const Document& doc, const IoSpec& spec) {
  if (spec.location == "-") {
    write_document(doc, std::cout, spec);
    std::cout.flush();
    return;
  }
  std::ofstream f(spec.location, std::ios::binary);
  if (!f) throw IoError("cannot open '" + spec.location + "' for writing");
  write_document(doc, f, spec);
}

std::size_t write_results(const std::vector<ResultRecord>& records,
                          std::ostream& out, const IoSpec& spec) {
  std::string text;
  if (spec.format == IoSpec::Format::Raw) {
    for (const ResultRecord& r : records) text += r.label + ": " + r.text + "\n";
  } else {
    for (const ResultRecord& r : records) {
      if (r.kind == ResultRecord::Kind::Node ||
          r.kind == ResultRecord::Kind::Sentence)
        text += r.xml + "\n";
      else
        text += "<result label=\"" + escape_xml(r.label) + "\">" +
                escape_xml(r.text) + "</result>\n";
    }
  }
  out << encode_from_utf8(text, spec.charset);
  if (!out) throw IoError("cannot write to '" + spec.location + "'");
  return records.size();
}

std::size_t write_results(const std::vector<ResultRecord>& records,
                          const IoSpec& spec) {
  if (spec.location == "-") {
    std::size_t n = write_results(records, std::cout, spec);
    std::cout.flush();
    return n;
  }
  std::ofstream f(spec.location, std::ios::binary);
  if (!f) throw IoError("cannot open '" + spec.location + "' for writing");
  return write_results(records, f, spec);
}

namespace {

bool nodes_equal(const Document& a, NodeId na, const Document& b, NodeId nb) {
  const Node& x = a.node(na);
  const Node& y = b.node(nb);
  if (x.tag != y.tag || x.lex != y.lex || x.attrs != y.attrs) return false;
  std::vector<NodeId> xk, yk;
  for (NodeId c : x.children)
    if (a.valid(c)) xk.push_back(c);
  for (NodeId c : y.children)
    if (b.valid(c)) yk.push_back(c);
  if (xk.size() != yk.size()) return false;
  for (std::size_t i = 0; i < xk.size(); ++i)
    if (!nodes_equal(a, xk[i], b, yk[i])) return false;
  return true;
}

}  // namespace

bool structurally_equal(const Document& a, const Document& b) {
  if (a.sentence_count() != b.sentence_count()) return false;
  for (int s = 0; s < a.sentence_count(); ++s)
    if (!nodes_equal(a, a.sentences()[s].root, b, b.sentences()[s].root))
      return false;
  return true;
}

}  // namespace ttq
