#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ttq/ast.hpp"
#include "ttq/model.hpp"
#include "ttq/transform.hpp"

namespace ttq {

/// Parses "format:location[:charset][/alias]" (alias sits on the third
/// field). Empty charset means UTF-8 and "-" means the standard stream.
IoSpec parse_io_spec(const std::string& text);
std::string format_io_spec(const IoSpec& spec);

/// Readers. XML errors carry 1-based line/column.
Document parse_document_xml(const std::string& xml_text);
Document read_document(const IoSpec& spec);
Document read_document(std::istream& in, const IoSpec& spec);

/// Writers. serialize_document includes the XML declaration with the
/// charset named by `charset`; fragments do not.
std::string serialize_document(const Document& doc, const std::string& charset);
std::string xml_node_fragment(const Document& doc, NodeId node);
std::string xml_sentence_fragment(const Document& doc, int sentence_idx);
void write_document(const Document& doc, const IoSpec& spec);
void write_document(const Document& doc, std::ostream& out, const IoSpec& spec);

/// Renders records to the destination; returns how many were written.
/// Raw destinations get "label: text" lines; markup destinations get
/// fragments, plain text wrapped as <result label="...">...</result>.
std::size_t write_results(const std::vector<ResultRecord>& records, const IoSpec& spec);
std::size_t write_results(const std::vector<ResultRecord>& records, std::ostream& out,
                          const IoSpec& spec);

/// Charset helpers shared by readers and writers. Internal text is
/// always UTF-8; these convert at the boundary and throw IoError on
/// bytes the charset cannot carry.
std::string decode_to_utf8(const std::string& bytes, const std::string& charset);
std::string encode_from_utf8(const std::string& utf8, const std::string& charset);
bool known_charset(const std::string& charset);

/// Deep structural comparison (sentences, tags, lex, attribute lists).
bool structurally_equal(const Document& a, const Document& b);

}  // namespace ttq
