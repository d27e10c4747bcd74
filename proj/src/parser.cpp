#include "ttq/parser.hpp"

#include <cctype>
#include <set>
#include <utility>

#include "ttq/errors.hpp"
#include "ttq/io.hpp"
#include "ttq/lexer.hpp"

namespace ttq {

namespace {

std::optional<ObjectSym> object_sym(const std::string& s) {
  if (s == "F") return ObjectSym::F;
  if (s == "S") return ObjectSym::S;
  if (s == "C") return ObjectSym::C;
  if (s == "P") return ObjectSym::P;
  if (s == "N") return ObjectSym::N;
  if (s == "Pr") return ObjectSym::Pr;
  if (s == "Nx") return ObjectSym::Nx;
  if (s == "A") return ObjectSym::A;
  if (s == "D") return ObjectSym::D;
  if (s == "R") return ObjectSym::R;
  if (s == "T") return ObjectSym::T;
  if (s == "M") return ObjectSym::M;
  return std::nullopt;
}

const char* object_name(ObjectSym o) {
  switch (o) {
    case ObjectSym::F: return "F";
    case ObjectSym::S: return "S";
    case ObjectSym::C: return "C";
    case ObjectSym::P: return "P";
    case ObjectSym::N: return "N";
    case ObjectSym::Pr: return "Pr";
    case ObjectSym::Nx: return "Nx";
    case ObjectSym::A: return "A";
    case ObjectSym::D: return "D";
    case ObjectSym::R: return "R";
    case ObjectSym::T: return "T";
    case ObjectSym::M: return "M";
  }
  return "?";
}

bool is_axis(ObjectSym o) {
  switch (o) {
    case ObjectSym::P:
    case ObjectSym::N:
    case ObjectSym::Pr:
    case ObjectSym::Nx:
    case ObjectSym::A:
    case ObjectSym::D:
      return true;
    default:
      return false;
  }
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_word(const Token& t, const char* w) {
  return t.kind == Tok::Ident && lower(t.text) == w;
}

std::optional<MemberSym> member_sym(const std::string& s) {
  if (s == "l") return MemberSym::Lex;
  if (s == "t") return MemberSym::Tag;
  if (s == "a") return MemberSym::Attr;
  if (s == "v") return MemberSym::Level;
  if (s == "f") return MemberSym::Leaf;
  return std::nullopt;
}

/// Splits source / middle / destination sections on the first unquoted
/// `=:` and the first unquoted `:=`, keeping byte offsets so columns in
/// later errors stay relative to the whole query text.
struct Sections {
  std::string sources;
  std::string mid;
  std::size_t mid_off = 0;
  std::string dests;
  std::size_t dests_off = 0;
};

Sections split_sections(const std::string& text) {
  Sections out;
  std::size_t n = text.size();
  std::size_t src_end = std::string::npos;
  std::size_t mid_start = 0;
  std::size_t mid_end = n;
  std::size_t dst_start = std::string::npos;
  bool in_lit = false;
  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (in_lit) {
      if (c == '\\' && i + 1 < n)
        ++i;
      else if (c == '\'')
        in_lit = false;
      continue;
    }
    if (c == '\'') {
      in_lit = true;
      continue;
    }
    if (src_end == std::string::npos && dst_start == std::string::npos &&
        c == '=' && i + 1 < n && text[i + 1] == ':' &&
        (i == 0 || (text[i - 1] != '!' && text[i - 1] != '~' && text[i - 1] != ':'))) {
      src_end = i;
      mid_start = i + 2;
      ++i;
      continue;
    }
    if (dst_start == std::string::npos && c == ':' && i + 1 < n && text[i + 1] == '=') {
      mid_end = i;
      dst_start = i + 2;
      ++i;
      continue;
    }
  }
  if (src_end != std::string::npos) out.sources = text.substr(0, src_end);
  out.mid_off = mid_start;
  out.mid = text.substr(mid_start, mid_end - mid_start);
  if (dst_start != std::string::npos) {
    out.dests_off = dst_start;
    out.dests = text.substr(dst_start);
  }
  return out;
}

/// Parses a whitespace separated list "spec AND spec ...". `off` is the
/// byte offset of `text` within the full query (for error columns).
std::vector<IoSpec> parse_io_list(const std::string& text, std::size_t off,
                                  const char* what) {
  std::vector<IoSpec> specs;
  std::vector<std::pair<std::string, std::size_t>> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    words.emplace_back(text.substr(start, i - start), off + start + 1);
  }
  bool expect_spec = true;
  for (const auto& [word, col] : words) {
    bool is_and = lower(word) == "and";
    if (expect_spec) {
      if (is_and)
        throw ParseError(std::string("expected a ") + what + " specification", col,
                         {"format:location"});
      try {
        specs.push_back(parse_io_spec(word));
      } catch (const IoError& e) {
        throw ParseError(std::string("bad ") + what + " specification: " + e.what(),
                         col, {"format:location[:charset][/alias]"});
      }
    } else if (!is_and) {
      throw ParseError(std::string("expected 'AND' between ") + what +
                           " specifications",
                       col, {"AND"});
    }
    expect_spec = !expect_spec;
  }
  if (!words.empty() && expect_spec)
    throw ParseError(std::string("dangling 'AND' in ") + what + " list",
                     off + text.size(), {"format:location"});
  if (words.empty())
    throw ParseError(std::string("empty ") + what + " list", off + 1,
                     {"format:location"});
  return specs;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  void parse_mid(QueryAst& ast) {
    if (cur().kind == Tok::Ident && cur().text == "TT" &&
        peek(1).kind == Tok::LBracket) {
      parse_tt(ast);
    }
    if (cur().kind == Tok::Ident && !object_sym(cur().text) &&
        !is_word(cur(), "and") && !is_word(cur(), "or") &&
        peek(1).kind == Tok::End) {
      if (ast.tt_directive)
        throw err("a bare command cannot follow a TT directive", cur(), {});
      ast.command = CommandCall{cur().text};
      advance();
      return;
    }
    ast.condition = parse_or();
    if (accept(Tok::Arrow)) parse_rhs(ast);
    if (cur().kind != Tok::End)
      throw err("unexpected input after the query", cur(), {"end of query"});
  }

 private:
  // Where an alias (`/name`) attached while parsing a comparison.
  struct AliasCapture {
    bool present = false;
    bool at_atom = false;  // attached to a specific address atom
    int side = 0;
    int atom = 0;
    std::string name;
    std::size_t column = 0;
  };

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t k) const {
    std::size_t i = pos_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  void advance() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }
  bool accept(Tok k) {
    if (cur().kind != k) return false;
    advance();
    return true;
  }
  Token expect(Tok k, const char* what) {
    if (cur().kind != k)
      throw err(std::string("expected ") + what, cur(), {what});
    Token t = cur();
    advance();
    return t;
  }

  ParseError err(const std::string& msg, const Token& at,
                 std::vector<std::string> expected) const {
    std::string full = msg;
    if (at.kind == Tok::End)
      full += " at end of query";
    else
      full += ", got '" + (at.text.empty() ? std::string(token_name(at.kind)) : at.text) + "'";
    return ParseError(full, at.column, std::move(expected));
  }

  void parse_tt(QueryAst& ast) {
    advance();  // TT
    expect(Tok::LBracket, "'['");
    Token type = expect(Tok::Literal, "a quoted thread type");
    if (type.text.empty())
      throw ParseError("thread type must not be empty", type.column);
    expect(Tok::RBracket, "']'");
    expect(Tok::Colon, "':' after the TT directive");
    ast.tt_directive = type.text;
  }

  ConditionExpr parse_or() {
    ConditionExpr first = parse_and();
    if (!is_word(cur(), "or")) return first;
    ConditionExpr node;
    node.kind = ConditionExpr::Kind::Or;
    node.children.push_back(std::move(first));
    while (is_word(cur(), "or")) {
      advance();
      node.children.push_back(parse_and());
    }
    return node;
  }

  ConditionExpr parse_and() {
    ConditionExpr first = parse_unary();
    if (!is_word(cur(), "and")) return first;
    ConditionExpr node;
    node.kind = ConditionExpr::Kind::And;
    node.children.push_back(std::move(first));
    while (is_word(cur(), "and")) {
      advance();
      node.children.push_back(parse_unary());
    }
    return node;
  }

  ConditionExpr parse_unary() {
    if (accept(Tok::Bang)) {
      expect(Tok::LParen, "'(' after '!'");
      ConditionExpr inner = parse_or();
      expect(Tok::RParen, "')'");
      ConditionExpr node;
      node.kind = ConditionExpr::Kind::Not;
      node.children.push_back(std::move(inner));
      return node;
    }
    if (accept(Tok::LParen)) {
      ConditionExpr inner = parse_or();
      expect(Tok::RParen, "')'");
      return inner;
    }
    ConditionExpr node;
    node.kind = ConditionExpr::Kind::Leaf;
    node.cmp = parse_comparison();
    return node;
  }

  CompareOp parse_compare_op() {
    switch (cur().kind) {
      case Tok::Eq: advance(); return CompareOp::Eq;
      case Tok::Ne: advance(); return CompareOp::Ne;
      case Tok::Like: advance(); return CompareOp::Like;
      case Tok::NotLike: advance(); return CompareOp::NotLike;
      default:
        throw err("expected a comparison operator", cur(), {"=", "!=", "~", "!~"});
    }
  }

  Comparison parse_comparison() {
    Comparison cmp;
    AliasCapture alias;
    cmp.lhs = parse_value_expr(&alias, 0);
    cmp.op = parse_compare_op();
    cmp.rhs = parse_value_expr(&alias, 1);
    if (cur().kind == Tok::Slash) {
      // `/name` after a trailing literal: comparison-level alias.
      advance();
      Token name = expect(Tok::Ident, "an alias name after '/'");
      if (alias.present)
        throw ParseError("only one alias per comparison", name.column);
      alias.present = true;
      alias.at_atom = false;
      alias.name = name.text;
      alias.column = name.column;
    }
    if (alias.present) {
      register_alias(alias.name, alias.column);
      cmp.alias = alias.name;
      if (alias.at_atom) {
        cmp.alias_side = alias.side;
        cmp.alias_atom = alias.atom;
      } else {
        // Bind the alias to the last address atom of the left side,
        // else the first of the right side, else the left literal.
        cmp.alias_side = 0;
        cmp.alias_atom = 0;
        bool found = false;
        for (int i = static_cast<int>(cmp.lhs.atoms.size()) - 1; i >= 0 && !found; --i)
          if (!cmp.lhs.atoms[i].is_literal()) {
            cmp.alias_side = 0;
            cmp.alias_atom = i;
            found = true;
          }
        for (std::size_t i = 0; i < cmp.rhs.atoms.size() && !found; ++i)
          if (!cmp.rhs.atoms[i].is_literal()) {
            cmp.alias_side = 1;
            cmp.alias_atom = static_cast<int>(i);
            found = true;
          }
      }
    }
    return cmp;
  }

  void register_alias(const std::string& name, std::size_t column) {
    if (aliases_.count(name))
      throw ParseError("alias '" + name + "' is already defined", column);
    aliases_.insert(name);
  }

  ValueExpr parse_value_expr(AliasCapture* alias, int side, bool allow_alias = true) {
    ValueExpr v;
    v.atoms.push_back(parse_atom(alias, side, 0, allow_alias));
    // '+' concatenates; an atom directly followed by another atom (a
    // literal, or an address starting with an object symbol) concatenates
    // implicitly, e.g. P.t';' reads as P.t + ';'.
    while (true) {
      bool more = accept(Tok::Plus);
      if (!more)
        more = cur().kind == Tok::Literal ||
               (cur().kind == Tok::Ident && object_sym(cur().text));
      if (!more) break;
      v.atoms.push_back(
          parse_atom(alias, side, static_cast<int>(v.atoms.size()), allow_alias));
    }
    return v;
  }

  ValueAtom parse_atom(AliasCapture* alias, int side, int index, bool allow_alias) {
    if (cur().kind == Tok::Literal) {
      ValueAtom a;
      a.literal = cur().text;
      advance();
      return a;
    }
    if (cur().kind != Tok::Ident || !object_sym(cur().text))
      throw err("expected an object symbol or a literal", cur(),
                {"object symbol", "literal"});
    ValueAtom a;
    parse_address(a);
    if (cur().kind == Tok::Slash) {
      advance();
      Token name = expect(Tok::Ident, "an alias name after '/'");
      if (!allow_alias || !alias)
        throw ParseError("an alias is not allowed here", name.column);
      if (alias->present)
        throw ParseError("only one alias per comparison", name.column);
      alias->present = true;
      alias->at_atom = true;
      alias->side = side;
      alias->atom = index;
      alias->name = name.text;
      alias->column = name.column;
    }
    return a;
  }

  void parse_address(ValueAtom& atom) {
    parse_segment_into(atom.address);
    while (cur().kind == Tok::Dot) {
      const Token& next = peek(1);
      if (next.kind != Tok::Ident)
        throw err("expected an object symbol or a member after '.'", next,
                  {"object symbol", "l", "t", "a", "v", "f"});
      if (object_sym(next.text)) {
        advance();  // '.'
        parse_segment_into(atom.address);
        continue;
      }
      if (member_sym(next.text)) {
        advance();  // '.'
        parse_member(atom);
        break;
      }
      throw err("unknown member or object '" + next.text + "'", next,
                {"object symbol", "l", "t", "a", "v", "f"});
    }
    if (atom.address.segments.front().object == ObjectSym::S &&
        (atom.address.segments.size() > 1 || atom.member))
      throw ParseError("S stands alone and has no members or navigation",
                       cur().column);
  }

  void parse_member(ValueAtom& atom) {
    Token m = expect(Tok::Ident, "a member");
    std::optional<MemberSym> sym = member_sym(m.text);
    if (!sym)
      throw err("unknown member '" + m.text + "'", m, {"l", "t", "a", "v", "f"});
    atom.member = sym;
    if (*sym == MemberSym::Attr) {
      expect(Tok::LBracket, "'[' after 'a'");
      atom.attr_key = std::make_shared<ValueExpr>(parse_key_expr());
      expect(Tok::RBracket, "']'");
    }
  }

  ValueExpr parse_key_expr() {
    if (cur().kind != Tok::Literal &&
        !(cur().kind == Tok::Ident && object_sym(cur().text)))
      throw err("expected a key", cur(), {"literal", "object symbol"});
    return parse_value_expr(nullptr, 0, /*allow_alias=*/false);
  }

  void parse_segment_into(NodeAddress& addr) {
    Token objTok = expect(Tok::Ident, "an object symbol");
    std::optional<ObjectSym> obj = object_sym(objTok.text);
    if (!obj)
      throw err("unknown object symbol '" + objTok.text + "'", objTok,
                {"object symbol"});
    bool first = addr.segments.empty();
    if (!first && addr.segments.front().object == ObjectSym::S)
      throw ParseError("S stands alone and has no members or navigation",
                       objTok.column);
    switch (*obj) {
      case ObjectSym::F:
      case ObjectSym::M:
        if (!first)
          throw ParseError(std::string(object_name(*obj)) +
                               " can only start an address",
                           objTok.column);
        break;
      case ObjectSym::C:
        if (!first && !(addr.segments.size() == 1 &&
                        addr.segments.front().object == ObjectSym::F))
          throw ParseError("C can only start an address or follow F",
                           objTok.column);
        break;
      case ObjectSym::S:
        if (!first)
          throw ParseError("S stands alone and has no members or navigation",
                           objTok.column);
        break;
      default:
        break;
    }
    AddressSegment seg;
    seg.object = *obj;
    if (cur().kind == Tok::LBracket) {
      Token open = cur();
      advance();
      seg.index = parse_index(*obj, open);
      expect(Tok::RBracket, "']'");
    }
    if ((*obj == ObjectSym::F || *obj == ObjectSym::M) && !seg.index)
      throw ParseError(std::string(object_name(*obj)) + " requires a bracketed name",
                       objTok.column);
    if ((*obj == ObjectSym::C || *obj == ObjectSym::S) && seg.index)
      throw ParseError(std::string(object_name(*obj)) + " takes no index",
                       objTok.column);
    // Two positions combined, e.g. D[2:3], are shorthand for chained
    // segments D[2].D[3].
    if (is_axis(*obj) && seg.index && seg.index->parts.size() == 2 &&
        seg.index->parts[0].kind == IndexPart::Kind::Pick) {
      AddressSegment s1;
      s1.object = *obj;
      s1.index = IndexSpec{{seg.index->parts[0]}};
      AddressSegment s2;
      s2.object = *obj;
      s2.index = IndexSpec{{seg.index->parts[1]}};
      addr.segments.push_back(std::move(s1));
      addr.segments.push_back(std::move(s2));
      return;
    }
    addr.segments.push_back(std::move(seg));
  }

  IndexSpec parse_index(ObjectSym obj, const Token& open) {
    IndexSpec spec;
    switch (obj) {
      case ObjectSym::M: {
        Token name = expect(Tok::Ident, "an alias name");
        if (!aliases_.count(name.text))
          throw ParseError("alias '" + name.text + "' is not defined at this point",
                           name.column);
        IndexPart p;
        p.kind = IndexPart::Kind::Alias;
        p.alias = name.text;
        spec.parts.push_back(std::move(p));
        if (accept(Tok::Colon)) spec.parts.push_back(parse_selector_part());
        return spec;
      }
      case ObjectSym::F: {
        Token name = expect(Tok::Ident, "a source alias");
        IndexPart p;
        p.kind = IndexPart::Kind::Alias;
        p.alias = name.text;
        spec.parts.push_back(std::move(p));
        return spec;
      }
      case ObjectSym::R:
      case ObjectSym::T: {
        if (cur().kind == Tok::Literal ||
            (cur().kind == Tok::Ident && object_sym(cur().text))) {
          IndexPart p;
          p.kind = IndexPart::Kind::Key;
          p.key = std::make_shared<ValueExpr>(parse_key_expr());
          spec.parts.push_back(std::move(p));
          if (accept(Tok::Colon)) {
            if (obj == ObjectSym::R)
              throw ParseError("R takes a single thread key", cur().column);
            spec.parts.push_back(parse_selector_part());
          }
          return spec;
        }
        if (obj == ObjectSym::R)
          throw err("R needs a thread key", cur(), {"'key'"});
        // T with a bare selector falls back to the default thread type.
        spec.parts.push_back(parse_selector_part());
        return spec;
      }
      default: {  // axes
        spec.parts.push_back(parse_selector_part());
        if (accept(Tok::Colon)) spec.parts.push_back(parse_selector_part());
        if (spec.parts[0].kind == IndexPart::Kind::Key ||
            spec.parts[0].kind == IndexPart::Kind::Alias)
          throw ParseError("this index must be a position, wildcard or range",
                           open.column + 1);
        return spec;
      }
    }
  }

  IndexPart parse_selector_part() {
    Token t = cur();
    IndexPart p;
    switch (t.kind) {
      case Tok::Star:
        advance();
        p.kind = IndexPart::Kind::Any;
        return p;
      case Tok::At:
        advance();
        p.kind = IndexPart::Kind::All;
        return p;
      case Tok::Question:
        advance();
        p.kind = IndexPart::Kind::First;
        return p;
      case Tok::Dot:
        advance();
        p.kind = IndexPart::Kind::LastMatch;
        return p;
      case Tok::Int: {
        long v = t.value;
        advance();
        if (cur().kind == Tok::Dash) {
          if (v == 0) throw ParseError("positions are 1-based", t.column);
          advance();
          p.kind = IndexPart::Kind::Range;
          p.lo = IndexBound{false, static_cast<int>(v)};
          parse_range_hi(p);
          return p;
        }
        if (v == 0) {
          p.kind = IndexPart::Kind::None;
          return p;
        }
        p.kind = IndexPart::Kind::Pick;
        p.pick = IndexBound{false, static_cast<int>(v)};
        return p;
      }
      case Tok::Dash: {
        advance();
        p.kind = IndexPart::Kind::Range;
        if (!parse_range_hi(p) || !p.hi)
          throw err("expected a position after '-'", cur(), {"integer", "z"});
        return p;
      }
      case Tok::Ident:
        if (t.text == "z") {
          advance();
          if (cur().kind == Tok::Dash) {
            advance();
            p.kind = IndexPart::Kind::Range;
            p.lo = IndexBound{true, 0};
            parse_range_hi(p);
            return p;
          }
          p.kind = IndexPart::Kind::Pick;
          p.pick = IndexBound{true, 0};
          return p;
        }
        throw err("unknown index '" + t.text + "'", t,
                  {"integer", "z", "*", "@", "?", ".", "0", "range"});
      default:
        throw err("expected an index", t,
                  {"integer", "z", "*", "@", "?", ".", "0", "range"});
    }
  }

  // Optional upper bound after '-'; true when one was present.
  bool parse_range_hi(IndexPart& p) {
    if (cur().kind == Tok::Int) {
      if (cur().value == 0) throw ParseError("positions are 1-based", cur().column);
      p.hi = IndexBound{false, static_cast<int>(cur().value)};
      advance();
      return true;
    }
    if (cur().kind == Tok::Ident && cur().text == "z") {
      p.hi = IndexBound{true, 0};
      advance();
      return true;
    }
    return false;
  }

  void parse_rhs(QueryAst& ast) {
    if (cur().kind == Tok::Ident && !object_sym(cur().text) &&
        !is_word(cur(), "and") && !is_word(cur(), "or") &&
        peek(1).kind == Tok::End) {
      ast.command = CommandCall{cur().text};
      advance();
      return;
    }
    ast.actions.push_back(parse_action());
    while (is_word(cur(), "and")) {
      advance();
      ast.actions.push_back(parse_action());
    }
  }

  ActionExpr parse_action() {
    ActionExpr act;
    AliasCapture alias;
    ValueExpr first = parse_value_expr(&alias, 0);
    if (cur().kind == Tok::Eq) {
      Token eq = cur();
      advance();
      if (alias.present)
        throw ParseError("an alias is not allowed on an assignment target",
                         alias.column);
      if (first.atoms.size() != 1 || first.atoms[0].is_literal())
        throw ParseError("the assignment target must be a single node address",
                         eq.column);
      AliasCapture rhs_alias;
      ValueExpr source = parse_value_expr(&rhs_alias, 1);
      if (rhs_alias.present)
        throw ParseError("an alias is not allowed in an assignment",
                         rhs_alias.column);
      act.target = first.atoms[0];
      act.value = std::move(source);
      if (act.target.member) {
        if (*act.target.member == MemberSym::Level ||
            *act.target.member == MemberSym::Leaf)
          throw ParseError("members v and f are read-only", eq.column);
        act.kind = ActionExpr::Kind::MemberAssign;
      } else {
        act.kind = ActionExpr::Kind::NodeAssign;
      }
      return act;
    }
    // Return value; a trailing `/name` after a literal names the record.
    if (cur().kind == Tok::Slash && !alias.present) {
      advance();
      Token name = expect(Tok::Ident, "an alias name after '/'");
      alias.present = true;
      alias.name = name.text;
      alias.column = name.column;
    }
    act.kind = ActionExpr::Kind::Return;
    act.value = std::move(first);
    if (alias.present) {
      register_alias(alias.name, alias.column);
      act.alias = alias.name;
    }
    return act;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> aliases_;
};

// ---------------------------------------------------------------- format

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  out += '\'';
  return out;
}

std::string format_bound(const IndexBound& b) {
  return b.last ? "z" : std::to_string(b.position);
}

std::string format_part(const IndexPart& p) {
  switch (p.kind) {
    case IndexPart::Kind::Pick: return format_bound(p.pick);
    case IndexPart::Kind::First: return "?";
    case IndexPart::Kind::LastMatch: return ".";
    case IndexPart::Kind::Any: return "*";
    case IndexPart::Kind::All: return "@";
    case IndexPart::Kind::None: return "0";
    case IndexPart::Kind::Range: {
      std::string out;
      if (p.lo) out += format_bound(*p.lo);
      out += "-";
      if (p.hi) out += format_bound(*p.hi);
      return out;
    }
    case IndexPart::Kind::Key: return format_value(*p.key);
    case IndexPart::Kind::Alias: return p.alias;
  }
  return "";
}

std::string format_segment(const AddressSegment& seg) {
  std::string out = object_name(seg.object);
  if (seg.index) {
    out += "[";
    for (std::size_t i = 0; i < seg.index->parts.size(); ++i) {
      if (i) out += ":";
      out += format_part(seg.index->parts[i]);
    }
    out += "]";
  }
  return out;
}

const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Like: return "~";
    case CompareOp::NotLike: return "!~";
  }
  return "=";
}

std::string format_condition_prec(const ConditionExpr& cond, bool parenthesize);

std::string format_value_with_alias(const ValueExpr& v, int aliased_atom,
                                    const std::string* alias) {
  std::string out;
  for (std::size_t i = 0; i < v.atoms.size(); ++i) {
    if (i) out += "+";
    out += format_atom(v.atoms[i]);
    if (alias && static_cast<int>(i) == aliased_atom && !v.atoms[i].is_literal())
      out += "/" + *alias;
  }
  return out;
}

}  // namespace

QueryAst parse_query(const std::string& text) {
  Sections sec = split_sections(text);
  QueryAst ast;
  if (!sec.sources.empty() || sec.mid_off != 0)
    ast.sources = parse_io_list(sec.sources, 0, "source");
  std::vector<Token> toks = tokenize(sec.mid, sec.mid_off);
  Parser parser(std::move(toks));
  parser.parse_mid(ast);
  if (!sec.dests.empty() || sec.dests_off != 0)
    ast.destinations = parse_io_list(sec.dests, sec.dests_off, "destination");
  return ast;
}

std::string format_atom(const ValueAtom& atom) {
  if (atom.is_literal()) return quote(*atom.literal);
  std::string out;
  for (std::size_t i = 0; i < atom.address.segments.size(); ++i) {
    if (i) out += ".";
    out += format_segment(atom.address.segments[i]);
  }
  if (atom.member) {
    switch (*atom.member) {
      case MemberSym::Lex: out += ".l"; break;
      case MemberSym::Tag: out += ".t"; break;
      case MemberSym::Level: out += ".v"; break;
      case MemberSym::Leaf: out += ".f"; break;
      case MemberSym::Attr:
        out += ".a[" + format_value(*atom.attr_key) + "]";
        break;
    }
  }
  return out;
}

std::string format_value(const ValueExpr& value) {
  return format_value_with_alias(value, -1, nullptr);
}

std::string format_comparison(const Comparison& cmp) {
  std::string out;
  bool atom_alias = false;
  if (cmp.alias) {
    const ValueExpr& side = cmp.alias_side == 0 ? cmp.lhs : cmp.rhs;
    if (cmp.alias_atom >= 0 &&
        cmp.alias_atom < static_cast<int>(side.atoms.size()) &&
        !side.atoms[cmp.alias_atom].is_literal())
      atom_alias = true;
  }
  const std::string* alias = cmp.alias ? &*cmp.alias : nullptr;
  out += format_value_with_alias(
      cmp.lhs, atom_alias && cmp.alias_side == 0 ? cmp.alias_atom : -1, alias);
  out += op_text(cmp.op);
  out += format_value_with_alias(
      cmp.rhs, atom_alias && cmp.alias_side == 1 ? cmp.alias_atom : -1, alias);
  if (alias && !atom_alias) out += "/" + *alias;
  return out;
}

namespace {

std::string format_condition_prec(const ConditionExpr& cond, bool parenthesize) {
  switch (cond.kind) {
    case ConditionExpr::Kind::Leaf:
      return format_comparison(*cond.cmp);
    case ConditionExpr::Kind::Not:
      return "!(" + format_condition_prec(cond.children[0], false) + ")";
    case ConditionExpr::Kind::And: {
      std::string out;
      for (std::size_t i = 0; i < cond.children.size(); ++i) {
        if (i) out += " AND ";
        const ConditionExpr& ch = cond.children[i];
        bool wrap = ch.kind == ConditionExpr::Kind::Or ||
                    ch.kind == ConditionExpr::Kind::And;
        out += wrap ? "(" + format_condition_prec(ch, false) + ")"
                    : format_condition_prec(ch, false);
      }
      return parenthesize ? "(" + out + ")" : out;
    }
    case ConditionExpr::Kind::Or: {
      std::string out;
      for (std::size_t i = 0; i < cond.children.size(); ++i) {
        if (i) out += " OR ";
        const ConditionExpr& ch = cond.children[i];
        bool wrap = ch.kind == ConditionExpr::Kind::Or;
        out += wrap ? "(" + format_condition_prec(ch, false) + ")"
                    : format_condition_prec(ch, false);
      }
      return parenthesize ? "(" + out + ")" : out;
    }
  }
  return "";
}

}  // namespace

std::string format_condition(const ConditionExpr& cond) {
  return format_condition_prec(cond, false);
}

std::string format_action(const ActionExpr& action) {
  switch (action.kind) {
    case ActionExpr::Kind::Return: {
      std::string out = format_value(action.value);
      if (action.alias) out += "/" + *action.alias;
      return out;
    }
    case ActionExpr::Kind::MemberAssign:
    case ActionExpr::Kind::NodeAssign:
      return format_atom(action.target) + "=" + format_value(action.value);
  }
  return "";
}

std::string format_query(const QueryAst& ast) {
  std::string out;
  for (std::size_t i = 0; i < ast.sources.size(); ++i) {
    if (i) out += " AND ";
    out += format_io_spec(ast.sources[i]);
  }
  if (!ast.sources.empty()) out += " =: ";
  if (ast.tt_directive) out += "TT[" + quote(*ast.tt_directive) + "]: ";
  if (ast.condition) out += format_condition(*ast.condition);
  if (ast.command) {
    if (ast.condition) out += " -> ";
    out += ast.command->name;
  } else if (!ast.actions.empty()) {
    out += " -> ";
    for (std::size_t i = 0; i < ast.actions.size(); ++i) {
      if (i) out += " AND ";
      out += format_action(ast.actions[i]);
    }
  }
  if (!ast.destinations.empty()) {
    out += " := ";
    for (std::size_t i = 0; i < ast.destinations.size(); ++i) {
      if (i) out += " AND ";
      out += format_io_spec(ast.destinations[i]);
    }
  }
  return out;
}

}  // namespace ttq
