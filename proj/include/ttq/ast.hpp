#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ttq {

enum class ObjectSym { F, S, C, P, N, Pr, Nx, A, D, R, T, M };
enum class MemberSym { Lex, Tag, Attr, Level, Leaf };  // l t a v f
enum class CompareOp { Eq, Ne, Like, NotLike };

struct ValueExpr;

/// Integer index or the last-position marker `z`.
struct IndexBound {
  bool last = false;
  int position = 0;  // 1-based, meaningful when !last

  bool operator==(const IndexBound&) const = default;
};

/// One part of a bracketed index. Two parts may be combined as
/// `[first:second]`; a second quantifier or position then selects over
/// the candidates the first part enumerated.
struct IndexPart {
  enum class Kind {
    Pick,       // integer position or z
    First,      // ?
    LastMatch,  // .
    Any,        // *
    All,        // @
    None,       // 0
    Range,      // lo-hi, lo-, -hi
    Key,        // quoted or evaluable key (R, T, member a)
    Alias,      // bare identifier (M)
  };

  Kind kind = Kind::Pick;
  IndexBound pick;
  std::optional<IndexBound> lo, hi;   // Range
  std::shared_ptr<ValueExpr> key;     // Key
  std::string alias;                  // Alias

  bool operator==(const IndexPart& o) const;
};

struct IndexSpec {
  std::vector<IndexPart> parts;  // size 1 or 2

  bool operator==(const IndexSpec&) const = default;
};

struct AddressSegment {
  ObjectSym object = ObjectSym::C;
  std::optional<IndexSpec> index;

  bool operator==(const AddressSegment&) const = default;
};

struct NodeAddress {
  std::vector<AddressSegment> segments;

  bool operator==(const NodeAddress&) const = default;
};

/// A literal, or a node address with an optional trailing member.
struct ValueAtom {
  std::optional<std::string> literal;
  NodeAddress address;                 // used when !literal
  std::optional<MemberSym> member;
  std::shared_ptr<ValueExpr> attr_key;  // member == Attr

  bool is_literal() const { return literal.has_value(); }
  bool operator==(const ValueAtom& o) const;
};

/// One or more atoms; more than one means concatenation with `+`.
struct ValueExpr {
  std::vector<ValueAtom> atoms;

  bool operator==(const ValueExpr&) const = default;
};

struct Comparison {
  ValueExpr lhs;
  CompareOp op = CompareOp::Eq;
  ValueExpr rhs;
  std::optional<std::string> alias;
  // atom whose satisfying candidates the alias captures
  int alias_side = 0;  // 0 = lhs, 1 = rhs
  int alias_atom = 0;

  bool operator==(const Comparison&) const = default;
};

struct ConditionExpr {
  enum class Kind { And, Or, Not, Leaf };

  Kind kind = Kind::Leaf;
  std::vector<ConditionExpr> children;  // And/Or: 2+, Not: 1
  std::optional<Comparison> cmp;        // Leaf

  bool operator==(const ConditionExpr&) const = default;
};

struct ActionExpr {
  enum class Kind { Return, MemberAssign, NodeAssign };

  Kind kind = Kind::Return;
  ValueExpr value;                     // return value or assignment source
  std::optional<std::string> alias;    // Return only
  ValueAtom target;                    // assignments only

  bool operator==(const ActionExpr&) const = default;
};

struct IoSpec {
  enum class Format { Xml, Raw };

  Format format = Format::Xml;
  std::string location;
  std::string charset = "UTF-8";
  std::optional<std::string> alias;

  bool operator==(const IoSpec&) const = default;
};

struct CommandCall {
  std::string name;

  bool operator==(const CommandCall&) const = default;
};

/// A whole parsed query: sources, optional thread-tree directive, the
/// condition, actions or a command, destinations.
struct QueryAst {
  std::vector<IoSpec> sources;
  std::optional<std::string> tt_directive;
  std::optional<ConditionExpr> condition;
  std::vector<ActionExpr> actions;
  std::optional<CommandCall> command;
  std::vector<IoSpec> destinations;

  bool operator==(const QueryAst&) const = default;
};

inline bool IndexPart::operator==(const IndexPart& o) const {
  if (kind != o.kind || pick != o.pick || lo != o.lo || hi != o.hi ||
      alias != o.alias)
    return false;
  if (static_cast<bool>(key) != static_cast<bool>(o.key)) return false;
  return !key || *key == *o.key;
}

inline bool ValueAtom::operator==(const ValueAtom& o) const {
  if (literal != o.literal || address != o.address || member != o.member)
    return false;
  if (static_cast<bool>(attr_key) != static_cast<bool>(o.attr_key))
    return false;
  return !attr_key || *attr_key == *o.attr_key;
}

}  // namespace ttq
