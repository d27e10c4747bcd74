#pragma once

#include <string>

#include "ttq/ast.hpp"

namespace ttq {

/// Parses one query (optionally with backslash-newline continuations)
/// into an AST. Throws ParseError with a 1-based column on failure.
QueryAst parse_query(const std::string& text);

/// Canonical single-line rendering. Reparsing the result yields a
/// structurally equal AST.
std::string format_query(const QueryAst& ast);

std::string format_condition(const ConditionExpr& cond);
std::string format_comparison(const Comparison& cmp);
std::string format_value(const ValueExpr& value);
std::string format_atom(const ValueAtom& atom);
std::string format_action(const ActionExpr& action);

}  // namespace ttq
