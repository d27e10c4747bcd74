#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ttq {

enum class Tok {
  Ident,
  Int,
  Literal,   // contents with escapes resolved
  LParen,
  RParen,
  LBracket,
  RBracket,
  Dot,
  Plus,
  Slash,
  Colon,
  Bang,
  Eq,
  Ne,
  Like,
  NotLike,
  Arrow,    // ->
  SrcSep,   // =:
  DstSep,   // :=
  Star,
  At,
  Question,
  Dash,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long value = 0;     // Int
  std::size_t column = 0;  // 1-based position in the query text
};

/// Splits query text into tokens. Backslash-newline is a line
/// continuation; other whitespace separates tokens. Throws ParseError
/// for unterminated literals and illegal characters.
std::vector<Token> tokenize(const std::string& text,
                            std::size_t column_offset = 0);

const char* token_name(Tok kind);

}  // namespace ttq
