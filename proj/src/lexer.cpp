#include "ttq/lexer.hpp"

#include <cctype>

#include "ttq/errors.hpp"

namespace ttq {

const char* token_name(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Literal: return "literal";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Dot: return "'.'";
    case Tok::Plus: return "'+'";
    case Tok::Slash: return "'/'";
    case Tok::Colon: return "':'";
    case Tok::Bang: return "'!'";
    case Tok::Eq: return "'='";
    case Tok::Ne: return "'!='";
    case Tok::Like: return "'~'";
    case Tok::NotLike: return "'!~'";
    case Tok::Arrow: return "'->'";
    case Tok::SrcSep: return "'=:'";
    case Tok::DstSep: return "':='";
    case Tok::Star: return "'*'";
    case Tok::At: return "'@'";
    case Tok::Question: return "'?'";
    case Tok::Dash: return "'-'";
    case Tok::End: return "end of query";
  }
  return "?";
}

std::vector<Token> tokenize(const std::string& text,
                            std::size_t column_offset) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto col = [&](std::size_t at) { return column_offset + at + 1; };
  auto push = [&](Tok kind, std::size_t at, std::string txt = "") {
    out.push_back({kind, std::move(txt), 0, col(at)});
  };

  while (i < n) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < n &&
        (text[i + 1] == '\n' ||
         (text[i + 1] == '\r' && i + 2 < n && text[i + 2] == '\n'))) {
      i += text[i + 1] == '\r' ? 3 : 2;  // line continuation
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                       text[i] == '_'))
        ++i;
      push(Tok::Ident, start, text.substr(start, i - start));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      Token t{Tok::Int, text.substr(start, i - start), 0, col(start)};
      t.value = std::stol(t.text);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '\'') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < n) {
        if (text[i] == '\\' && i + 1 < n) {
          value += text[i + 1];
          i += 2;
          continue;
        }
        if (text[i] == '\'') {
          closed = true;
          ++i;
          break;
        }
        value += text[i++];
      }
      if (!closed)
        throw ParseError("unterminated literal", col(start));
      push(Tok::Literal, start, std::move(value));
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, start); ++i; continue;
      case ')': push(Tok::RParen, start); ++i; continue;
      case '[': push(Tok::LBracket, start); ++i; continue;
      case ']': push(Tok::RBracket, start); ++i; continue;
      case '.': push(Tok::Dot, start); ++i; continue;
      case '+': push(Tok::Plus, start); ++i; continue;
      case '/': push(Tok::Slash, start); ++i; continue;
      case '*': push(Tok::Star, start); ++i; continue;
      case '@': push(Tok::At, start); ++i; continue;
      case '?': push(Tok::Question, start); ++i; continue;
      case '~': push(Tok::Like, start); ++i; continue;
      case '!':
        if (i + 1 < n && text[i + 1] == '=') {
          push(Tok::Ne, start);
          i += 2;
        } else if (i + 1 < n && text[i + 1] == '~') {
          push(Tok::NotLike, start);
          i += 2;
        } else {
          push(Tok::Bang, start);
          ++i;
        }
        continue;
      case '=':
        if (i + 1 < n && text[i + 1] == ':') {
          push(Tok::SrcSep, start);
          i += 2;
        } else {
          push(Tok::Eq, start);
          ++i;
        }
        continue;
      case ':':
        if (i + 1 < n && text[i + 1] == '=') {
          push(Tok::DstSep, start);
          i += 2;
        } else {
          push(Tok::Colon, start);
          ++i;
        }
        continue;
      case '-':
        if (i + 1 < n && text[i + 1] == '>') {
          push(Tok::Arrow, start);
          i += 2;
        } else {
          push(Tok::Dash, start);
          ++i;
        }
        continue;
      default:
        throw ParseError(std::string("illegal character '") + c + "'",
                         col(start));
    }
  }
  push(Tok::End, n);
  return out;
}

}  // namespace ttq
