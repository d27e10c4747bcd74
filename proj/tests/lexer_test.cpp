#include <vector>

#include "doctest.h"
#include "ttq/errors.hpp"
#include "ttq/lexer.hpp"

using namespace ttq;

namespace {

std::vector<Tok> kinds(const std::string& text) {
  std::vector<Tok> out;
  for (const Token& t : tokenize(text)) out.push_back(t.kind);
  return out;
}

}  // namespace

TEST_CASE("a full query tokenizes into the expected kinds") {
  CHECK(kinds("C.t='NN' -> C.l := raw:-") ==
        std::vector<Tok>{Tok::Ident, Tok::Dot, Tok::Ident, Tok::Eq, Tok::Literal,
                         Tok::Arrow, Tok::Ident, Tok::Dot, Tok::Ident, Tok::DstSep,
                         Tok::Ident, Tok::Colon, Tok::Dash, Tok::End});
}

TEST_CASE("comparison operators and separators are disambiguated") {
  CHECK(kinds("=") == std::vector<Tok>{Tok::Eq, Tok::End});
  CHECK(kinds("=:") == std::vector<Tok>{Tok::SrcSep, Tok::End});
  CHECK(kinds(":=") == std::vector<Tok>{Tok::DstSep, Tok::End});
  CHECK(kinds(":") == std::vector<Tok>{Tok::Colon, Tok::End});
  CHECK(kinds("!=") == std::vector<Tok>{Tok::Ne, Tok::End});
  CHECK(kinds("!~") == std::vector<Tok>{Tok::NotLike, Tok::End});
  CHECK(kinds("~") == std::vector<Tok>{Tok::Like, Tok::End});
  CHECK(kinds("->") == std::vector<Tok>{Tok::Arrow, Tok::End});
  CHECK(kinds("-") == std::vector<Tok>{Tok::Dash, Tok::End});
  CHECK(kinds("2-4") == std::vector<Tok>{Tok::Int, Tok::Dash, Tok::Int, Tok::End});
  CHECK(kinds("!(") == std::vector<Tok>{Tok::Bang, Tok::LParen, Tok::End});
}

TEST_CASE("wildcard index characters are their own tokens") {
  CHECK(kinds("[*][@][?][.][0]") ==
        std::vector<Tok>{Tok::LBracket, Tok::Star, Tok::RBracket, Tok::LBracket,
                         Tok::At, Tok::RBracket, Tok::LBracket, Tok::Question,
                         Tok::RBracket, Tok::LBracket, Tok::Dot, Tok::RBracket,
                         Tok::LBracket, Tok::Int, Tok::RBracket, Tok::End});
}

TEST_CASE("integers carry their value") {
  auto toks = tokenize("P[23]");
  REQUIRE(toks.size() == 5);
  CHECK(toks[2].kind == Tok::Int);
  CHECK(toks[2].value == 23);
  CHECK(toks[2].text == "23");
}

TEST_CASE("literals carry resolved escapes") {
  auto toks = tokenize(R"('it\'s' 'a\\b' '')");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0].kind == Tok::Literal);
  CHECK(toks[0].text == "it's");
  CHECK(toks[1].text == "a\\b");
  CHECK(toks[2].text.empty());
}

TEST_CASE("columns are one-based and offset-aware") {
  auto toks = tokenize("C.t='NN'");
  CHECK(toks[0].column == 1);  // C
  CHECK(toks[1].column == 2);  // .
  CHECK(toks[2].column == 3);  // t
  CHECK(toks[3].column == 4);  // =
  CHECK(toks[4].column == 5);  // 'NN'

  auto shifted = tokenize("C", 10);
  CHECK(shifted[0].column == 11);
}

TEST_CASE("backslash-newline continues the query") {
  auto toks = tokenize("C.t='NN' \\\n -> C.l");
  std::vector<Tok> k;
  for (const Token& t : toks) k.push_back(t.kind);
  CHECK(k == std::vector<Tok>{Tok::Ident, Tok::Dot, Tok::Ident, Tok::Eq,
                              Tok::Literal, Tok::Arrow, Tok::Ident, Tok::Dot,
                              Tok::Ident, Tok::End});
}

TEST_CASE("an unterminated literal reports the opening quote") {
  try {
    tokenize("C.t='NN");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
}

TEST_CASE("an illegal character is rejected with its position") {
  CHECK_THROWS_AS(tokenize("C.t=`NN`"), ParseError);
}

TEST_CASE("token names exist for diagnostics") {
  CHECK(std::string(token_name(Tok::Arrow)) == "'->'");
  CHECK(std::string(token_name(Tok::End)) == "end of query");
}
