#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sessium/parse_error.hpp"

namespace sessium::detail {

enum class Tok {
  Ident,
  Integer,
  Decimal,
  String,  // "..."
  Atom,    // '...'
  Dot,
  Bar,
  Plus,
  OPlus,  // (+)
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Bang,
  Query,
  Star,
  Colon,
  Comma,
  Semi,
  Arrow,
  Equals,
  Less,
  Greater,
  Minus,
  Slash,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view text);
const char* describe(Tok kind);

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  bool at(Tok kind, std::size_t ahead = 0) const { return peek(ahead).kind == kind; }
  bool at_ident(std::string_view word) const { return at(Tok::Ident) && peek().text == word; }
  Token next();
  bool accept(Tok kind);
  Token expect(Tok kind, const char* what);
  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail_at(const Token& tok, const std::string& msg) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace sessium::detail
