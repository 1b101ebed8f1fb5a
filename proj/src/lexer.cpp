#include "lexer.hpp"

#include <cctype>

namespace sessium::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

const char* describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Integer: return "integer";
    case Tok::Decimal: return "decimal";
    case Tok::String: return "string literal";
    case Tok::Atom: return "quoted literal";
    case Tok::Dot: return "'.'";
    case Tok::Bar: return "'|'";
    case Tok::Plus: return "'+'";
    case Tok::OPlus: return "'(+)'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Bang: return "'!'";
    case Tok::Query: return "'?'";
    case Tok::Star: return "'*'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Arrow: return "'->'";
    case Tok::Equals: return "'='";
    case Tok::Less: return "'<'";
    case Tok::Greater: return "'>'";
    case Tok::Minus: return "'-'";
    case Tok::Slash: return "'/'";
    case Tok::End: return "end of input";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  auto push = [&](Tok kind, std::size_t len, int l, int c) {
    out.push_back(Token{kind, std::string(text.substr(i, len)), l, c});
    advance(len);
  };

  while (i < text.size()) {
    char ch = text[i];
    int l = line;
    int c = col;
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (ident_start(ch)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      push(Tok::Ident, j - i, l, c);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      Tok kind = Tok::Integer;
      if (j + 1 < text.size() && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        kind = Tok::Decimal;
      }
      push(kind, j - i, l, c);
      continue;
    }
    if (ch == '"' || ch == '\'') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != ch && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != ch) throw ParseError("unterminated literal", l, c);
      Token tok{ch == '"' ? Tok::String : Tok::Atom, std::string(text.substr(i + 1, j - i - 1)), l, c};
      advance(j - i + 1);
      out.push_back(std::move(tok));
      continue;
    }
    if (text.substr(i, 3) == "(+)") {
      push(Tok::OPlus, 3, l, c);
      continue;
    }
    if (text.substr(i, 3) == "\xE2\x8A\x95") {  // U+2295
      push(Tok::OPlus, 3, l, c);
      continue;
    }
    if (text.substr(i, 2) == "->") {
      push(Tok::Arrow, 2, l, c);
      continue;
    }
    Tok kind;
    switch (ch) {
      case '.': kind = Tok::Dot; break;
      case '|': kind = Tok::Bar; break;
      case '+': kind = Tok::Plus; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '[': kind = Tok::LBracket; break;
      case ']': kind = Tok::RBracket; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case '!': kind = Tok::Bang; break;
      case '?': kind = Tok::Query; break;
      case '*': kind = Tok::Star; break;
      case ':': kind = Tok::Colon; break;
      case ',': kind = Tok::Comma; break;
      case ';': kind = Tok::Semi; break;
      case '=': kind = Tok::Equals; break;
      case '<': kind = Tok::Less; break;
      case '>': kind = Tok::Greater; break;
      case '-': kind = Tok::Minus; break;
      case '/': kind = Tok::Slash; break;
      default:
        throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
    }
    push(kind, 1, l, c);
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t k = pos_ + ahead;
  return k < tokens_.size() ? tokens_[k] : tokens_.back();
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenStream::accept(Tok kind) {
  if (!at(kind)) return false;
  next();
  return true;
}

Token TokenStream::expect(Tok kind, const char* what) {
  if (!at(kind)) {
    fail(std::string("expected ") + what + ", found " +
         (peek().kind == Tok::End ? std::string("end of input") : "'" + peek().text + "'"));
  }
  return next();
}

void TokenStream::fail(const std::string& msg) const { fail_at(peek(), msg); }

void TokenStream::fail_at(const Token& tok, const std::string& msg) const {
  throw ParseError(msg, tok.line, tok.column);
}

}  // namespace sessium::detail
