#include "lexer.hpp"

#include "cedar/utf8.hpp"

namespace cedar::syntax {

namespace {

bool ident_head(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::string_view tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::String: return "string";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::ColonColon: return "'::'";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
    case Tok::Minus: return "'-'";
    case Tok::Plus: return "'+'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

Expected<std::vector<Token>, ParseError> lex(std::string_view text) {
  if (auto bad = first_invalid_utf8(text); bad != std::string_view::npos) {
    return Unexpected(ParseError{"invalid UTF-8", {bad, bad + 1}});
  }
  std::vector<Token> out;
  std::vector<std::string_view> pending;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto emit = [&](Tok kind, std::size_t start, std::size_t end) {
    out.push_back(Token{kind, text.substr(start, end - start), {start, end}, std::move(pending)});
    pending.clear();
  };
  while (i < n) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      std::size_t end = text.find('\n', i);
      if (end == std::string_view::npos) end = n;
      pending.push_back(text.substr(start, end - start));
      i = end;
      continue;
    }
    if (ident_head(c)) {
      while (i < n && (ident_head(text[i]) || digit(text[i]))) ++i;
      emit(Tok::Ident, start, i);
      continue;
    }
    if (digit(c)) {
      while (i < n && digit(text[i])) ++i;
      emit(Tok::Int, start, i);
      continue;
    }
    if (c == '"') {
      ++i;
      while (i < n && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < n) ++i;
        ++i;
      }
      if (i >= n) return Unexpected(ParseError{"unterminated string literal", {start, n}});
      ++i;
      emit(Tok::String, start, i);
      continue;
    }
    auto two = [&](char next) { return i + 1 < n && text[i + 1] == next; };
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case '[': kind = Tok::LBracket; break;
      case ']': kind = Tok::RBracket; break;
      case ',': kind = Tok::Comma; break;
      case ';': kind = Tok::Semi; break;
      case '.': kind = Tok::Dot; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case ':':
        kind = two(':') ? Tok::ColonColon : Tok::Colon;
        len = two(':') ? 2 : 1;
        break;
      case '=':
        if (!two('=')) return Unexpected(ParseError{"unexpected '='; did you mean '=='?", {i, i + 1}});
        kind = Tok::EqEq;
        len = 2;
        break;
      case '!':
        kind = two('=') ? Tok::NotEq : Tok::Bang;
        len = two('=') ? 2 : 1;
        break;
      case '<':
        kind = two('=') ? Tok::Le : Tok::Lt;
        len = two('=') ? 2 : 1;
        break;
      case '>':
        kind = two('=') ? Tok::Ge : Tok::Gt;
        len = two('=') ? 2 : 1;
        break;
      case '&':
        if (!two('&')) return Unexpected(ParseError{"unexpected '&'", {i, i + 1}});
        kind = Tok::AndAnd;
        len = 2;
        break;
      case '|':
        if (!two('|')) return Unexpected(ParseError{"unexpected '|'", {i, i + 1}});
        kind = Tok::OrOr;
        len = 2;
        break;
      default: {
        std::size_t end = i + 1;
        while (end < n && (static_cast<unsigned char>(text[end]) & 0xC0) == 0x80) ++end;
        return Unexpected(ParseError{"unexpected character", {i, end}});
      }
    }
    i += len;
    emit(kind, start, i);
  }
  emit(Tok::Eof, n, n);
  return out;
}

}  // namespace cedar::syntax
