#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cedar/expected.hpp"
#include "cedar/syntax.hpp"

namespace cedar::syntax {

enum class Tok {
  Ident,
  Int,
  String,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Dot,
  Colon,
  ColonColon,
  EqEq,
  NotEq,
  Lt,
  Le,
  Gt,
  Ge,
  AndAnd,
  OrOr,
  Bang,
  Minus,
  Plus,
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string_view text;  // raw source text, quotes included for strings
  SourceSpan span;
  std::vector<std::string_view> comments;  // comments preceding this token
};

// Tokenizes the whole input; the last token is Eof and carries trailing
// comments.
Expected<std::vector<Token>, ParseError> lex(std::string_view text);

std::string_view tok_name(Tok t);

}  // namespace cedar::syntax
