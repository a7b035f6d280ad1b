#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "cedar/ast.hpp"
#include "cedar/expected.hpp"

namespace cedar {

// Byte offsets [start, end) into the parsed input.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const SourceSpan&) const = default;
};

struct ParseError {
  std::string message;
  SourceSpan span;
};

std::string to_string(const ParseError& e);

// Nesting bound for expressions; deeper input is a ParseError.
inline constexpr std::size_t kMaxParseDepth = 128;

// Policies get ids policy0, policy1, ... in textual order.
Expected<PolicySet, ParseError> parse_policy_set(std::string_view text);

Expected<Expr, ParseError> parse_expr(std::string_view text);

// Canonical text; reparses to an equal PolicySet (ids are positional).
std::string pretty_print(const PolicySet& ps);
std::string pretty_print(const Policy& p);
std::string pretty_print(const Expr& e);

// Reflows whitespace to `width` columns, keeping every token and comment.
// Each comment stays attached to the token that follows it.
Expected<std::string, ParseError> format_text(std::string_view text, std::size_t width);

// Every `// ...` comment in the input, in order, excluding the newline.
Expected<std::vector<std::string>, ParseError> collect_comments(std::string_view text);

// String literal body escaping (without the surrounding quotes).
std::string escape_string(std::string_view s);
Expected<std::string, std::string> unescape_string(std::string_view body);

// `like` pattern literal bodies: `*` is a wildcard, `\*` a literal asterisk.
std::string escape_pattern(const Pattern& p);
Expected<Pattern, std::string> unescape_pattern(std::string_view body);

bool is_reserved_word(std::string_view s);

}  // namespace cedar
