#include <array>
#include <charconv>
#include <set>

#include "cedar/syntax.hpp"
#include "cedar/utf8.hpp"
#include "lexer.hpp"

namespace cedar {

using syntax::lex;
using syntax::Tok;
using syntax::Token;

std::string to_string(const ParseError& e) {
  return "parse error at " + std::to_string(e.span.start) + ".." + std::to_string(e.span.end) +
         ": " + e.message;
}

bool is_reserved_word(std::string_view s) {
  static constexpr std::array<std::string_view, 16> kWords = {
      "true",   "false", "if",      "then",   "else",      "in",     "like",     "has",
      "permit", "forbid", "when",   "unless", "principal", "action", "resource", "context"};
  for (auto w : kWords) {
    if (w == s) return true;
  }
  return false;
}

namespace {

// Shared escape decoder; `pattern` enables `\*` and bare `*` wildcards.
template <class Sink>
std::string decode_escapes(std::string_view body, bool pattern, Sink&& sink) {
  auto cps = decode_utf8(body);
  if (!cps) return "invalid UTF-8 in string literal";
  const std::u32string& s = *cps;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char32_t c = s[i];
    if (c == U'*' && pattern) {
      sink(PatternElem::star());
      continue;
    }
    if (c != U'\\') {
      sink(PatternElem::literal(c));
      continue;
    }
    if (++i >= s.size()) return "dangling backslash";
    switch (s[i]) {
      case U'"': sink(PatternElem::literal(U'"')); break;
      case U'\'': sink(PatternElem::literal(U'\'')); break;
      case U'\\': sink(PatternElem::literal(U'\\')); break;
      case U'n': sink(PatternElem::literal(U'\n')); break;
      case U't': sink(PatternElem::literal(U'\t')); break;
      case U'r': sink(PatternElem::literal(U'\r')); break;
      case U'0': sink(PatternElem::literal(U'\0')); break;
      case U'*':
        if (!pattern) return "\\* is only valid in like patterns";
        sink(PatternElem::literal(U'*'));
        break;
      case U'u': {
        if (i + 1 >= s.size() || s[i + 1] != U'{') return "expected '{' after \\u";
        i += 2;
        char32_t cp = 0;
        std::size_t digits = 0;
        for (; i < s.size() && s[i] != U'}'; ++i, ++digits) {
          char32_t h = s[i];
          int v;
          if (h >= U'0' && h <= U'9') {
            v = static_cast<int>(h - U'0');
          } else if (h >= U'a' && h <= U'f') {
            v = static_cast<int>(h - U'a' + 10);
          } else if (h >= U'A' && h <= U'F') {
            v = static_cast<int>(h - U'A' + 10);
          } else {
            return "invalid hex digit in \\u{...}";
          }
          if (digits >= 6) return "too many digits in \\u{...}";
          cp = cp * 16 + static_cast<char32_t>(v);
        }
        if (i >= s.size()) return "unterminated \\u{...}";
        if (digits == 0) return "empty \\u{}";
        if (!is_scalar_value(cp)) return "\\u{...} is not a Unicode scalar value";
        sink(PatternElem::literal(cp));
        break;
      }
      default: return "unknown escape sequence";
    }
  }
  return "";
}

void append_escaped(std::string& out, char32_t c) {
  switch (c) {
    case U'"': out += "\\\""; return;
    case U'\\': out += "\\\\"; return;
    case U'\n': out += "\\n"; return;
    case U'\t': out += "\\t"; return;
    case U'\r': out += "\\r"; return;
    case U'\0': out += "\\0"; return;
    default: break;
  }
  if (c < 0x20 || c == 0x7F) {
    static constexpr char kHex[] = "0123456789abcdef";
    out += "\\u{";
    if (c >= 0x10) out += kHex[(c >> 4) & 0xF];
    out += kHex[c & 0xF];
    out += '}';
    return;
  }
  append_utf8(out, c);
}

}  // namespace

std::string escape_string(std::string_view s) {
  std::string out;
  auto cps = decode_utf8(s);
  if (!cps) {
    // Not reachable for well-formed values; escape bytes one by one.
    for (unsigned char b : s) append_escaped(out, b);
    return out;
  }
  for (char32_t c : *cps) append_escaped(out, c);
  return out;
}

Expected<std::string, std::string> unescape_string(std::string_view body) {
  std::string out;
  auto err = decode_escapes(body, false, [&](PatternElem e) { append_utf8(out, e.ch); });
  if (!err.empty()) return Unexpected(std::move(err));
  return out;
}

std::string escape_pattern(const Pattern& p) {
  std::string out;
  for (const auto& e : p) {
    if (e.wildcard) {
      out += '*';
    } else if (e.ch == U'*') {
      out += "\\*";
    } else {
      append_escaped(out, e.ch);
    }
  }
  return out;
}

Expected<Pattern, std::string> unescape_pattern(std::string_view body) {
  Pattern out;
  auto err = decode_escapes(body, true, [&](PatternElem e) { out.push_back(e); });
  if (!err.empty()) return Unexpected(std::move(err));
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Expected<PolicySet, ParseError> policy_set() {
    std::vector<Policy> policies;
    while (peek().kind != Tok::Eof) {
      auto p = policy(policies.size());
      if (!p) return Unexpected(std::move(p).error());
      policies.push_back(std::move(*p));
    }
    return *PolicySet::make(std::move(policies));
  }

  Expected<Expr, ParseError> whole_expr() {
    auto e = expr();
    if (!e) return e;
    if (peek().kind != Tok::Eof) return error_here("expected end of input");
    return e;
  }

 private:
  template <class T>
  using P = Expected<T, ParseError>;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == w;
  }

  Unexpected<ParseError> error_here(std::string msg) const {
    const Token& t = peek();
    if (t.kind != Tok::Eof) msg += ", found " + std::string(t.text);
    return Unexpected(ParseError{std::move(msg), t.span});
  }

  P<Ok> expect(Tok kind) {
    if (peek().kind != kind) return error_here("expected " + std::string(syntax::tok_name(kind)));
    next();
    return Ok{};
  }
  P<Ok> expect_word(std::string_view w) {
    if (!at_word(w)) return error_here("expected '" + std::string(w) + "'");
    next();
    return Ok{};
  }

  P<std::string> string_literal() {
    if (peek().kind != Tok::String) return error_here("expected a string literal");
    const Token& t = next();
    auto s = unescape_string(t.text.substr(1, t.text.size() - 2));
    if (!s) return Unexpected(ParseError{s.error(), t.span});
    return std::move(*s);
  }

  // Type::"id", requiring at least one type segment.
  P<EntityUID> entity_uid() {
    std::vector<std::string> path;
    std::size_t start = peek().span.start;
    while (true) {
      if (peek().kind != Tok::Ident) return error_here("expected an entity type name");
      if (is_reserved_word(peek().text)) return error_here("reserved word used as an entity type");
      path.emplace_back(next().text);
      if (auto r = expect(Tok::ColonColon); !r) return Unexpected(std::move(r).error());
      if (peek().kind == Tok::String) break;
    }
    auto id = string_literal();
    if (!id) return Unexpected(ParseError{id.error().message, {start, id.error().span.end}});
    return EntityUID(std::move(path), std::move(*id));
  }

  P<Policy> policy(std::size_t index) {
    Policy p;
    p.id = "policy" + std::to_string(index);
    if (at_word("permit")) {
      p.effect = Effect::Permit;
    } else if (at_word("forbid")) {
      p.effect = Effect::Forbid;
    } else {
      return error_here("expected 'permit' or 'forbid'");
    }
    next();
    if (auto r = expect(Tok::LParen); !r) return Unexpected(std::move(r).error());
    auto principal = entity_scope("principal");
    if (!principal) return Unexpected(std::move(principal).error());
    p.principal = std::move(*principal);
    if (auto r = expect(Tok::Comma); !r) return Unexpected(std::move(r).error());
    auto action = action_scope();
    if (!action) return Unexpected(std::move(action).error());
    p.action = std::move(*action);
    if (auto r = expect(Tok::Comma); !r) return Unexpected(std::move(r).error());
    auto resource = entity_scope("resource");
    if (!resource) return Unexpected(std::move(resource).error());
    p.resource = std::move(*resource);
    if (auto r = expect(Tok::RParen); !r) return Unexpected(std::move(r).error());
    while (at_word("when") || at_word("unless")) {
      Condition c;
      c.kind = at_word("when") ? ConditionKind::When : ConditionKind::Unless;
      next();
      if (auto r = expect(Tok::LBrace); !r) return Unexpected(std::move(r).error());
      auto body = expr();
      if (!body) return Unexpected(std::move(body).error());
      c.body = std::move(*body);
      if (auto r = expect(Tok::RBrace); !r) return Unexpected(std::move(r).error());
      p.conditions.push_back(std::move(c));
    }
    if (auto r = expect(Tok::Semi); !r) return Unexpected(std::move(r).error());
    return p;
  }

  P<ScopeConstraint> entity_scope(std::string_view var) {
    if (auto r = expect_word(var); !r) return Unexpected(std::move(r).error());
    if (peek().kind == Tok::EqEq) {
      next();
      auto uid = entity_uid();
      if (!uid) return Unexpected(std::move(uid).error());
      return ScopeConstraint::eq(std::move(*uid));
    }
    if (at_word("in")) {
      next();
      auto uid = entity_uid();
      if (!uid) return Unexpected(std::move(uid).error());
      return ScopeConstraint::in(std::move(*uid));
    }
    return ScopeConstraint::any();
  }

  P<EntityUID> action_uid() {
    SourceSpan at = peek().span;
    auto uid = entity_uid();
    if (!uid) return uid;
    if (!uid->is_action()) return Unexpected(ParseError{"action scope requires an Action entity", at});
    return uid;
  }

  P<ActionScopeConstraint> action_scope() {
    if (auto r = expect_word("action"); !r) return Unexpected(std::move(r).error());
    if (peek().kind == Tok::EqEq) {
      next();
      auto uid = action_uid();
      if (!uid) return Unexpected(std::move(uid).error());
      return ActionScopeConstraint::eq(std::move(*uid));
    }
    if (!at_word("in")) return ActionScopeConstraint::any();
    next();
    std::vector<EntityUID> uids;
    if (peek().kind != Tok::LBracket) {
      auto uid = action_uid();
      if (!uid) return Unexpected(std::move(uid).error());
      uids.push_back(std::move(*uid));
      return ActionScopeConstraint::in(std::move(uids));
    }
    next();
    while (true) {
      auto uid = action_uid();
      if (!uid) return Unexpected(std::move(uid).error());
      uids.push_back(std::move(*uid));
      if (peek().kind != Tok::Comma) break;
      next();
    }
    if (auto r = expect(Tok::RBracket); !r) return Unexpected(std::move(r).error());
    return ActionScopeConstraint::in(std::move(uids));
  }

  // Depth guard shared by every recursive production.
  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) { ++p.depth_; }
    ~DepthGuard() { --p.depth_; }
  };

  P<Expr> expr() {
    DepthGuard guard(*this);
    if (depth_ > kMaxParseDepth) return error_here("expression nested too deeply");
    if (!at_word("if")) return or_expr();
    next();
    auto cond = expr();
    if (!cond) return cond;
    if (auto r = expect_word("then"); !r) return Unexpected(std::move(r).error());
    auto then_branch = expr();
    if (!then_branch) return then_branch;
    if (auto r = expect_word("else"); !r) return Unexpected(std::move(r).error());
    auto else_branch = expr();
    if (!else_branch) return else_branch;
    return Expr::if_(std::move(*cond), std::move(*then_branch), std::move(*else_branch));
  }

  P<Expr> or_expr() {
    auto lhs = and_expr();
    if (!lhs) return lhs;
    Expr acc = std::move(*lhs);
    while (peek().kind == Tok::OrOr) {
      next();
      auto rhs = and_expr();
      if (!rhs) return rhs;
      acc = Expr::or_(std::move(acc), std::move(*rhs));
    }
    return acc;
  }

  P<Expr> and_expr() {
    auto lhs = relation();
    if (!lhs) return lhs;
    Expr acc = std::move(*lhs);
    while (peek().kind == Tok::AndAnd) {
      next();
      auto rhs = relation();
      if (!rhs) return rhs;
      acc = Expr::and_(std::move(acc), std::move(*rhs));
    }
    return acc;
  }

  P<Expr> relation() {
    auto lhs = additive();
    if (!lhs) return lhs;
    std::optional<BinaryOp> op;
    switch (peek().kind) {
      case Tok::EqEq: op = BinaryOp::Eq; break;
      case Tok::NotEq: op = BinaryOp::Neq; break;
      case Tok::Lt: op = BinaryOp::Lt; break;
      case Tok::Le: op = BinaryOp::Le; break;
      case Tok::Gt: op = BinaryOp::Gt; break;
      case Tok::Ge: op = BinaryOp::Ge; break;
      default: break;
    }
    if (at_word("in")) op = BinaryOp::In;
    if (op) {
      next();
      auto rhs = additive();
      if (!rhs) return rhs;
      return Expr::binary(*op, std::move(*lhs), std::move(*rhs));
    }
    if (at_word("has")) {
      next();
      auto name = attr_name();
      if (!name) return Unexpected(std::move(name).error());
      return Expr::has(std::move(*lhs), std::move(*name));
    }
    if (at_word("like")) {
      next();
      if (peek().kind != Tok::String) return error_here("expected a pattern string after 'like'");
      const Token& t = next();
      auto pat = unescape_pattern(t.text.substr(1, t.text.size() - 2));
      if (!pat) return Unexpected(ParseError{pat.error(), t.span});
      return Expr::like(std::move(*lhs), std::move(*pat));
    }
    return lhs;
  }

  P<std::string> attr_name() {
    if (peek().kind == Tok::Ident) return std::string(next().text);
    if (peek().kind == Tok::String) {
      SourceSpan at = peek().span;
      auto s = string_literal();
      if (s && s->empty()) return Unexpected(ParseError{"attribute names must be non-empty", at});
      return s;
    }
    return error_here("expected an attribute name");
  }

  P<Expr> additive() {
    auto lhs = unary();
    if (!lhs) return lhs;
    Expr acc = std::move(*lhs);
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      BinaryOp op = next().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      auto rhs = unary();
      if (!rhs) return rhs;
      acc = Expr::binary(op, std::move(acc), std::move(*rhs));
    }
    return acc;
  }

  P<Expr> unary() {
    DepthGuard guard(*this);
    if (depth_ > kMaxParseDepth) return error_here("expression nested too deeply");
    if (peek().kind == Tok::Bang) {
      next();
      auto e = unary();
      if (!e) return e;
      return Expr::not_(std::move(*e));
    }
    if (peek().kind == Tok::Minus) {
      if (peek(1).kind == Tok::Int) {
        next();
        return integer_literal(true);
      }
      next();
      auto e = unary();
      if (!e) return e;
      return Expr::neg(std::move(*e));
    }
    return member();
  }

  P<Expr> integer_literal(bool negative) {
    const Token& t = next();
    std::uint64_t magnitude = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), magnitude);
    constexpr std::uint64_t kMax = static_cast<std::uint64_t>(INT64_MAX);
    if (ec != std::errc() || magnitude > kMax + (negative ? 1 : 0)) {
      return Unexpected(ParseError{"integer literal out of range", t.span});
    }
    if (negative) {
      return Expr::integer(magnitude == kMax + 1 ? INT64_MIN : -static_cast<std::int64_t>(magnitude));
    }
    return Expr::integer(static_cast<std::int64_t>(magnitude));
  }

  P<Expr> member() {
    auto recv = primary();
    if (!recv) return recv;
    Expr acc = std::move(*recv);
    while (true) {
      if (peek().kind == Tok::Dot) {
        next();
        if (peek().kind != Tok::Ident) return error_here("expected an attribute or method name");
        std::string name(next().text);
        if (peek().kind == Tok::LParen) {
          if (name != "contains") return error_here("unknown method '" + name + "'");
          next();
          auto arg = expr();
          if (!arg) return arg;
          if (auto r = expect(Tok::RParen); !r) return Unexpected(std::move(r).error());
          acc = Expr::binary(BinaryOp::Contains, std::move(acc), std::move(*arg));
        } else {
          acc = Expr::get(std::move(acc), std::move(name));
        }
      } else if (peek().kind == Tok::LBracket) {
        next();
        SourceSpan at = peek().span;
        auto name = string_literal();
        if (!name) return Unexpected(std::move(name).error());
        if (name->empty()) return Unexpected(ParseError{"attribute names must be non-empty", at});
        if (auto r = expect(Tok::RBracket); !r) return Unexpected(std::move(r).error());
        acc = Expr::get(std::move(acc), std::move(*name));
      } else {
        return acc;
      }
    }
  }

  P<Expr> primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: return integer_literal(false);
      case Tok::String: {
        auto s = string_literal();
        if (!s) return Unexpected(std::move(s).error());
        return Expr::string(std::move(*s));
      }
      case Tok::LParen: {
        next();
        auto e = expr();
        if (!e) return e;
        if (auto r = expect(Tok::RParen); !r) return Unexpected(std::move(r).error());
        return e;
      }
      case Tok::LBracket: {
        next();
        std::vector<Expr> elems;
        if (peek().kind != Tok::RBracket) {
          while (true) {
            auto e = expr();
            if (!e) return e;
            elems.push_back(std::move(*e));
            if (peek().kind != Tok::Comma) break;
            next();
          }
        }
        if (auto r = expect(Tok::RBracket); !r) return Unexpected(std::move(r).error());
        return Expr::set(std::move(elems));
      }
      case Tok::LBrace: {
        next();
        std::vector<std::pair<std::string, Expr>> fields;
        std::set<std::string> seen;
        if (peek().kind != Tok::RBrace) {
          while (true) {
            SourceSpan key_span = peek().span;
            auto key = attr_name();
            if (!key) return Unexpected(std::move(key).error());
            if (!seen.insert(*key).second) {
              return Unexpected(ParseError{"duplicate record key " + *key, key_span});
            }
            if (auto r = expect(Tok::Colon); !r) return Unexpected(std::move(r).error());
            auto e = expr();
            if (!e) return e;
            fields.emplace_back(std::move(*key), std::move(*e));
            if (peek().kind != Tok::Comma) break;
            next();
          }
        }
        if (auto r = expect(Tok::RBrace); !r) return Unexpected(std::move(r).error());
        return Expr::record(std::move(fields));
      }
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false") {
          bool b = t.text == "true";
          next();
          return Expr::boolean(b);
        }
        if (t.text == "principal" || t.text == "action" || t.text == "resource" ||
            t.text == "context") {
          Var v = t.text == "principal" ? Var::Principal
                  : t.text == "action"  ? Var::Action
                  : t.text == "resource" ? Var::Resource
                                          : Var::Context;
          next();
          return Expr::var(v);
        }
        if (peek(1).kind == Tok::ColonColon) {
          auto uid = entity_uid();
          if (!uid) return Unexpected(std::move(uid).error());
          return Expr::entity(std::move(*uid));
        }
        return error_here("unexpected identifier");
      }
      default: return error_here("expected an expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

}  // namespace

Expected<PolicySet, ParseError> parse_policy_set(std::string_view text) {
  auto toks = lex(text);
  if (!toks) return Unexpected(std::move(toks).error());
  return Parser(std::move(*toks)).policy_set();
}

Expected<Expr, ParseError> parse_expr(std::string_view text) {
  auto toks = lex(text);
  if (!toks) return Unexpected(std::move(toks).error());
  return Parser(std::move(*toks)).whole_expr();
}

Expected<std::vector<std::string>, ParseError> collect_comments(std::string_view text) {
  auto toks = lex(text);
  if (!toks) return Unexpected(std::move(toks).error());
  std::vector<std::string> out;
  for (const auto& t : *toks) {
    for (auto c : t.comments) out.emplace_back(c);
  }
  return out;
}

}  // namespace cedar
