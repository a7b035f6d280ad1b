#include <memory>
#include <variant>

#include "cedar/syntax.hpp"
#include "lexer.hpp"

namespace cedar {

using syntax::Tok;
using syntax::Token;

namespace {

struct DocNode;
using Doc = std::shared_ptr<const DocNode>;

struct Text {
  std::string_view s;
};
struct Comment {
  std::string_view s;
};
struct Line {};      // space when flat
struct SoftLine {};  // nothing when flat
struct HardLine {};
struct Nest {
  int indent;
  Doc body;
};
struct Group {
  Doc body;
};
struct Concat {
  std::vector<Doc> parts;
};

struct DocNode {
  std::variant<Text, Comment, Line, SoftLine, HardLine, Nest, Group, Concat> v;
};

template <class T>
Doc mk(T t) {
  return std::make_shared<const DocNode>(DocNode{std::move(t)});
}
Doc text(std::string_view s) { return mk(Text{s}); }
Doc line() { return mk(Line{}); }
Doc softline() { return mk(SoftLine{}); }
Doc hardline() { return mk(HardLine{}); }
Doc nest(Doc d) { return mk(Nest{2, std::move(d)}); }
Doc group(Doc d) { return mk(Group{std::move(d)}); }
Doc cat(std::vector<Doc> parts) { return mk(Concat{std::move(parts)}); }

enum class Mode { Flat, Break };

struct Item {
  int indent;
  Mode mode;
  const DocNode* doc;
};

class Renderer {
 public:
  explicit Renderer(std::size_t width) : width_(static_cast<long>(width)) {}

  std::string run(const Doc& root) {
    std::vector<Item> stack{{0, Mode::Break, root.get()}};
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      std::visit(
          Overloaded{
              [&](const Text& t) { put(t.s, it.indent); },
              [&](const Comment& c) {
                if (!at_line_start_) put(" ", it.indent);
                put(c.s, it.indent);
              },
              [&](const Line&) {
                if (it.mode == Mode::Flat) {
                  put(" ", it.indent);
                } else {
                  newline(it.indent);
                }
              },
              [&](const SoftLine&) {
                if (it.mode == Mode::Break) newline(it.indent);
              },
              [&](const HardLine&) { newline(it.indent); },
              [&](const Nest& n) { stack.push_back({it.indent + n.indent, it.mode, n.body.get()}); },
              [&](const Group& g) {
                Mode m = Mode::Break;
                if (it.mode == Mode::Flat || fits(g.body.get(), it.indent, stack)) m = Mode::Flat;
                stack.push_back({it.indent, m, g.body.get()});
              },
              [&](const Concat& c) {
                for (auto p = c.parts.rbegin(); p != c.parts.rend(); ++p) {
                  stack.push_back({it.indent, it.mode, p->get()});
                }
              },
          },
          it.doc->v);
    }
    if (!out_.empty() && out_.back() != '\n') out_ += '\n';
    return std::move(out_);
  }

 private:
  void put(std::string_view s, int indent) {
    if (at_line_start_) {
      out_.append(static_cast<std::size_t>(indent), ' ');
      col_ = indent;
      at_line_start_ = false;
    }
    out_ += s;
    col_ += static_cast<long>(s.size());
  }

  void newline(int indent) {
    out_ += '\n';
    col_ = indent;
    at_line_start_ = true;
  }

  // Checks whether `body` laid out flat, followed by the rest of the line,
  // stays within the width.
  bool fits(const DocNode* body, int indent, const std::vector<Item>& rest) const {
    long remaining = width_ - (at_line_start_ ? indent : col_);
    std::vector<Item> work{{indent, Mode::Flat, body}};
    std::size_t rest_idx = rest.size();
    while (remaining >= 0) {
      if (work.empty()) {
        if (rest_idx == 0) return true;
        work.push_back(rest[--rest_idx]);
      }
      Item it = work.back();
      work.pop_back();
      bool done = false;
      bool ok = true;
      std::visit(Overloaded{
                     [&](const Text& t) { remaining -= static_cast<long>(t.s.size()); },
                     [&](const Comment&) { done = true, ok = false; },
                     [&](const Line&) {
                       if (it.mode == Mode::Flat) {
                         remaining -= 1;
                       } else {
                         done = true;
                       }
                     },
                     [&](const SoftLine&) {
                       if (it.mode == Mode::Break) done = true;
                     },
                     [&](const HardLine&) {
                       done = true;
                       ok = it.mode == Mode::Break;
                     },
                     [&](const Nest& n) { work.push_back({it.indent + n.indent, it.mode, n.body.get()}); },
                     [&](const Group& g) { work.push_back({it.indent, it.mode, g.body.get()}); },
                     [&](const Concat& c) {
                       for (auto p = c.parts.rbegin(); p != c.parts.rend(); ++p) {
                         work.push_back({it.indent, it.mode, p->get()});
                       }
                     },
                 },
                 it.doc->v);
      if (done) return ok && remaining >= 0;
    }
    return false;
  }

  long width_;
  std::string out_;
  long col_ = 0;
  bool at_line_start_ = true;
};

// Grammar-directed walk over a token stream already known to parse.
class Builder {
 public:
  explicit Builder(const std::vector<Token>& toks) : toks_(toks) {}

  Doc policy_set() {
    std::vector<Doc> parts;
    while (peek().kind != Tok::Eof) {
      if (!parts.empty()) {
        parts.push_back(hardline());
        parts.push_back(hardline());
      }
      parts.push_back(policy());
    }
    const Token& eof = peek();
    for (auto c : eof.comments) {
      if (!parts.empty()) parts.push_back(hardline());
      parts.push_back(mk(Comment{c}));
    }
    return cat(std::move(parts));
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_word(std::string_view w) const {
    return peek().kind == Tok::Ident && peek().text == w;
  }

  // Comments attached to the next token, each on its own line.
  Doc leading_comments() {
    std::vector<Doc> parts;
    for (auto c : peek().comments) {
      parts.push_back(mk(Comment{c}));
      parts.push_back(hardline());
    }
    return cat(std::move(parts));
  }

  // The next token with its leading comments.
  Doc tok() {
    const Token& t = toks_[pos_];
    Doc comments = leading_comments();
    if (pos_ + 1 < toks_.size()) ++pos_;
    if (t.comments.empty()) return text(t.text);
    return cat({comments, text(t.text)});
  }

  Doc bare_tok() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return text(t.text);
  }

  Doc uid() {
    std::vector<Doc> parts;
    while (peek().kind != Tok::String) parts.push_back(tok());
    parts.push_back(tok());
    return cat(std::move(parts));
  }

  Doc policy() {
    Doc comments = leading_comments();
    std::vector<Doc> head{bare_tok(), tok()};  // effect, '('
    std::vector<Doc> scope{softline()};
    for (int i = 0; i < 3; ++i) {
      scope.push_back(scope_elem());
      if (i < 2) {
        scope.push_back(tok());  // ','
        scope.push_back(line());
      }
    }
    head.push_back(nest(cat(std::move(scope))));
    head.push_back(softline());
    head.push_back(tok());  // ')'
    std::vector<Doc> parts{comments, group(cat(std::move(head)))};
    while (at_word("when") || at_word("unless")) {
      Doc kw = tok();
      Doc open = tok();
      Doc body = expr();
      Doc close = tok();
      parts.push_back(hardline());
      parts.push_back(group(cat({kw, text(" "), open, nest(cat({line(), body})), line(), close})));
    }
    parts.push_back(tok());  // ';'
    return cat(std::move(parts));
  }

  Doc scope_elem() {
    std::vector<Doc> parts{tok()};
    if (peek().kind == Tok::EqEq || at_word("in")) {
      parts.push_back(text(" "));
      parts.push_back(tok());
      parts.push_back(text(" "));
      if (peek().kind == Tok::LBracket) {
        parts.push_back(list(Tok::RBracket, [this] { return uid(); }));
      } else {
        parts.push_back(uid());
      }
    }
    return cat(std::move(parts));
  }

  // Bracketed, comma-separated sequence; the opening token is next.
  template <class F>
  Doc list(Tok close, F&& elem) {
    Doc open = tok();
    if (peek().kind == close) return cat({open, tok()});
    std::vector<Doc> inner{softline()};
    while (true) {
      inner.push_back(elem());
      if (peek().kind != Tok::Comma) break;
      inner.push_back(tok());
      inner.push_back(line());
    }
    return group(cat({open, nest(cat(std::move(inner))), softline(), tok()}));
  }

  Doc expr() {
    if (!at_word("if")) return chain(Tok::OrOr, [this] { return chain(Tok::AndAnd, [this] { return relation(); }); });
    Doc kw_if = tok();
    Doc cond = expr();
    Doc kw_then = tok();
    Doc then_branch = expr();
    Doc kw_else = tok();
    Doc else_branch = expr();
    return group(cat({kw_if, text(" "), cond,
                      nest(cat({line(), kw_then, text(" "), then_branch, line(), kw_else,
                                text(" "), else_branch}))}));
  }

  template <class F>
  Doc chain(Tok op, F&& operand) {
    Doc first = operand();
    if (peek().kind != op) return first;
    std::vector<Doc> rest;
    while (peek().kind == op) {
      rest.push_back(line());
      rest.push_back(tok());
      rest.push_back(text(" "));
      rest.push_back(operand());
    }
    return group(cat({first, nest(cat(std::move(rest)))}));
  }

  Doc relation() {
    Doc lhs = additive();
    switch (peek().kind) {
      case Tok::EqEq:
      case Tok::NotEq:
      case Tok::Lt:
      case Tok::Le:
      case Tok::Gt:
      case Tok::Ge: break;
      default:
        if (at_word("in")) break;
        if (at_word("has") || at_word("like")) {
          Doc kw = tok();
          return group(cat({lhs, nest(cat({line(), kw, text(" "), tok()}))}));
        }
        return lhs;
    }
    Doc op = tok();
    Doc rhs = additive();
    return group(cat({lhs, nest(cat({line(), op, text(" "), rhs}))}));
  }

  Doc additive() {
    Doc first = unary();
    if (peek().kind != Tok::Plus && peek().kind != Tok::Minus) return first;
    std::vector<Doc> rest;
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      rest.push_back(line());
      rest.push_back(tok());
      rest.push_back(text(" "));
      rest.push_back(unary());
    }
    return group(cat({first, nest(cat(std::move(rest)))}));
  }

  Doc unary() {
    if (peek().kind == Tok::Bang || peek().kind == Tok::Minus) {
      Doc op = tok();
      return cat({op, unary()});
    }
    return member();
  }

  Doc member() {
    std::vector<Doc> parts{primary()};
    while (true) {
      if (peek().kind == Tok::Dot) {
        parts.push_back(tok());
        bool call = peek(1).kind == Tok::LParen;
        parts.push_back(tok());
        if (call) {
          Doc open = tok();
          Doc arg = expr();
          Doc close = tok();
          parts.push_back(group(cat({open, nest(cat({softline(), arg})), softline(), close})));
        }
      } else if (peek().kind == Tok::LBracket) {
        parts.push_back(tok());
        parts.push_back(tok());
        parts.push_back(tok());
      } else {
        return cat(std::move(parts));
      }
    }
  }

  Doc primary() {
    switch (peek().kind) {
      case Tok::LParen: {
        Doc open = tok();
        Doc inner = expr();
        Doc close = tok();
        return group(cat({open, nest(cat({softline(), inner})), softline(), close}));
      }
      case Tok::LBracket: return list(Tok::RBracket, [this] { return expr(); });
      case Tok::LBrace:
        return list(Tok::RBrace, [this] {
          Doc key = tok();
          Doc colon = tok();
          return cat({key, colon, text(" "), expr()});
        });
      case Tok::Ident:
        if (peek(1).kind == Tok::ColonColon) return uid();
        return tok();
      default: return tok();
    }
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Expected<std::string, ParseError> format_text(std::string_view text, std::size_t width) {
  if (auto ps = parse_policy_set(text); !ps) return Unexpected(std::move(ps).error());
  auto toks = syntax::lex(text);
  if (!toks) return Unexpected(std::move(toks).error());
  Doc doc = Builder(*toks).policy_set();
  return Renderer(width).run(doc);
}

}  // namespace cedar
