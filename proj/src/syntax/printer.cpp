#include <sstream>

#include "cedar/syntax.hpp"

namespace cedar {

namespace {

// Binding strength; a child printed below its required level gets parens.
enum Level : int { kIf = 0, kOr = 1, kAnd = 2, kRel = 3, kAdd = 4, kUnary = 5, kMember = 6, kPrimary = 7 };

bool printable_ident(const std::string& s) { return is_identifier(s) && !is_reserved_word(s); }

std::string quoted(std::string_view s) { return "\"" + escape_string(s) + "\""; }

std::string uid_text(const EntityUID& uid) {
  std::string out;
  for (const auto& seg : uid.type_path()) {
    out += seg;
    out += "::";
  }
  out += quoted(uid.id());
  return out;
}

int level_of(const Expr& e) {
  return std::visit(
      Overloaded{
          [](const ast::Lit& n) {
            return n.value.is_long() && n.value.as_long() < 0 ? int{kUnary} : int{kPrimary};
          },
          [](const ast::EntityLit&) { return int{kPrimary}; },
          [](const ast::VarRef&) { return int{kPrimary}; },
          [](const ast::Not&) { return int{kUnary}; },
          [](const ast::Neg&) { return int{kUnary}; },
          [](const ast::And&) { return int{kAnd}; },
          [](const ast::Or&) { return int{kOr}; },
          [](const ast::If&) { return int{kIf}; },
          [](const ast::Binary& n) {
            switch (n.op) {
              case BinaryOp::Add:
              case BinaryOp::Sub: return int{kAdd};
              case BinaryOp::Contains: return int{kMember};
              default: return int{kRel};
            }
          },
          [](const ast::Like&) { return int{kRel}; },
          [](const ast::HasAttr&) { return int{kRel}; },
          [](const ast::GetAttr&) { return int{kMember}; },
          [](const ast::SetLit&) { return int{kPrimary}; },
          [](const ast::RecordLit&) { return int{kPrimary}; },
      },
      e.node().v);
}

// Does the unparenthesized text of `e` begin with a digit?
bool starts_with_digit(const Expr& e) {
  return std::visit(Overloaded{
                        [](const ast::Lit& n) { return n.value.is_long() && n.value.as_long() >= 0; },
                        [](const ast::GetAttr& n) {
                          return level_of(n.operand) >= kMember && starts_with_digit(n.operand);
                        },
                        [](const ast::Binary& n) {
                          return n.op == BinaryOp::Contains && level_of(n.lhs) >= kMember &&
                                 starts_with_digit(n.lhs);
                        },
                        [](const auto&) { return false; },
                    },
                    e.node().v);
}

class Printer {
 public:
  std::string out;

  void expr(const Expr& e, int min_level) {
    bool parens = level_of(e) < min_level;
    if (parens) out += '(';
    node(e);
    if (parens) out += ')';
  }

 private:
  void node(const Expr& e) {
    std::visit(
        Overloaded{
            [&](const ast::Lit& n) {
              if (n.value.is_bool()) {
                out += n.value.as_bool() ? "true" : "false";
              } else if (n.value.is_long()) {
                out += std::to_string(n.value.as_long());
              } else {
                out += quoted(n.value.as_string());
              }
            },
            [&](const ast::EntityLit& n) { out += uid_text(n.uid); },
            [&](const ast::VarRef& n) { out += var_name(n.var); },
            [&](const ast::Not& n) {
              out += '!';
              expr(n.operand, kUnary);
            },
            [&](const ast::Neg& n) {
              out += '-';
              // `-5` would read back as a literal, not a negation.
              if (starts_with_digit(n.operand)) {
                out += '(';
                expr(n.operand, kIf);
                out += ')';
              } else {
                expr(n.operand, kUnary);
              }
            },
            [&](const ast::And& n) {
              expr(n.lhs, kAnd);
              out += " && ";
              expr(n.rhs, kRel);
            },
            [&](const ast::Or& n) {
              expr(n.lhs, kOr);
              out += " || ";
              expr(n.rhs, kAnd);
            },
            [&](const ast::If& n) {
              out += "if ";
              expr(n.cond, kIf);
              out += " then ";
              expr(n.then_branch, kIf);
              out += " else ";
              expr(n.else_branch, kIf);
            },
            [&](const ast::Binary& n) {
              if (n.op == BinaryOp::Contains) {
                expr(n.lhs, kMember);
                out += ".contains(";
                expr(n.rhs, kIf);
                out += ')';
                return;
              }
              bool additive = n.op == BinaryOp::Add || n.op == BinaryOp::Sub;
              expr(n.lhs, kAdd);
              out += ' ';
              out += op_symbol(n.op);
              out += ' ';
              expr(n.rhs, additive ? kUnary : kAdd);
            },
            [&](const ast::Like& n) {
              expr(n.operand, kAdd);
              out += " like \"";
              out += escape_pattern(n.pattern);
              out += '"';
            },
            [&](const ast::HasAttr& n) {
              expr(n.operand, kAdd);
              out += " has ";
              out += printable_ident(n.attr) ? n.attr : quoted(n.attr);
            },
            [&](const ast::GetAttr& n) {
              expr(n.operand, kMember);
              if (printable_ident(n.attr)) {
                out += '.';
                out += n.attr;
              } else {
                out += '[';
                out += quoted(n.attr);
                out += ']';
              }
            },
            [&](const ast::SetLit& n) {
              out += '[';
              for (std::size_t i = 0; i < n.elements.size(); ++i) {
                if (i) out += ", ";
                expr(n.elements[i], kIf);
              }
              out += ']';
            },
            [&](const ast::RecordLit& n) {
              out += '{';
              for (std::size_t i = 0; i < n.fields.size(); ++i) {
                if (i) out += ", ";
                const auto& [k, v] = n.fields[i];
                out += printable_ident(k) ? k : quoted(k);
                out += ": ";
                expr(v, kIf);
              }
              out += '}';
            },
        },
        e.node().v);
  }
};

std::string scope_text(std::string_view var, const ScopeConstraint& c) {
  std::string out(var);
  switch (c.kind) {
    case ScopeConstraint::Kind::Any: break;
    case ScopeConstraint::Kind::Eq: out += " == " + uid_text(c.uid); break;
    case ScopeConstraint::Kind::In: out += " in " + uid_text(c.uid); break;
  }
  return out;
}

std::string action_scope_text(const ActionScopeConstraint& c) {
  std::string out = "action";
  switch (c.kind) {
    case ActionScopeConstraint::Kind::Any: break;
    case ActionScopeConstraint::Kind::Eq: out += " == " + uid_text(c.uids.front()); break;
    case ActionScopeConstraint::Kind::InSet:
      out += " in [";
      for (std::size_t i = 0; i < c.uids.size(); ++i) {
        if (i) out += ", ";
        out += uid_text(c.uids[i]);
      }
      out += ']';
      break;
  }
  return out;
}

}  // namespace

std::string pretty_print(const Expr& e) {
  Printer p;
  p.expr(e, kIf);
  return std::move(p.out);
}

std::string pretty_print(const Policy& p) {
  std::string out = p.effect == Effect::Permit ? "permit(\n" : "forbid(\n";
  out += "  " + scope_text("principal", p.principal) + ",\n";
  out += "  " + action_scope_text(p.action) + ",\n";
  out += "  " + scope_text("resource", p.resource) + "\n)";
  for (const auto& c : p.conditions) {
    out += c.kind == ConditionKind::When ? "\nwhen {\n  " : "\nunless {\n  ";
    out += pretty_print(c.body);
    out += "\n}";
  }
  out += ";";
  return out;
}

std::string pretty_print(const PolicySet& ps) {
  std::string out;
  for (const auto& p : ps) {
    if (!out.empty()) out += "\n";
    out += pretty_print(p);
    out += "\n";
  }
  return out;
}

}  // namespace cedar
