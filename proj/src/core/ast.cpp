#include "cedar/ast.hpp"

#include <set>
#include <sstream>

namespace cedar {

std::string_view var_name(Var v) {
  switch (v) {
    case Var::Principal: return "principal";
    case Var::Action: return "action";
    case Var::Resource: return "resource";
    case Var::Context: return "context";
  }
  return "?";
}

std::string_view op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Eq: return "==";
    case BinaryOp::Neq: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::In: return "in";
    case BinaryOp::Contains: return "contains";
  }
  return "?";
}

bool operator==(const Expr& a, const Expr& b) {
  return a.node_ == b.node_ || *a.node_ == *b.node_;
}

Expr Expr::lit(Value v) { return Expr(std::make_shared<const ExprNode>(ExprNode{ast::Lit{std::move(v)}})); }
Expr Expr::entity(EntityUID uid) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::EntityLit{std::move(uid)}}));
}
Expr Expr::var(Var v) { return Expr(std::make_shared<const ExprNode>(ExprNode{ast::VarRef{v}})); }
Expr Expr::not_(Expr e) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::Not{std::move(e)}}));
}
Expr Expr::neg(Expr e) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::Neg{std::move(e)}}));
}
Expr Expr::and_(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::And{std::move(lhs), std::move(rhs)}}));
}
Expr Expr::or_(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::Or{std::move(lhs), std::move(rhs)}}));
}
Expr Expr::if_(Expr cond, Expr then_branch, Expr else_branch) {
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{ast::If{std::move(cond), std::move(then_branch), std::move(else_branch)}}));
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{ast::Binary{op, std::move(lhs), std::move(rhs)}}));
}
Expr Expr::like(Expr e, Pattern pattern) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::Like{std::move(e), std::move(pattern)}}));
}
Expr Expr::has(Expr e, std::string attr) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::HasAttr{std::move(e), std::move(attr)}}));
}
Expr Expr::get(Expr e, std::string attr) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::GetAttr{std::move(e), std::move(attr)}}));
}
Expr Expr::set(std::vector<Expr> elements) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::SetLit{std::move(elements)}}));
}
Expr Expr::record(std::vector<std::pair<std::string, Expr>> fields) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{ast::RecordLit{std::move(fields)}}));
}

std::vector<Expr> children(const Expr& e) {
  return std::visit(
      Overloaded{
          [](const ast::Lit&) { return std::vector<Expr>{}; },
          [](const ast::EntityLit&) { return std::vector<Expr>{}; },
          [](const ast::VarRef&) { return std::vector<Expr>{}; },
          [](const ast::Not& n) { return std::vector<Expr>{n.operand}; },
          [](const ast::Neg& n) { return std::vector<Expr>{n.operand}; },
          [](const ast::And& n) { return std::vector<Expr>{n.lhs, n.rhs}; },
          [](const ast::Or& n) { return std::vector<Expr>{n.lhs, n.rhs}; },
          [](const ast::If& n) { return std::vector<Expr>{n.cond, n.then_branch, n.else_branch}; },
          [](const ast::Binary& n) { return std::vector<Expr>{n.lhs, n.rhs}; },
          [](const ast::Like& n) { return std::vector<Expr>{n.operand}; },
          [](const ast::HasAttr& n) { return std::vector<Expr>{n.operand}; },
          [](const ast::GetAttr& n) { return std::vector<Expr>{n.operand}; },
          [](const ast::SetLit& n) { return n.elements; },
          [](const ast::RecordLit& n) {
            std::vector<Expr> out;
            for (const auto& [_, v] : n.fields) out.push_back(v);
            return out;
          },
      },
      e.node().v);
}

std::size_t expr_size(const Expr& e) {
  std::size_t n = 1;
  for (const auto& c : children(e)) n += expr_size(c);
  return n;
}

namespace {

void dump_to(std::ostream& os, const Expr& e) {
  std::visit(Overloaded{
                 [&](const ast::Lit& n) { os << "(lit " << n.value << ')'; },
                 [&](const ast::EntityLit& n) { os << "(entity " << n.uid << ')'; },
                 [&](const ast::VarRef& n) { os << var_name(n.var); },
                 [&](const ast::Not& n) {
                   os << "(not ";
                   dump_to(os, n.operand);
                   os << ')';
                 },
                 [&](const ast::Neg& n) {
                   os << "(neg ";
                   dump_to(os, n.operand);
                   os << ')';
                 },
                 [&](const ast::And& n) {
                   os << "(and ";
                   dump_to(os, n.lhs);
                   os << ' ';
                   dump_to(os, n.rhs);
                   os << ')';
                 },
                 [&](const ast::Or& n) {
                   os << "(or ";
                   dump_to(os, n.lhs);
                   os << ' ';
                   dump_to(os, n.rhs);
                   os << ')';
                 },
                 [&](const ast::If& n) {
                   os << "(if ";
                   dump_to(os, n.cond);
                   os << ' ';
                   dump_to(os, n.then_branch);
                   os << ' ';
                   dump_to(os, n.else_branch);
                   os << ')';
                 },
                 [&](const ast::Binary& n) {
                   os << '(' << op_symbol(n.op) << ' ';
                   dump_to(os, n.lhs);
                   os << ' ';
                   dump_to(os, n.rhs);
                   os << ')';
                 },
                 [&](const ast::Like& n) {
                   os << "(like ";
                   dump_to(os, n.operand);
                   os << " [";
                   for (const auto& p : n.pattern) {
                     if (p.wildcard) {
                       os << " *";
                     } else {
                       os << ' ' << static_cast<std::uint32_t>(p.ch);
                     }
                   }
                   os << "])";
                 },
                 [&](const ast::HasAttr& n) {
                   os << "(has ";
                   dump_to(os, n.operand);
                   os << ' ' << Value::string(n.attr) << ')';
                 },
                 [&](const ast::GetAttr& n) {
                   os << "(get ";
                   dump_to(os, n.operand);
                   os << ' ' << Value::string(n.attr) << ')';
                 },
                 [&](const ast::SetLit& n) {
                   os << "(set";
                   for (const auto& c : n.elements) {
                     os << ' ';
                     dump_to(os, c);
                   }
                   os << ')';
                 },
                 [&](const ast::RecordLit& n) {
                   os << "(record";
                   for (const auto& [k, c] : n.fields) {
                     os << ' ' << Value::string(k) << ' ';
                     dump_to(os, c);
                   }
                   os << ')';
                 },
             },
             e.node().v);
}

}  // namespace

std::string dump(const Expr& e) {
  std::ostringstream os;
  dump_to(os, e);
  return os.str();
}

Expected<PolicySet, std::string> PolicySet::make(std::vector<Policy> policies) {
  std::set<std::string> seen;
  for (const auto& p : policies) {
    if (!seen.insert(p.id).second) return Unexpected("duplicate policy id: " + p.id);
  }
  PolicySet ps;
  ps.policies_ = std::move(policies);
  return ps;
}

}  // namespace cedar
