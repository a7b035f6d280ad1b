#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cedar/expected.hpp"
#include "cedar/value.hpp"

namespace cedar {

enum class Var { Principal, Action, Resource, Context };

enum class BinaryOp { Eq, Neq, Lt, Le, Gt, Ge, Add, Sub, In, Contains };

std::string_view var_name(Var v);
std::string_view op_symbol(BinaryOp op);

// `like` pattern: literal code points interleaved with `*` wildcards.
struct PatternElem {
  bool wildcard = false;
  char32_t ch = 0;

  static PatternElem star() { return {true, 0}; }
  static PatternElem literal(char32_t c) { return {false, c}; }
  bool operator==(const PatternElem&) const = default;
};
using Pattern = std::vector<PatternElem>;

struct ExprNode;

// Immutable expression tree with value semantics; children are shared.
class Expr {
 public:
  static Expr lit(Value v);  // Bool, Long or String only
  static Expr boolean(bool b) { return lit(Value::boolean(b)); }
  static Expr integer(std::int64_t n) { return lit(Value::integer(n)); }
  static Expr string(std::string s) { return lit(Value::string(std::move(s))); }
  static Expr entity(EntityUID uid);
  static Expr var(Var v);
  static Expr not_(Expr e);
  static Expr neg(Expr e);
  static Expr and_(Expr lhs, Expr rhs);
  static Expr or_(Expr lhs, Expr rhs);
  static Expr if_(Expr cond, Expr then_branch, Expr else_branch);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr like(Expr e, Pattern pattern);
  static Expr has(Expr e, std::string attr);
  static Expr get(Expr e, std::string attr);
  static Expr set(std::vector<Expr> elements);
  static Expr record(std::vector<std::pair<std::string, Expr>> fields);

  const ExprNode& node() const { return *node_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

namespace ast {

struct Lit {
  Value value;
  bool operator==(const Lit&) const = default;
};
struct EntityLit {
  EntityUID uid;
  bool operator==(const EntityLit&) const = default;
};
struct VarRef {
  Var var;
  bool operator==(const VarRef&) const = default;
};
struct Not {
  Expr operand;
  bool operator==(const Not&) const = default;
};
struct Neg {
  Expr operand;
  bool operator==(const Neg&) const = default;
};
struct And {
  Expr lhs, rhs;
  bool operator==(const And&) const = default;
};
struct Or {
  Expr lhs, rhs;
  bool operator==(const Or&) const = default;
};
struct If {
  Expr cond, then_branch, else_branch;
  bool operator==(const If&) const = default;
};
struct Binary {
  BinaryOp op;
  Expr lhs, rhs;
  bool operator==(const Binary&) const = default;
};
struct Like {
  Expr operand;
  Pattern pattern;
  bool operator==(const Like&) const = default;
};
struct HasAttr {
  Expr operand;
  std::string attr;
  bool operator==(const HasAttr&) const = default;
};
struct GetAttr {
  Expr operand;
  std::string attr;
  bool operator==(const GetAttr&) const = default;
};
struct SetLit {
  std::vector<Expr> elements;
  bool operator==(const SetLit&) const = default;
};
struct RecordLit {
  std::vector<std::pair<std::string, Expr>> fields;
  bool operator==(const RecordLit&) const = default;
};

}  // namespace ast

struct ExprNode {
  std::variant<ast::Lit, ast::EntityLit, ast::VarRef, ast::Not, ast::Neg, ast::And, ast::Or,
               ast::If, ast::Binary, ast::Like, ast::HasAttr, ast::GetAttr, ast::SetLit,
               ast::RecordLit>
      v;
  bool operator==(const ExprNode&) const = default;
};

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// Number of AST nodes.
std::size_t expr_size(const Expr& e);

// Direct children in evaluation order.
std::vector<Expr> children(const Expr& e);

// Stable S-expression dump; structurally equal expressions dump equally.
std::string dump(const Expr& e);

enum class Effect { Permit, Forbid };

struct ScopeConstraint {
  enum class Kind { Any, Eq, In };
  Kind kind = Kind::Any;
  EntityUID uid;

  static ScopeConstraint any() { return {}; }
  static ScopeConstraint eq(EntityUID u) { return {Kind::Eq, std::move(u)}; }
  static ScopeConstraint in(EntityUID u) { return {Kind::In, std::move(u)}; }
  bool operator==(const ScopeConstraint&) const = default;
};

struct ActionScopeConstraint {
  enum class Kind { Any, Eq, InSet };
  Kind kind = Kind::Any;
  std::vector<EntityUID> uids;  // one element for Eq

  static ActionScopeConstraint any() { return {}; }
  static ActionScopeConstraint eq(EntityUID u) { return {Kind::Eq, {std::move(u)}}; }
  static ActionScopeConstraint in(std::vector<EntityUID> us) {
    return {Kind::InSet, std::move(us)};
  }
  bool operator==(const ActionScopeConstraint&) const = default;
};

enum class ConditionKind { When, Unless };

struct Condition {
  ConditionKind kind = ConditionKind::When;
  Expr body = Expr::boolean(true);
  bool operator==(const Condition&) const = default;
};

struct Policy {
  std::string id;
  Effect effect = Effect::Permit;
  ScopeConstraint principal;
  ActionScopeConstraint action;
  ScopeConstraint resource;
  std::vector<Condition> conditions;

  bool operator==(const Policy&) const = default;
};

// Ordered policies with pairwise distinct ids.
class PolicySet {
 public:
  PolicySet() = default;
  static Expected<PolicySet, std::string> make(std::vector<Policy> policies);

  const std::vector<Policy>& policies() const { return policies_; }
  std::size_t size() const { return policies_.size(); }
  bool empty() const { return policies_.empty(); }
  auto begin() const { return policies_.begin(); }
  auto end() const { return policies_.end(); }

  bool operator==(const PolicySet&) const = default;

 private:
  std::vector<Policy> policies_;
};

}  // namespace cedar
