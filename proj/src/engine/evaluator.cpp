#include "cedar/evaluator.hpp"

#include <algorithm>
#include <limits>

#include "cedar/utf8.hpp"

namespace cedar {

namespace {

using Result = Expected<Value, EvalError>;

EvalError type_error(ValueKind expected, const Value& got) {
  return EvalError::type_error({expected}, got.kind());
}

class Evaluator {
 public:
  Evaluator(const Request& req, const Entities& store) : req_(req), store_(store) {}

  Result eval(const Expr& e) {
    if (depth_ >= kMaxEvalDepth) return Unexpected(EvalError::domain("evaluation depth limit"));
    ++depth_;
    Result r = std::visit([&](const auto& n) { return eval_node(n); }, e.node().v);
    --depth_;
    return r;
  }

 private:
  Result eval_node(const ast::Lit& n) { return n.value; }
  Result eval_node(const ast::EntityLit& n) { return Value::entity(n.uid); }

  Result eval_node(const ast::VarRef& n) {
    switch (n.var) {
      case Var::Principal: return Value::entity(req_.principal);
      case Var::Action: return Value::entity(req_.action);
      case Var::Resource: return Value::entity(req_.resource);
      case Var::Context: return req_.context;
    }
    return Unexpected(EvalError::domain("unknown variable"));
  }

  Result eval_node(const ast::Not& n) {
    auto v = eval(n.operand);
    if (!v) return v;
    if (!v->is_bool()) return Unexpected(type_error(ValueKind::Bool, *v));
    return Value::boolean(!v->as_bool());
  }

  Result eval_node(const ast::Neg& n) {
    auto v = eval(n.operand);
    if (!v) return v;
    if (!v->is_long()) return Unexpected(type_error(ValueKind::Long, *v));
    if (v->as_long() == std::numeric_limits<std::int64_t>::min()) {
      return Unexpected(EvalError::overflow());
    }
    return Value::integer(-v->as_long());
  }

  Result eval_node(const ast::And& n) {
    auto lhs = eval_bool(n.lhs);
    if (!lhs) return lhs;
    if (!lhs->as_bool()) return *lhs;
    return eval_bool(n.rhs);
  }

  Result eval_node(const ast::Or& n) {
    auto lhs = eval_bool(n.lhs);
    if (!lhs) return lhs;
    if (lhs->as_bool()) return *lhs;
    return eval_bool(n.rhs);
  }

  Result eval_node(const ast::If& n) {
    auto cond = eval_bool(n.cond);
    if (!cond) return cond;
    return eval(cond->as_bool() ? n.then_branch : n.else_branch);
  }

  Result eval_node(const ast::Binary& n) {
    auto lhs = eval(n.lhs);
    if (!lhs) return lhs;
    auto rhs = eval(n.rhs);
    if (!rhs) return rhs;
    const Value& a = *lhs;
    const Value& b = *rhs;
    switch (n.op) {
      case BinaryOp::Eq: return Value::boolean(a == b);
      case BinaryOp::Neq: return Value::boolean(a != b);
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge: {
        if (!a.is_long()) return Unexpected(type_error(ValueKind::Long, a));
        if (!b.is_long()) return Unexpected(type_error(ValueKind::Long, b));
        std::int64_t x = a.as_long();
        std::int64_t y = b.as_long();
        bool r = n.op == BinaryOp::Lt   ? x < y
                 : n.op == BinaryOp::Le ? x <= y
                 : n.op == BinaryOp::Gt ? x > y
                                        : x >= y;
        return Value::boolean(r);
      }
      case BinaryOp::Add:
      case BinaryOp::Sub: {
        if (!a.is_long()) return Unexpected(type_error(ValueKind::Long, a));
        if (!b.is_long()) return Unexpected(type_error(ValueKind::Long, b));
        std::int64_t out;
        bool overflow = n.op == BinaryOp::Add
                            ? __builtin_add_overflow(a.as_long(), b.as_long(), &out)
                            : __builtin_sub_overflow(a.as_long(), b.as_long(), &out);
        if (overflow) return Unexpected(EvalError::overflow());
        return Value::integer(out);
      }
      case BinaryOp::In: return eval_in(a, b);
      case BinaryOp::Contains: {
        if (!a.is_set()) return Unexpected(type_error(ValueKind::Set, a));
        const auto& elems = a.as_set();
        return Value::boolean(std::binary_search(elems.begin(), elems.end(), b));
      }
    }
    return Unexpected(EvalError::domain("unknown operator"));
  }

  Result eval_in(const Value& a, const Value& b) {
    if (!a.is_entity()) return Unexpected(type_error(ValueKind::Entity, a));
    if (b.is_entity()) return Value::boolean(in_relation(store_, a.as_entity(), b.as_entity()));
    if (!b.is_set()) {
      return Unexpected(EvalError::type_error({ValueKind::Entity, ValueKind::Set}, b.kind()));
    }
    for (const auto& elem : b.as_set()) {
      if (!elem.is_entity()) return Unexpected(type_error(ValueKind::Entity, elem));
    }
    const auto& anc = store_.ancestors(a.as_entity());
    for (const auto& elem : b.as_set()) {
      if (elem.as_entity() == a.as_entity() || anc.contains(elem.as_entity())) {
        return Value::boolean(true);
      }
    }
    return Value::boolean(false);
  }

  Result eval_node(const ast::Like& n) {
    auto v = eval(n.operand);
    if (!v) return v;
    if (!v->is_string()) return Unexpected(type_error(ValueKind::String, *v));
    auto text = decode_utf8(v->as_string());
    if (!text) return Unexpected(EvalError::domain("invalid UTF-8 in string"));
    return Value::boolean(wildcard_match(*text, n.pattern));
  }

  // Attribute map of an entity or record value, or nullptr for unknown
  // entities (which have no attributes).
  Expected<const ValueRecord*, EvalError> attrs_of(const Value& v) {
    if (v.is_record()) return &v.as_record();
    if (v.is_entity()) {
      const auto* data = store_.find(v.as_entity());
      return data ? &data->attrs : static_cast<const ValueRecord*>(nullptr);
    }
    return Unexpected(EvalError::type_error({ValueKind::Entity, ValueKind::Record}, v.kind()));
  }

  Result eval_node(const ast::HasAttr& n) {
    auto v = eval(n.operand);
    if (!v) return v;
    auto attrs = attrs_of(*v);
    if (!attrs) return Unexpected(attrs.error());
    return Value::boolean(*attrs && (*attrs)->contains(n.attr));
  }

  Result eval_node(const ast::GetAttr& n) {
    auto v = eval(n.operand);
    if (!v) return v;
    auto attrs = attrs_of(*v);
    if (!attrs) return Unexpected(attrs.error());
    if (!*attrs) return Unexpected(EvalError::missing_attr(n.attr));
    auto it = (*attrs)->find(n.attr);
    if (it == (*attrs)->end()) return Unexpected(EvalError::missing_attr(n.attr));
    return it->second;
  }

  Result eval_node(const ast::SetLit& n) {
    std::vector<Value> elems;
    elems.reserve(n.elements.size());
    for (const auto& e : n.elements) {
      auto v = eval(e);
      if (!v) return v;
      elems.push_back(std::move(*v));
    }
    return Value::set(std::move(elems));
  }

  Result eval_node(const ast::RecordLit& n) {
    ValueRecord fields;
    for (const auto& [name, e] : n.fields) {
      auto v = eval(e);
      if (!v) return v;
      if (!fields.emplace(name, std::move(*v)).second) {
        return Unexpected(EvalError::domain("duplicate record key " + name));
      }
    }
    return Value::record(std::move(fields));
  }

  Result eval_bool(const Expr& e) {
    auto v = eval(e);
    if (!v) return v;
    if (!v->is_bool()) return Unexpected(type_error(ValueKind::Bool, *v));
    return v;
  }

  const Request& req_;
  const Entities& store_;
  std::size_t depth_ = 0;
};

bool principal_like_matches(const ScopeConstraint& c, const EntityUID& uid, const Entities& store) {
  switch (c.kind) {
    case ScopeConstraint::Kind::Any: return true;
    case ScopeConstraint::Kind::Eq: return uid == c.uid;
    case ScopeConstraint::Kind::In: return in_relation(store, uid, c.uid);
  }
  return false;
}

}  // namespace

Expected<Value, EvalError> evaluate(const Expr& e, const Request& req, const Entities& store) {
  return Evaluator(req, store).eval(e);
}

bool wildcard_match(std::u32string_view text, const Pattern& pattern) {
  // Greedy two-pointer match, backtracking to the most recent star.
  std::size_t t = 0, p = 0;
  std::size_t star_p = std::u32string_view::npos, star_t = 0;
  while (t < text.size()) {
    if (p < pattern.size() && !pattern[p].wildcard && pattern[p].ch == text[t]) {
      ++t;
      ++p;
    } else if (p < pattern.size() && pattern[p].wildcard) {
      star_p = p++;
      star_t = t;
    } else if (star_p != std::u32string_view::npos) {
      p = star_p + 1;
      t = ++star_t;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p].wildcard) ++p;
  return p == pattern.size();
}

bool scope_matches(const Policy& p, const Request& req, const Entities& store) {
  if (!principal_like_matches(p.principal, req.principal, store)) return false;
  switch (p.action.kind) {
    case ActionScopeConstraint::Kind::Any: break;
    case ActionScopeConstraint::Kind::Eq:
      if (req.action != p.action.uids.front()) return false;
      break;
    case ActionScopeConstraint::Kind::InSet: {
      bool any = std::any_of(p.action.uids.begin(), p.action.uids.end(),
                             [&](const EntityUID& u) { return in_relation(store, req.action, u); });
      if (!any) return false;
      break;
    }
  }
  return principal_like_matches(p.resource, req.resource, store);
}

Satisfaction satisfied(const Policy& p, const Request& req, const Entities& store) {
  if (!scope_matches(p, req, store)) return Satisfaction::not_satisfied();
  bool holds = true;
  Evaluator ev(req, store);
  for (const auto& cond : p.conditions) {
    auto v = ev.eval(cond.body);
    if (!v) return Satisfaction::errored(v.error());
    if (!v->is_bool()) return Satisfaction::errored(type_error(ValueKind::Bool, *v));
    bool want = cond.kind == ConditionKind::When;
    if (v->as_bool() != want) holds = false;
  }
  return holds ? Satisfaction::satisfied() : Satisfaction::not_satisfied();
}

}  // namespace cedar
