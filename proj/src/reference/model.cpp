#include "cedar/reference/model.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "cedar/utf8.hpp"

namespace cedar::reference {

using Result = Expected<Value, EvalError>;

// ---------------------------------------------------------------- entities

std::set<EntityUID> ancestors(const Entities& store, const EntityUID& uid) {
  std::set<EntityUID> result;
  const EntityData* data = store.find(uid);
  if (!data) return result;
  for (const auto& p : data->parents) {
    result.insert(p);
    for (const auto& q : reference::ancestors(store, p)) result.insert(q);
  }
  return result;
}

static bool in_entity(const Entities& store, const EntityUID& a, const EntityUID& b) {
  return a == b || reference::ancestors(store, a).count(b) > 0;
}

// -------------------------------------------------------------- evaluation

static Result type_err(ValueKind want, const Value& got) {
  return Unexpected(EvalError::type_error({want}, got.kind()));
}

static bool like(const std::u32string& s, const Pattern& p) {
  // matches[i][j]: s[i..] matches p[j..]
  std::vector<std::vector<bool>> m(s.size() + 1, std::vector<bool>(p.size() + 1, false));
  m[s.size()][p.size()] = true;
  for (std::size_t i = s.size() + 1; i-- > 0;) {
    for (std::size_t j = p.size(); j-- > 0;) {
      if (p[j].wildcard) {
        m[i][j] = m[i][j + 1] || (i < s.size() && m[i + 1][j]);
      } else {
        m[i][j] = i < s.size() && s[i] == p[j].ch && m[i + 1][j + 1];
      }
    }
  }
  return m[0][0];
}

static Result eval(const Expr& e, const Request& req, const Entities& store, int depth);

static Result eval_long_pair(const ast::Binary& n, const Value& a, const Value& b) {
  if (!a.is_long()) return type_err(ValueKind::Long, a);
  if (!b.is_long()) return type_err(ValueKind::Long, b);
  __int128 x = a.as_long();
  __int128 y = b.as_long();
  switch (n.op) {
    case BinaryOp::Lt: return Value::boolean(x < y);
    case BinaryOp::Le: return Value::boolean(x <= y);
    case BinaryOp::Gt: return Value::boolean(x > y);
    case BinaryOp::Ge: return Value::boolean(x >= y);
    default: break;
  }
  __int128 r = n.op == BinaryOp::Add ? x + y : x - y;
  if (r > std::numeric_limits<std::int64_t>::max() || r < std::numeric_limits<std::int64_t>::min()) {
    return Unexpected(EvalError::overflow());
  }
  return Value::integer(static_cast<std::int64_t>(r));
}

static Result eval_binary(const ast::Binary& n, const Request& req, const Entities& store, int depth) {
  Result l = eval(n.lhs, req, store, depth);
  if (!l) return l;
  Result r = eval(n.rhs, req, store, depth);
  if (!r) return r;
  const Value& a = *l;
  const Value& b = *r;
  switch (n.op) {
    case BinaryOp::Eq: return Value::boolean(a == b);
    case BinaryOp::Neq: return Value::boolean(!(a == b));
    case BinaryOp::In: {
      if (!a.is_entity()) return type_err(ValueKind::Entity, a);
      if (b.is_entity()) return Value::boolean(in_entity(store, a.as_entity(), b.as_entity()));
      if (!b.is_set()) return Unexpected(EvalError::type_error({ValueKind::Entity, ValueKind::Set}, b.kind()));
      bool found = false;
      for (const auto& x : b.as_set()) {
        if (!x.is_entity()) return type_err(ValueKind::Entity, x);
      }
      for (const auto& x : b.as_set()) found = found || in_entity(store, a.as_entity(), x.as_entity());
      return Value::boolean(found);
    }
    case BinaryOp::Contains: {
      if (!a.is_set()) return type_err(ValueKind::Set, a);
      bool found = false;
      for (const auto& x : a.as_set()) found = found || x == b;
      return Value::boolean(found);
    }
    default: return eval_long_pair(n, a, b);
  }
}

static Result eval(const Expr& e, const Request& req, const Entities& store, int depth) {
  if (depth > 512) return Unexpected(EvalError::domain("evaluation depth limit"));
  ++depth;
  const auto& v = e.node().v;
  if (auto* n = std::get_if<ast::Lit>(&v)) return n->value;
  if (auto* n = std::get_if<ast::EntityLit>(&v)) return Value::entity(n->uid);
  if (auto* n = std::get_if<ast::VarRef>(&v)) {
    if (n->var == Var::Principal) return Value::entity(req.principal);
    if (n->var == Var::Action) return Value::entity(req.action);
    if (n->var == Var::Resource) return Value::entity(req.resource);
    return req.context;
  }
  if (auto* n = std::get_if<ast::Not>(&v)) {
    Result x = eval(n->operand, req, store, depth);
    if (!x) return x;
    if (!x->is_bool()) return type_err(ValueKind::Bool, *x);
    return Value::boolean(!x->as_bool());
  }
  if (auto* n = std::get_if<ast::Neg>(&v)) {
    Result x = eval(n->operand, req, store, depth);
    if (!x) return x;
    if (!x->is_long()) return type_err(ValueKind::Long, *x);
    if (x->as_long() == std::numeric_limits<std::int64_t>::min()) return Unexpected(EvalError::overflow());
    return Value::integer(-x->as_long());
  }
  if (auto* n = std::get_if<ast::And>(&v)) {
    Result x = eval(n->lhs, req, store, depth);
    if (!x) return x;
    if (!x->is_bool()) return type_err(ValueKind::Bool, *x);
    if (x->as_bool() == false) return Value::boolean(false);
    Result y = eval(n->rhs, req, store, depth);
    if (!y) return y;
    if (!y->is_bool()) return type_err(ValueKind::Bool, *y);
    return y;
  }
  if (auto* n = std::get_if<ast::Or>(&v)) {
    Result x = eval(n->lhs, req, store, depth);
    if (!x) return x;
    if (!x->is_bool()) return type_err(ValueKind::Bool, *x);
    if (x->as_bool() == true) return Value::boolean(true);
    Result y = eval(n->rhs, req, store, depth);
    if (!y) return y;
    if (!y->is_bool()) return type_err(ValueKind::Bool, *y);
    return y;
  }
  if (auto* n = std::get_if<ast::If>(&v)) {
    Result c = eval(n->cond, req, store, depth);
    if (!c) return c;
    if (!c->is_bool()) return type_err(ValueKind::Bool, *c);
    if (c->as_bool()) return eval(n->then_branch, req, store, depth);
    return eval(n->else_branch, req, store, depth);
  }
  if (auto* n = std::get_if<ast::Binary>(&v)) return eval_binary(*n, req, store, depth);
  if (auto* n = std::get_if<ast::Like>(&v)) {
    Result x = eval(n->operand, req, store, depth);
    if (!x) return x;
    if (!x->is_string()) return type_err(ValueKind::String, *x);
    auto text = decode_utf8(x->as_string());
    if (!text) return Unexpected(EvalError::domain("invalid UTF-8 in string"));
    return Value::boolean(like(*text, n->pattern));
  }
  if (auto* n = std::get_if<ast::HasAttr>(&v)) {
    Result x = eval(n->operand, req, store, depth);
    if (!x) return x;
    if (x->is_record()) return Value::boolean(x->as_record().count(n->attr) > 0);
    if (!x->is_entity()) return Unexpected(EvalError::type_error({ValueKind::Entity, ValueKind::Record}, x->kind()));
    const EntityData* d = store.find(x->as_entity());
    return Value::boolean(d != nullptr && d->attrs.count(n->attr) > 0);
  }
  if (auto* n = std::get_if<ast::GetAttr>(&v)) {
    Result x = eval(n->operand, req, store, depth);
    if (!x) return x;
    const ValueRecord* fields = nullptr;
    if (x->is_record()) {
      fields = &x->as_record();
    } else if (x->is_entity()) {
      const EntityData* d = store.find(x->as_entity());
      if (d) fields = &d->attrs;
    } else {
      return Unexpected(EvalError::type_error({ValueKind::Entity, ValueKind::Record}, x->kind()));
    }
    if (fields == nullptr || fields->count(n->attr) == 0) return Unexpected(EvalError::missing_attr(n->attr));
    return fields->at(n->attr);
  }
  if (auto* n = std::get_if<ast::SetLit>(&v)) {
    std::vector<Value> xs;
    for (const auto& c : n->elements) {
      Result x = eval(c, req, store, depth);
      if (!x) return x;
      xs.push_back(*x);
    }
    return Value::set(xs);
  }
  const auto& rec = std::get<ast::RecordLit>(v);
  ValueRecord fields;
  for (const auto& [k, c] : rec.fields) {
    Result x = eval(c, req, store, depth);
    if (!x) return x;
    if (fields.count(k)) return Unexpected(EvalError::domain("duplicate record key " + k));
    fields[k] = *x;
  }
  return Value::record(fields);
}

Result evaluate(const Expr& e, const Request& req, const Entities& store) {
  return eval(e, req, store, 0);
}

// ----------------------------------------------------------- authorization

static bool scope_ok(const ScopeConstraint& c, const EntityUID& u, const Entities& store) {
  if (c.kind == ScopeConstraint::Kind::Eq) return u == c.uid;
  if (c.kind == ScopeConstraint::Kind::In) return in_entity(store, u, c.uid);
  return true;
}

static bool in_scope(const Policy& p, const Request& req, const Entities& store) {
  bool action_ok = true;
  if (p.action.kind == ActionScopeConstraint::Kind::Eq) action_ok = req.action == p.action.uids[0];
  if (p.action.kind == ActionScopeConstraint::Kind::InSet) {
    action_ok = false;
    for (const auto& u : p.action.uids) action_ok = action_ok || in_entity(store, req.action, u);
  }
  return scope_ok(p.principal, req.principal, store) && action_ok &&
         scope_ok(p.resource, req.resource, store);
}

// nullopt: satisfied; otherwise the reason it is not (error or plain false).
struct Outcome {
  bool satisfied;
  std::optional<EvalError> error;
};

static Outcome satisfied(const Policy& p, const Request& req, const Entities& store) {
  if (!in_scope(p, req, store)) return {false, std::nullopt};
  bool all = true;
  for (const auto& c : p.conditions) {
    Result r = evaluate(c.body, req, store);
    if (!r) return {false, r.error()};
    if (!r->is_bool()) return {false, EvalError::type_error({ValueKind::Bool}, r->kind())};
    bool want = c.kind == ConditionKind::When;
    all = all && r->as_bool() == want;
  }
  return {all, std::nullopt};
}

static std::set<std::string> satisfied_policies(Effect effect, const PolicySet& ps, const Request& req,
                                                const Entities& store) {
  std::set<std::string> ids;
  for (const auto& p : ps) {
    if (p.effect == effect && satisfied(p, req, store).satisfied) ids.insert(p.id);
  }
  return ids;
}

Response is_authorized(const Request& req, const Entities& store, const PolicySet& ps) {
  auto forbids = satisfied_policies(Effect::Forbid, ps, req, store);
  auto permits = satisfied_policies(Effect::Permit, ps, req, store);
  Response resp;
  if (forbids.empty() && !permits.empty()) {
    resp.decision = Decision::Allow;
    resp.determining = permits;
  } else {
    resp.decision = Decision::Deny;
    resp.determining = forbids;
  }
  std::map<std::string, EvalError> errs;
  for (const auto& p : ps) {
    Outcome o = satisfied(p, req, store);
    if (o.error) errs.emplace(p.id, *o.error);
  }
  for (const auto& [id, e] : errs) resp.errors.emplace_back(id, e);
  return resp;
}

PolicySet slice(const PolicySet& ps, const Request& req, const Entities& store) {
  std::vector<Policy> out;
  for (const auto& p : ps) {
    if (in_scope(p, req, store)) out.push_back(p);
  }
  return *PolicySet::make(out);
}

// -------------------------------------------------------------- validation

namespace {

struct Env {
  std::string principal;
  EntityUID action;
  std::string resource;
  Type context;
};

// Known-present attributes, as (receiver dump, attribute) pairs.
using Caps = std::set<std::pair<std::string, std::string>>;

struct TypeAndCaps {
  Type type;
  Caps caps;
};

using TC = std::optional<TypeAndCaps>;

std::set<std::string> reachable_types(const Schema& s, const std::string& t) {
  std::set<std::string> out{t};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& x : std::set<std::string>(out)) {
      auto it = s.entity_types.find(x);
      if (it == s.entity_types.end()) continue;
      for (const auto& p : it->second.parent_types) grew = out.insert(p).second || grew;
    }
  }
  return out;
}

std::set<EntityUID> reachable_actions(const Schema& s, const EntityUID& a) {
  std::set<EntityUID> out{a};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& x : std::set<EntityUID>(out)) {
      auto it = s.actions.find(x);
      if (it == s.actions.end()) continue;
      for (const auto& p : it->second.parents) grew = out.insert(p).second || grew;
    }
  }
  return out;
}

bool entity_type_exists(const Schema& s, const std::string& t) {
  if (s.entity_types.count(t)) return true;
  for (const auto& [a, _] : s.actions) {
    if (a.type_name() == t) return true;
  }
  return false;
}

std::optional<std::map<std::string, AttrType>> fields(const Schema& s, const Type& t) {
  if (t.is_record()) return t.attrs();
  if (!t.is_entity()) return std::nullopt;
  auto it = s.entity_types.find(t.entity_name());
  if (it == s.entity_types.end()) return std::map<std::string, AttrType>{};
  return it->second.attributes;
}

TC tc(const Expr& e, const Env& env, const Caps& caps, const Schema& s, int depth);

std::optional<Type> type_of(const Expr& e, const Env& env, const Caps& caps, const Schema& s, int depth) {
  TC r = tc(e, env, caps, s, depth);
  if (!r) return std::nullopt;
  return r->type;
}

TC tc(const Expr& e, const Env& env, const Caps& caps, const Schema& s, int depth) {
  if (depth > 512) return std::nullopt;
  ++depth;
  const Type B = Type::boolean();
  const Type L = Type::integer();
  const auto& v = e.node().v;
  if (auto* n = std::get_if<ast::Lit>(&v)) {
    if (n->value.is_bool()) return TypeAndCaps{B, {}};
    if (n->value.is_long()) return TypeAndCaps{L, {}};
    return TypeAndCaps{Type::string(), {}};
  }
  if (auto* n = std::get_if<ast::EntityLit>(&v)) {
    if (!entity_type_exists(s, n->uid.type_name())) return std::nullopt;
    return TypeAndCaps{Type::entity(n->uid.type_name()), {}};
  }
  if (auto* n = std::get_if<ast::VarRef>(&v)) {
    if (n->var == Var::Principal) return TypeAndCaps{Type::entity(env.principal), {}};
    if (n->var == Var::Action) return TypeAndCaps{Type::entity(env.action.type_name()), {}};
    if (n->var == Var::Resource) return TypeAndCaps{Type::entity(env.resource), {}};
    return TypeAndCaps{env.context, {}};
  }
  if (auto* n = std::get_if<ast::Not>(&v)) {
    if (type_of(n->operand, env, caps, s, depth) != B) return std::nullopt;
    return TypeAndCaps{B, {}};
  }
  if (auto* n = std::get_if<ast::Neg>(&v)) {
    if (type_of(n->operand, env, caps, s, depth) != L) return std::nullopt;
    return TypeAndCaps{L, {}};
  }
  if (auto* n = std::get_if<ast::And>(&v)) {
    TC a = tc(n->lhs, env, caps, s, depth);
    if (!a || a->type != B) return std::nullopt;
    Caps inner = caps;
    inner.insert(a->caps.begin(), a->caps.end());
    TC b = tc(n->rhs, env, inner, s, depth);
    if (!b || b->type != B) return std::nullopt;
    Caps out = a->caps;
    out.insert(b->caps.begin(), b->caps.end());
    return TypeAndCaps{B, out};
  }
  if (auto* n = std::get_if<ast::Or>(&v)) {
    if (type_of(n->lhs, env, caps, s, depth) != B) return std::nullopt;
    if (type_of(n->rhs, env, caps, s, depth) != B) return std::nullopt;
    return TypeAndCaps{B, {}};
  }
  if (auto* n = std::get_if<ast::If>(&v)) {
    TC c = tc(n->cond, env, caps, s, depth);
    if (!c || c->type != B) return std::nullopt;
    Caps inner = caps;
    inner.insert(c->caps.begin(), c->caps.end());
    auto t = type_of(n->then_branch, env, inner, s, depth);
    auto f = type_of(n->else_branch, env, caps, s, depth);
    if (!t || !f || *t != *f) return std::nullopt;
    return TypeAndCaps{*t, {}};
  }
  if (auto* n = std::get_if<ast::Binary>(&v)) {
    auto a = type_of(n->lhs, env, caps, s, depth);
    auto b = type_of(n->rhs, env, caps, s, depth);
    if (!a || !b) return std::nullopt;
    bool okay = false;
    switch (n->op) {
      case BinaryOp::Eq:
      case BinaryOp::Neq: okay = *a == *b || (a->is_entity() && b->is_entity()); break;
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
      case BinaryOp::Add:
      case BinaryOp::Sub:
        if (*a != L || *b != L) return std::nullopt;
        return TypeAndCaps{(n->op == BinaryOp::Add || n->op == BinaryOp::Sub) ? L : B, {}};
      case BinaryOp::In:
        okay = a->is_entity() && (b->is_entity() || (b->is_set() && b->element().is_entity()));
        break;
      case BinaryOp::Contains:
        okay = a->is_set() && (a->element() == *b || (a->element().is_entity() && b->is_entity()));
        break;
    }
    if (!okay) return std::nullopt;
    return TypeAndCaps{B, {}};
  }
  if (auto* n = std::get_if<ast::Like>(&v)) {
    if (type_of(n->operand, env, caps, s, depth) != Type::string()) return std::nullopt;
    return TypeAndCaps{B, {}};
  }
  if (auto* n = std::get_if<ast::HasAttr>(&v)) {
    auto t = type_of(n->operand, env, caps, s, depth);
    if (!t) return std::nullopt;
    auto fs = fields(s, *t);
    if (!fs) return std::nullopt;
    Caps out;
    if (fs->count(n->attr) && !fs->at(n->attr).required) out.insert({dump(n->operand), n->attr});
    return TypeAndCaps{B, out};
  }
  if (auto* n = std::get_if<ast::GetAttr>(&v)) {
    auto t = type_of(n->operand, env, caps, s, depth);
    if (!t) return std::nullopt;
    auto fs = fields(s, *t);
    if (!fs || !fs->count(n->attr)) return std::nullopt;
    const AttrType& at = fs->at(n->attr);
    if (!at.required && !caps.count({dump(n->operand), n->attr})) return std::nullopt;
    return TypeAndCaps{at.type, {}};
  }
  if (auto* n = std::get_if<ast::SetLit>(&v)) {
    if (n->elements.empty()) return std::nullopt;
    auto first = type_of(n->elements[0], env, caps, s, depth);
    if (!first) return std::nullopt;
    for (const auto& c : n->elements) {
      if (type_of(c, env, caps, s, depth) != first) return std::nullopt;
    }
    return TypeAndCaps{Type::set(*first), {}};
  }
  const auto& rec = std::get<ast::RecordLit>(v);
  std::map<std::string, AttrType> attrs;
  for (const auto& [k, c] : rec.fields) {
    auto t = type_of(c, env, caps, s, depth);
    if (!t || attrs.count(k)) return std::nullopt;
    attrs[k] = AttrType{*t, true};
  }
  return TypeAndCaps{Type::record(attrs), {}};
}

bool scope_fits(const ScopeConstraint& c, const std::string& type, const Schema& s) {
  if (c.kind == ScopeConstraint::Kind::Eq) return c.uid.type_name() == type;
  if (c.kind == ScopeConstraint::Kind::In) return reachable_types(s, type).count(c.uid.type_name()) > 0;
  return true;
}

}  // namespace

bool validate_policy(const Policy& p, const Schema& s) {
  for (const auto& [action, decl] : s.actions) {
    bool action_fits = true;
    if (p.action.kind == ActionScopeConstraint::Kind::Eq) action_fits = action == p.action.uids[0];
    if (p.action.kind == ActionScopeConstraint::Kind::InSet) {
      auto up = reachable_actions(s, action);
      action_fits = std::any_of(p.action.uids.begin(), p.action.uids.end(),
                                [&](const EntityUID& u) { return up.count(u) > 0; });
    }
    if (!action_fits) continue;
    for (const auto& pt : decl.principal_types) {
      if (!scope_fits(p.principal, pt, s)) continue;
      for (const auto& rt : decl.resource_types) {
        if (!scope_fits(p.resource, rt, s)) continue;
        Env env{pt, action, rt, Type::record(decl.context)};
        for (const auto& c : p.conditions) {
          if (type_of(c.body, env, {}, s, 0) != Type::boolean()) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace cedar::reference
