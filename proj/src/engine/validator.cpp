#include "cedar/validator.hpp"

namespace cedar {

void CapabilitySet::add(const Expr& receiver, const std::string& attr) {
  caps_.emplace(dump(receiver), attr);
}

bool CapabilitySet::contains(const Expr& receiver, const std::string& attr) const {
  return caps_.contains({dump(receiver), attr});
}

void CapabilitySet::merge(const CapabilitySet& other) {
  caps_.insert(other.caps_.begin(), other.caps_.end());
}

std::string to_string(const RequestEnv& env) {
  return "(" + env.principal_type + ", " + to_string(env.action) + ", " + env.resource_type + ")";
}

std::vector<RequestEnv> request_envs(const Schema& schema) {
  std::vector<RequestEnv> envs;
  for (const auto& [uid, decl] : schema.actions) {
    for (const auto& p : decl.principal_types) {
      for (const auto& r : decl.resource_types) envs.push_back({p, uid, r, decl.context});
    }
  }
  return envs;
}

namespace {

bool entity_scope_compatible(const ScopeConstraint& c, const std::string& type,
                             const Schema& schema) {
  switch (c.kind) {
    case ScopeConstraint::Kind::Any: return true;
    case ScopeConstraint::Kind::Eq: return c.uid.type_name() == type;
    case ScopeConstraint::Kind::In: return schema.ancestor_types(type).contains(c.uid.type_name());
  }
  return false;
}

using Checked = Expected<Typed, TypeCheckError>;

class TypeChecker {
 public:
  TypeChecker(const RequestEnv& env, const Schema& schema) : env_(env), schema_(schema) {}

  Checked check(const Expr& e, const CapabilitySet& caps) {
    if (depth_ >= kMaxTypecheckDepth) return fail(e, "typecheck depth limit");
    ++depth_;
    Checked r = std::visit([&](const auto& n) { return check_node(e, n, caps); }, e.node().v);
    --depth_;
    return r;
  }

 private:
  static Checked fail(const Expr& e, std::string msg) {
    return Unexpected(TypeCheckError{dump(e), std::move(msg)});
  }
  static Checked ok(Type t, CapabilitySet caps = {}) { return Typed{std::move(t), std::move(caps)}; }

  static Checked mismatch(const Expr& e, const std::string& expected, const Type& got) {
    return fail(e, "expected " + expected + ", got " + to_string(got));
  }

  Checked expect(const Expr& e, const CapabilitySet& caps, const Type& want, const char* name) {
    auto r = check(e, caps);
    if (!r) return r;
    if (!(r->type == want)) return mismatch(e, name, r->type);
    return r;
  }

  Checked check_node(const Expr&, const ast::Lit& n, const CapabilitySet&) {
    if (n.value.is_bool()) return ok(Type::boolean());
    if (n.value.is_long()) return ok(Type::integer());
    return ok(Type::string());
  }

  Checked check_node(const Expr& e, const ast::EntityLit& n, const CapabilitySet&) {
    std::string type = n.uid.type_name();
    if (!schema_.knows_entity_type(type)) return fail(e, "unknown entity type " + type);
    return ok(Type::entity(type));
  }

  Checked check_node(const Expr&, const ast::VarRef& n, const CapabilitySet&) {
    switch (n.var) {
      case Var::Principal: return ok(Type::entity(env_.principal_type));
      case Var::Action: return ok(Type::entity(env_.action.type_name()));
      case Var::Resource: return ok(Type::entity(env_.resource_type));
      case Var::Context: return ok(Type::record(env_.context));
    }
    return ok(Type::boolean());
  }

  Checked check_node(const Expr&, const ast::Not& n, const CapabilitySet& caps) {
    auto r = expect(n.operand, caps, Type::boolean(), "Bool");
    if (!r) return r;
    return ok(Type::boolean());
  }

  Checked check_node(const Expr&, const ast::Neg& n, const CapabilitySet& caps) {
    auto r = expect(n.operand, caps, Type::integer(), "Long");
    if (!r) return r;
    return ok(Type::integer());
  }

  Checked check_node(const Expr&, const ast::And& n, const CapabilitySet& caps) {
    auto lhs = expect(n.lhs, caps, Type::boolean(), "Bool");
    if (!lhs) return lhs;
    CapabilitySet inner = caps;
    inner.merge(lhs->caps_if_true);
    auto rhs = expect(n.rhs, inner, Type::boolean(), "Bool");
    if (!rhs) return rhs;
    CapabilitySet out = std::move(lhs->caps_if_true);
    out.merge(rhs->caps_if_true);
    return ok(Type::boolean(), std::move(out));
  }

  Checked check_node(const Expr&, const ast::Or& n, const CapabilitySet& caps) {
    auto lhs = expect(n.lhs, caps, Type::boolean(), "Bool");
    if (!lhs) return lhs;
    auto rhs = expect(n.rhs, caps, Type::boolean(), "Bool");
    if (!rhs) return rhs;
    return ok(Type::boolean());
  }

  Checked check_node(const Expr& e, const ast::If& n, const CapabilitySet& caps) {
    auto cond = expect(n.cond, caps, Type::boolean(), "Bool");
    if (!cond) return cond;
    CapabilitySet inner = caps;
    inner.merge(cond->caps_if_true);
    auto then_t = check(n.then_branch, inner);
    if (!then_t) return then_t;
    auto else_t = check(n.else_branch, caps);
    if (!else_t) return else_t;
    if (!(then_t->type == else_t->type)) {
      return fail(e, "if branches differ: " + to_string(then_t->type) + " vs " +
                         to_string(else_t->type));
    }
    return ok(then_t->type);
  }

  Checked check_node(const Expr& e, const ast::Binary& n, const CapabilitySet& caps) {
    auto lhs = check(n.lhs, caps);
    if (!lhs) return lhs;
    auto rhs = check(n.rhs, caps);
    if (!rhs) return rhs;
    const Type& a = lhs->type;
    const Type& b = rhs->type;
    switch (n.op) {
      case BinaryOp::Eq:
      case BinaryOp::Neq:
        if (a == b || (a.is_entity() && b.is_entity())) return ok(Type::boolean());
        return fail(e, "cannot compare " + to_string(a) + " with " + to_string(b));
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        if (!a.is_long()) return mismatch(n.lhs, "Long", a);
        if (!b.is_long()) return mismatch(n.rhs, "Long", b);
        return ok(Type::boolean());
      case BinaryOp::Add:
      case BinaryOp::Sub:
        if (!a.is_long()) return mismatch(n.lhs, "Long", a);
        if (!b.is_long()) return mismatch(n.rhs, "Long", b);
        return ok(Type::integer());
      case BinaryOp::In:
        if (!a.is_entity()) return mismatch(n.lhs, "an entity", a);
        if (b.is_entity() || (b.is_set() && b.element().is_entity())) return ok(Type::boolean());
        return mismatch(n.rhs, "an entity or set of entities", b);
      case BinaryOp::Contains:
        if (!a.is_set()) return mismatch(n.lhs, "a set", a);
        if (a.element() == b || (a.element().is_entity() && b.is_entity())) {
          return ok(Type::boolean());
        }
        return mismatch(n.rhs, to_string(a.element()), b);
    }
    return fail(e, "unknown operator");
  }

  Checked check_node(const Expr&, const ast::Like& n, const CapabilitySet& caps) {
    auto r = expect(n.operand, caps, Type::string(), "String");
    if (!r) return r;
    return ok(Type::boolean());
  }

  // Declared attributes of an entity or record type; nullopt for other types.
  std::optional<std::map<std::string, AttrType>> attrs_of(const Type& t) const {
    if (t.is_record()) return t.attrs();
    if (t.is_entity()) {
      if (const auto* decl = schema_.entity_type(t.entity_name())) return decl->attributes;
      return std::map<std::string, AttrType>{};
    }
    return std::nullopt;
  }

  Checked check_node(const Expr&, const ast::HasAttr& n, const CapabilitySet& caps) {
    auto r = check(n.operand, caps);
    if (!r) return r;
    auto attrs = attrs_of(r->type);
    if (!attrs) return mismatch(n.operand, "an entity or record", r->type);
    CapabilitySet out;
    auto it = attrs->find(n.attr);
    if (it != attrs->end() && !it->second.required) out.add(n.operand, n.attr);
    return ok(Type::boolean(), std::move(out));
  }

  Checked check_node(const Expr& e, const ast::GetAttr& n, const CapabilitySet& caps) {
    auto r = check(n.operand, caps);
    if (!r) return r;
    auto attrs = attrs_of(r->type);
    if (!attrs) return mismatch(n.operand, "an entity or record", r->type);
    auto it = attrs->find(n.attr);
    if (it == attrs->end()) {
      return fail(e, "attribute " + n.attr + " is not declared on " + to_string(r->type));
    }
    if (!it->second.required && !caps.contains(n.operand, n.attr)) {
      return fail(e, "optional attribute " + n.attr + " accessed without a `has` guard");
    }
    return ok(it->second.type);
  }

  Checked check_node(const Expr& e, const ast::SetLit& n, const CapabilitySet& caps) {
    if (n.elements.empty()) return fail(e, "cannot infer the element type of an empty set");
    std::optional<Type> elem;
    for (const auto& c : n.elements) {
      auto r = check(c, caps);
      if (!r) return r;
      if (elem && !(*elem == r->type)) {
        return fail(e, "set elements differ: " + to_string(*elem) + " vs " + to_string(r->type));
      }
      elem = r->type;
    }
    return ok(Type::set(*elem));
  }

  Checked check_node(const Expr& e, const ast::RecordLit& n, const CapabilitySet& caps) {
    std::map<std::string, AttrType> attrs;
    for (const auto& [name, c] : n.fields) {
      auto r = check(c, caps);
      if (!r) return r;
      if (!attrs.emplace(name, AttrType{r->type, true}).second) {
        return fail(e, "duplicate record key " + name);
      }
    }
    return ok(Type::record(std::move(attrs)));
  }

  const RequestEnv& env_;
  const Schema& schema_;
  std::size_t depth_ = 0;
};

}  // namespace

bool env_matches_scope(const Policy& p, const RequestEnv& env, const Schema& schema) {
  if (!entity_scope_compatible(p.principal, env.principal_type, schema)) return false;
  if (!entity_scope_compatible(p.resource, env.resource_type, schema)) return false;
  switch (p.action.kind) {
    case ActionScopeConstraint::Kind::Any: return true;
    case ActionScopeConstraint::Kind::Eq: return env.action == p.action.uids.front();
    case ActionScopeConstraint::Kind::InSet: {
      auto anc = schema.action_ancestors(env.action);
      for (const auto& u : p.action.uids) {
        if (anc.contains(u)) return true;
      }
      return false;
    }
  }
  return false;
}

Expected<Typed, TypeCheckError> typecheck(const Expr& e, const RequestEnv& env,
                                          const CapabilitySet& caps, const Schema& schema) {
  return TypeChecker(env, schema).check(e, caps);
}

std::vector<TypeCheckError> validate_policy(const Policy& p, const Schema& schema) {
  std::vector<TypeCheckError> errors;
  for (const auto& env : request_envs(schema)) {
    if (!env_matches_scope(p, env, schema)) continue;
    for (const auto& cond : p.conditions) {
      auto r = typecheck(cond.body, env, {}, schema);
      if (!r) {
        auto err = r.error();
        err.message = to_string(env) + ": " + err.message;
        errors.push_back(std::move(err));
      } else if (!r->type.is_bool()) {
        errors.push_back({dump(cond.body), to_string(env) + ": condition has type " +
                                               to_string(r->type) + ", expected Bool"});
      }
    }
  }
  return errors;
}

std::map<std::string, std::vector<TypeCheckError>> validate_policy_set(const PolicySet& ps,
                                                                       const Schema& schema) {
  std::map<std::string, std::vector<TypeCheckError>> out;
  for (const auto& p : ps) {
    auto errs = validate_policy(p, schema);
    if (!errs.empty()) out.emplace(p.id, std::move(errs));
  }
  return out;
}

}  // namespace cedar
