#include <algorithm>

#include "cedar/gen/generators.hpp"

namespace cedar::gen {

namespace {

std::vector<EntityUID> principals_and_resources(const World& w) {
  std::vector<EntityUID> out;
  for (const auto& [uid, _] : w.store.data()) {
    if (!w.schema.action(uid)) out.push_back(uid);
  }
  return out;
}

std::vector<EntityUID> actions(const World& w) {
  std::vector<EntityUID> out;
  for (const auto& [uid, _] : w.schema.actions) out.push_back(uid);
  return out;
}

ScopeConstraint gen_scope(ByteCursor& c, const std::vector<EntityUID>& pool) {
  switch (c.choose(3)) {
    case 1: return ScopeConstraint::eq(pool[c.choose(pool.size())]);
    case 2: return ScopeConstraint::in(pool[c.choose(pool.size())]);
    default: return ScopeConstraint::any();
  }
}

ActionScopeConstraint gen_action_scope(ByteCursor& c, const std::vector<EntityUID>& pool) {
  switch (c.choose(3)) {
    case 1: return ActionScopeConstraint::eq(pool[c.choose(pool.size())]);
    case 2: {
      std::vector<EntityUID> uids{pool[c.choose(pool.size())]};
      if (c.flip()) uids.push_back(pool[c.choose(pool.size())]);
      return ActionScopeConstraint::in(std::move(uids));
    }
    default: return ActionScopeConstraint::any();
  }
}

Policy base_policy(ByteCursor& c, const World& w, std::size_t index) {
  Policy p;
  p.id = "policy" + std::to_string(index);
  p.effect = c.choose(3) == 2 ? Effect::Forbid : Effect::Permit;
  auto pool = principals_and_resources(w);
  p.principal = gen_scope(c, pool);
  p.action = gen_action_scope(c, actions(w));
  p.resource = gen_scope(c, pool);
  return p;
}

// Local restatement of scope/env compatibility; kept separate from the
// validator so that generated inputs do not depend on the code under test.
bool entity_scope_admits(const ScopeConstraint& s, const std::string& type, const Schema& schema) {
  switch (s.kind) {
    case ScopeConstraint::Kind::Any: return true;
    case ScopeConstraint::Kind::Eq: return s.uid.type_name() == type;
    case ScopeConstraint::Kind::In: return schema.ancestor_types(type).contains(s.uid.type_name());
  }
  return false;
}

bool scope_admits(const Policy& p, const RequestEnv& env, const Schema& schema) {
  if (!entity_scope_admits(p.principal, env.principal_type, schema)) return false;
  if (!entity_scope_admits(p.resource, env.resource_type, schema)) return false;
  if (p.action.kind == ActionScopeConstraint::Kind::Any) return true;
  auto ancestors = schema.action_ancestors(env.action);
  return std::any_of(p.action.uids.begin(), p.action.uids.end(),
                     [&](const EntityUID& u) { return ancestors.contains(u); });
}

std::vector<RequestEnv> all_envs(const Schema& schema) {
  std::vector<RequestEnv> out;
  for (const auto& [uid, decl] : schema.actions) {
    for (const auto& pt : decl.principal_types) {
      for (const auto& rt : decl.resource_types) out.push_back({pt, uid, rt, decl.context});
    }
  }
  return out;
}

// Replaces the `target`-th node (preorder) with `replacement`.
Expr replace_subterm(const Expr& e, std::size_t& target, const Expr& replacement) {
  if (target == 0) return replacement;
  --target;
  auto r = [&](const Expr& x) { return replace_subterm(x, target, replacement); };
  return std::visit(
      Overloaded{
          [&](const ast::Lit&) { return e; },
          [&](const ast::EntityLit&) { return e; },
          [&](const ast::VarRef&) { return e; },
          [&](const ast::Not& n) { return Expr::not_(r(n.operand)); },
          [&](const ast::Neg& n) { return Expr::neg(r(n.operand)); },
          [&](const ast::And& n) {
            Expr a = r(n.lhs);
            return Expr::and_(std::move(a), r(n.rhs));
          },
          [&](const ast::Or& n) {
            Expr a = r(n.lhs);
            return Expr::or_(std::move(a), r(n.rhs));
          },
          [&](const ast::If& n) {
            Expr a = r(n.cond);
            Expr b = r(n.then_branch);
            return Expr::if_(std::move(a), std::move(b), r(n.else_branch));
          },
          [&](const ast::Binary& n) {
            Expr a = r(n.lhs);
            return Expr::binary(n.op, std::move(a), r(n.rhs));
          },
          [&](const ast::Like& n) { return Expr::like(r(n.operand), n.pattern); },
          [&](const ast::HasAttr& n) { return Expr::has(r(n.operand), n.attr); },
          [&](const ast::GetAttr& n) { return Expr::get(r(n.operand), n.attr); },
          [&](const ast::SetLit& n) {
            std::vector<Expr> elems;
            for (const auto& x : n.elements) elems.push_back(r(x));
            return Expr::set(std::move(elems));
          },
          [&](const ast::RecordLit& n) {
            std::vector<std::pair<std::string, Expr>> fields;
            for (const auto& [k, x] : n.fields) fields.emplace_back(k, r(x));
            return Expr::record(std::move(fields));
          },
      },
      e.node().v);
}

Policy type_directed(ByteCursor& c, const World& w, const Limits& limits, bool perturb) {
  Policy p = base_policy(c, w, 0);
  RequestEnv env = request_env(w);
  // Keep the random scope only if the request's env is its sole match, so
  // the condition is checked under exactly the env it was built for.
  std::size_t matches = 0;
  bool own = false;
  for (const auto& e : all_envs(w.schema)) {
    if (scope_admits(p, e, w.schema)) {
      ++matches;
      own = own || e == env;
    }
  }
  if (matches != 1 || !own) {
    p.principal = ScopeConstraint::eq(w.request.principal);
    p.action = ActionScopeConstraint::eq(w.request.action);
    p.resource = ScopeConstraint::eq(w.request.resource);
  }
  std::size_t depth = c.choose(limits.max_condition_depth + 1);
  Expr body = *gen_expr(c, env, Type::boolean(), w, depth);
  if (perturb && c.choose(16) == 15) {
    std::size_t at = c.choose(expr_size(body));
    body = replace_subterm(body, at, gen_arbitrary_expr(c, w, 1 + c.choose(2)));
  }
  p.conditions.push_back({c.choose(4) == 3 ? ConditionKind::Unless : ConditionKind::When, std::move(body)});
  return p;
}

}  // namespace

PolicySet gen_policies(PolicyMode mode, ByteCursor& c, const World& w, const Limits& limits, bool perturb) {
  std::vector<Policy> out;
  switch (mode) {
    case PolicyMode::TypeDirectedABAC: out.push_back(type_directed(c, w, limits, perturb)); break;
    case PolicyMode::ArbitraryABAC: {
      Policy p = base_policy(c, w, 0);
      Expr body = gen_arbitrary_expr(c, w, c.choose(limits.max_arbitrary_depth + 1));
      p.conditions.push_back({c.choose(4) == 3 ? ConditionKind::Unless : ConditionKind::When, std::move(body)});
      out.push_back(std::move(p));
      break;
    }
    case PolicyMode::RBAC: {
      std::size_t n = 1 + c.choose(limits.max_rbac_policies);
      for (std::size_t i = 0; i < n; ++i) out.push_back(base_policy(c, w, i));
      break;
    }
  }
  return *PolicySet::make(std::move(out));
}

}  // namespace cedar::gen
