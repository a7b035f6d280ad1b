#include <algorithm>
#include <functional>

#include "cedar/gen/generators.hpp"

namespace cedar::gen {

namespace {

constexpr std::string_view kStrings[] = {"", "a", "abc", "a*b", "x\"y", "hello world", "été", "\n"};
constexpr std::string_view kExtraAttrs[] = {"owner", "missing", "name", "if"};
constexpr char32_t kPatternChars[] = {U'a', U'b', U'*', U'"', U'é'};

Pattern gen_pattern(ByteCursor& c) {
  Pattern p;
  std::size_t n = c.choose(5);
  for (std::size_t i = 0; i < n; ++i) {
    if (c.choose(3) == 0) {
      p.push_back(PatternElem::star());
    } else {
      p.push_back(PatternElem::literal(kPatternChars[c.choose(std::size(kPatternChars))]));
    }
  }
  return p;
}

Expr string_literal(ByteCursor& c) { return Expr::string(std::string(kStrings[c.choose(std::size(kStrings))])); }

std::vector<EntityUID> uids_of_type(const Entities& store, const std::string& type) {
  std::vector<EntityUID> out;
  for (const auto& [uid, _] : store.data()) {
    if (uid.type_name() == type) out.push_back(uid);
  }
  return out;
}

// Builds well-typed expressions bottom-up over a finite universe of types.
// md_[i] is the least depth at which universe_[i] can be built.
class TypedGen {
 public:
  TypedGen(ByteCursor& c, const RequestEnv& env, const World& w) : c_(c), w_(w) {
    vars_ = {{Var::Principal, Type::entity(env.principal_type)},
             {Var::Action, Type::entity(env.action.type_name())},
             {Var::Resource, Type::entity(env.resource_type)},
             {Var::Context, Type::record(env.context)}};
    add(Type::boolean());
    add(Type::integer());
    add(Type::string());
    add(Type::set(Type::integer()));
    add(Type::set(Type::string()));
    for (const auto& [uid, _] : w.store.data()) {
      add(Type::entity(uid.type_name()));
      add(Type::set(Type::entity(uid.type_name())));
    }
    for (const auto& [_, decl] : w.schema.entity_types) {
      for (const auto& [n, at] : decl.attributes) add(at.type);
    }
    for (const auto& v : vars_) add(v.type);
  }

  std::optional<Expr> gen(const Type& target, std::size_t depth) {
    std::size_t t = add(target);
    solve();
    if (md_[t] == kInf) return std::nullopt;
    return build(t, std::max<int>(static_cast<int>(std::min<std::size_t>(depth, 64)), md_[t]));
  }

 private:
  static constexpr int kInf = 1 << 20;

  struct VarInfo {
    Var var;
    Type type;
  };
  struct Source {
    std::size_t receiver;
    std::string attr;
    bool required;
  };

  std::size_t index(const Type& t) const {
    for (std::size_t i = 0; i < universe_.size(); ++i) {
      if (universe_[i] == t) return i;
    }
    return universe_.size();
  }

  std::size_t add(const Type& t) {
    std::size_t i = index(t);
    if (i < universe_.size()) return i;
    universe_.push_back(t);
    solved_ = false;
    if (t.is_set()) add(t.element());
    if (t.is_record()) {
      for (const auto& [n, at] : t.attrs()) add(at.type);
    }
    return index(t);
  }

  const std::map<std::string, AttrType>* attrs_of(const Type& t) const {
    static const std::map<std::string, AttrType> kNone;
    if (t.is_record()) return &t.attrs();
    if (t.is_entity()) {
      const auto* decl = w_.schema.entity_type(t.entity_name());
      return decl ? &decl->attributes : &kNone;
    }
    return nullptr;
  }

  bool has_store_entity(const std::string& type) const {
    for (const auto& [uid, _] : w_.store.data()) {
      if (uid.type_name() == type) return true;
    }
    return false;
  }

  bool is_leaf(const Type& t) const {
    if (t.is_bool() || t.is_long() || t.is_string()) return true;
    if (t.is_entity() && has_store_entity(t.entity_name())) return true;
    for (const auto& v : vars_) {
      if (v.type == t) return true;
      if (const auto* attrs = attrs_of(v.type)) {
        for (const auto& [n, at] : *attrs) {
          if (at.required && at.type == t) return true;
        }
      }
    }
    return false;
  }

  void solve() {
    if (solved_) return;
    const std::size_t n = universe_.size();
    md_.assign(n, kInf);
    sources_.assign(n, {});
    for (std::size_t r = 0; r < n; ++r) {
      const auto* attrs = attrs_of(universe_[r]);
      if (!attrs) continue;
      for (const auto& [name, at] : *attrs) {
        sources_[index(at.type)].push_back({r, name, at.required});
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (is_leaf(universe_[i])) md_[i] = 0;
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        int best = md_[i];
        const Type& t = universe_[i];
        if (t.is_set()) best = std::min(best, 1 + md_[index(t.element())]);
        if (t.is_record() && all_required(t)) {
          int worst = 0;
          for (const auto& [nm, at] : t.attrs()) worst = std::max(worst, md_[index(at.type)]);
          best = std::min(best, 1 + worst);
        }
        for (const auto& s : sources_[i]) {
          int need = md_[s.receiver];
          if (!s.required && !t.is_bool()) need = std::max(need, md_[i]);
          best = std::min(best, 1 + need);
        }
        best = std::min(best, kInf);
        if (best < md_[i]) {
          md_[i] = best;
          changed = true;
        }
      }
    }
    solved_ = true;
  }

  static bool all_required(const Type& t) {
    return std::all_of(t.attrs().begin(), t.attrs().end(), [](const auto& kv) { return kv.second.required; });
  }

  bool fits(std::size_t t, int d) const { return md_[t] <= d; }
  bool fits(const Type& t, int d) const {
    std::size_t i = index(t);
    return i < universe_.size() && md_[i] <= d;
  }

  Expr pick(std::vector<std::function<Expr()>>& options) { return options[c_.choose(options.size())](); }

  Expr literal(const Type& t) {
    if (t.is_bool()) return Expr::boolean(c_.choose(2) == 0);
    if (t.is_long()) return Expr::integer(c_.integer());
    if (t.is_string()) return string_literal(c_);
    auto pool = uids_of_type(w_.store, t.entity_name());
    return Expr::entity(pool[c_.choose(pool.size())]);
  }

  Expr build(std::size_t t, int d) {
    const Type ty = universe_[t];
    std::vector<std::function<Expr()>> options;

    if (ty.is_bool() || ty.is_long() || ty.is_string() || (ty.is_entity() && has_store_entity(ty.entity_name()))) {
      options.push_back([&] { return literal(ty); });
    }
    std::vector<Expr> var_leaves;
    for (const auto& v : vars_) {
      if (v.type == ty) var_leaves.push_back(Expr::var(v.var));
      if (const auto* attrs = attrs_of(v.type)) {
        for (const auto& [n, at] : *attrs) {
          if (at.required && at.type == ty) var_leaves.push_back(Expr::get(Expr::var(v.var), n));
        }
      }
    }
    if (!var_leaves.empty()) {
      options.push_back([&] { return var_leaves[c_.choose(var_leaves.size())]; });
    }
    if (ty.is_bool()) {
      options.push_back([&] {
        const auto& v = vars_[c_.choose(vars_.size())];
        return Expr::has(Expr::var(v.var), attr_name(v.type));
      });
    }

    if (d >= 1) {
      const int sub = d - 1;
      if (fits(t, sub)) {
        options.push_back([&, sub] {
          Expr cond = build(index(Type::boolean()), sub);
          Expr then_branch = build(t, sub);
          return Expr::if_(std::move(cond), std::move(then_branch), build(t, sub));
        });
      }
      std::vector<const Source*> usable;
      for (const auto& s : sources_[t]) {
        if (fits(s.receiver, sub) && (s.required || ty.is_bool() || fits(t, sub))) usable.push_back(&s);
      }
      if (!usable.empty()) {
        options.push_back([&, sub, usable] {
          const Source& s = *usable[c_.choose(usable.size())];
          Expr recv = build(s.receiver, sub);
          Expr get = Expr::get(recv, s.attr);
          if (s.required) return get;
          Expr guard = Expr::has(recv, s.attr);
          if (ty.is_bool()) return Expr::and_(std::move(guard), std::move(get));
          return Expr::if_(std::move(guard), std::move(get), build(t, sub));
        });
      }
      if (ty.is_set() && fits(ty.element(), sub)) {
        options.push_back([&, sub] {
          std::size_t e = index(ty.element());
          std::vector<Expr> elems;
          std::size_t n = 1 + c_.choose(3);
          for (std::size_t i = 0; i < n; ++i) elems.push_back(build(e, sub));
          return Expr::set(std::move(elems));
        });
      }
      if (ty.is_record() && all_required(ty) &&
          std::all_of(ty.attrs().begin(), ty.attrs().end(), [&](const auto& kv) { return fits(kv.second.type, sub); })) {
        options.push_back([&, sub] {
          std::vector<std::pair<std::string, Expr>> fields;
          for (const auto& [n, at] : ty.attrs()) fields.emplace_back(n, build(index(at.type), sub));
          return Expr::record(std::move(fields));
        });
      }
      if (ty.is_bool()) add_bool_ops(options, sub);
      if (ty.is_long()) {
        std::size_t l = index(Type::integer());
        options.push_back([&, sub, l] {
          Expr a = build(l, sub);
          return Expr::binary(BinaryOp::Add, std::move(a), build(l, sub));
        });
        options.push_back([&, sub, l] {
          Expr a = build(l, sub);
          return Expr::binary(BinaryOp::Sub, std::move(a), build(l, sub));
        });
        options.push_back([&, sub, l] { return Expr::neg(build(l, sub)); });
      }
    }
    return pick(options);
  }

  std::string attr_name(const Type& receiver) {
    std::vector<std::string> names;
    if (const auto* attrs = attrs_of(receiver)) {
      for (const auto& [n, _] : *attrs) names.push_back(n);
    }
    for (auto n : kExtraAttrs) names.emplace_back(n);
    return names[c_.choose(names.size())];
  }

  std::vector<std::size_t> types_where(int d, const std::function<bool(const Type&)>& pred) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < universe_.size(); ++i) {
      if (md_[i] <= d && pred(universe_[i])) out.push_back(i);
    }
    return out;
  }

  void add_bool_ops(std::vector<std::function<Expr()>>& options, int sub) {
    const std::size_t b = index(Type::boolean());
    const std::size_t l = index(Type::integer());
    const std::size_t s = index(Type::string());
    options.push_back([&, sub, b] { return Expr::not_(build(b, sub)); });
    options.push_back([&, sub, b] {
      Expr a = build(b, sub);
      return Expr::and_(std::move(a), build(b, sub));
    });
    options.push_back([&, sub, b] {
      Expr a = build(b, sub);
      return Expr::or_(std::move(a), build(b, sub));
    });
    options.push_back([&, sub] {
      BinaryOp op = c_.flip() ? BinaryOp::Neq : BinaryOp::Eq;
      auto any = types_where(sub, [](const Type&) { return true; });
      auto ents = types_where(sub, [](const Type& t) { return t.is_entity(); });
      if (c_.choose(4) == 3 && !ents.empty()) {
        Expr a = build(ents[c_.choose(ents.size())], sub);
        return Expr::binary(op, std::move(a), build(ents[c_.choose(ents.size())], sub));
      }
      std::size_t u = any[c_.choose(any.size())];
      Expr a = build(u, sub);
      return Expr::binary(op, std::move(a), build(u, sub));
    });
    options.push_back([&, sub, l] {
      constexpr BinaryOp kOps[] = {BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
      BinaryOp op = kOps[c_.choose(4)];
      Expr a = build(l, sub);
      return Expr::binary(op, std::move(a), build(l, sub));
    });
    auto ents = types_where(sub, [](const Type& t) { return t.is_entity(); });
    auto ent_sets = types_where(sub, [](const Type& t) { return t.is_set() && t.element().is_entity(); });
    if (!ents.empty()) {
      options.push_back([&, sub, ents, ent_sets] {
        Expr lhs = build(ents[c_.choose(ents.size())], sub);
        if (!ent_sets.empty() && c_.flip()) {
          return Expr::binary(BinaryOp::In, std::move(lhs), build(ent_sets[c_.choose(ent_sets.size())], sub));
        }
        return Expr::binary(BinaryOp::In, std::move(lhs), build(ents[c_.choose(ents.size())], sub));
      });
    }
    auto sets = types_where(sub, [&](const Type& t) { return t.is_set() && fits(t.element(), sub); });
    if (!sets.empty()) {
      options.push_back([&, sub, sets] {
        std::size_t st = sets[c_.choose(sets.size())];
        Expr set = build(st, sub);
        return Expr::binary(BinaryOp::Contains, std::move(set), build(index(universe_[st].element()), sub));
      });
    }
    options.push_back([&, sub, s] {
      Expr operand = build(s, sub);
      return Expr::like(std::move(operand), gen_pattern(c_));
    });
    auto receivers = types_where(sub, [](const Type& t) { return t.is_entity() || t.is_record(); });
    if (!receivers.empty()) {
      options.push_back([&, sub, receivers] {
        std::size_t r = receivers[c_.choose(receivers.size())];
        Expr recv = build(r, sub);
        return Expr::has(std::move(recv), attr_name(universe_[r]));
      });
    }
  }

  ByteCursor& c_;
  const World& w_;
  std::vector<VarInfo> vars_;
  std::vector<Type> universe_;
  std::vector<int> md_;
  std::vector<std::vector<Source>> sources_;
  bool solved_ = false;
};

class ArbitraryGen {
 public:
  ArbitraryGen(ByteCursor& c, const World& w) : c_(c), attrs_(schema_attribute_names(w.schema)) {
    for (const auto& [uid, _] : w.store.data()) uids_.push_back(uid);
  }

  Expr build(std::size_t depth) {
    std::size_t n = depth == 0 ? 5 : 16;
    switch (c_.choose(n)) {
      case 0: return Expr::boolean(c_.choose(2) == 0);
      case 1: return Expr::integer(c_.integer());
      case 2: return string_literal(c_);
      case 3: return Expr::var(static_cast<Var>(c_.choose(4)));
      case 4: return Expr::entity(uids_[c_.choose(uids_.size())]);
      case 5: return Expr::not_(build(depth - 1));
      case 6: return Expr::neg(build(depth - 1));
      case 7: {
        Expr a = build(depth - 1);
        return c_.flip() ? Expr::or_(std::move(a), build(depth - 1)) : Expr::and_(std::move(a), build(depth - 1));
      }
      case 8: {
        Expr a = build(depth - 1);
        Expr b = build(depth - 1);
        return Expr::if_(std::move(a), std::move(b), build(depth - 1));
      }
      case 9:
      case 10: {
        auto op = static_cast<BinaryOp>(c_.choose(10));
        Expr a = build(depth - 1);
        return Expr::binary(op, std::move(a), build(depth - 1));
      }
      case 11: {
        Expr a = build(depth - 1);
        return Expr::like(std::move(a), gen_pattern(c_));
      }
      case 12:
        if (attrs_.empty()) return build(0);
        return Expr::has(build(depth - 1), attrs_[c_.choose(attrs_.size())]);
      case 13:
        if (attrs_.empty()) return build(0);
        return Expr::get(build(depth - 1), attrs_[c_.choose(attrs_.size())]);
      case 14: {
        std::vector<Expr> elems;
        std::size_t k = c_.choose(4);
        for (std::size_t i = 0; i < k; ++i) elems.push_back(build(depth - 1));
        return Expr::set(std::move(elems));
      }
      default: {
        std::vector<std::pair<std::string, Expr>> fields;
        std::set<std::string> seen;
        std::size_t k = attrs_.empty() ? 0 : c_.choose(3);
        for (std::size_t i = 0; i < k; ++i) {
          const auto& name = attrs_[c_.choose(attrs_.size())];
          Expr v = build(depth - 1);
          if (seen.insert(name).second) fields.emplace_back(name, std::move(v));
        }
        return Expr::record(std::move(fields));
      }
    }
  }

 private:
  ByteCursor& c_;
  std::vector<std::string> attrs_;
  std::vector<EntityUID> uids_;
};

}  // namespace

std::optional<Expr> gen_expr(ByteCursor& c, const RequestEnv& env, const Type& target, const World& w,
                             std::size_t depth) {
  return TypedGen(c, env, w).gen(target, depth);
}

Expr gen_arbitrary_expr(ByteCursor& c, const World& w, std::size_t depth) {
  return ArbitraryGen(c, w).build(depth);
}

}  // namespace cedar::gen
