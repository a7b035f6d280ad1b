#include <algorithm>
#include <limits>

#include "cedar/gen/generators.hpp"

namespace cedar::gen {

std::uint8_t ByteCursor::byte() {
  if (pos_ >= bytes_.size()) return 0;
  return bytes_[pos_++];
}

std::size_t ByteCursor::choose(std::size_t n) {
  if (n <= 1) {
    byte();
    return 0;
  }
  if (exhausted()) return 0;
  std::size_t v = byte();
  if (n > 256) v = (v << 8) | byte();
  return v % n;
}

std::int64_t ByteCursor::integer() {
  switch (choose(8)) {
    case 6: {
      constexpr std::int64_t kExtremes[] = {std::numeric_limits<std::int64_t>::max(),
                                            std::numeric_limits<std::int64_t>::min(),
                                            std::int64_t{1} << 62, -(std::int64_t{1} << 62)};
      return kExtremes[choose(4)];
    }
    case 7: return static_cast<std::int64_t>(choose(1000)) - 500;
    default: return static_cast<std::int64_t>(choose(9)) - 3;
  }
}

namespace {

constexpr std::string_view kTypeNames[] = {"User", "Team", "List", "Application"};
constexpr std::string_view kActionNames[] = {"GetList", "CreateList", "UpdateList", "DeleteList"};
constexpr std::string_view kAttrNames[] = {"owner", "readers", "editors", "name",   "count",
                                           "tags",  "active",  "profile", "display name"};
constexpr std::string_view kIds[] = {"alice", "bob", "l1", "interns", "TinyTodo", "x\"y", "", "été"};

class WorldGen {
 public:
  WorldGen(ByteCursor& c, const Limits& limits) : c_(c), limits_(limits) {}

  World run() {
    std::size_t ntypes = 1 + c_.choose(std::min<std::size_t>(limits_.max_entity_types, std::size(kTypeNames)));
    for (std::size_t i = 0; i < ntypes; ++i) types_.emplace_back(kTypeNames[i]);

    Schema& s = w_.schema;
    for (const auto& t : types_) {
      EntityTypeDecl decl;
      for (const auto& p : types_) {
        if (c_.choose(3) == 2) decl.parent_types.insert(p);
      }
      std::size_t nattrs = c_.choose(limits_.max_attrs + 1);
      for (std::size_t i = 0; i < nattrs; ++i) {
        std::string name(kAttrNames[c_.choose(std::size(kAttrNames))]);
        AttrType at{gen_type(nested_depth()), c_.choose(3) != 2};
        decl.attributes.emplace(std::move(name), std::move(at));
      }
      s.entity_types.emplace(t, std::move(decl));
    }

    std::size_t nactions = 1 + c_.choose(std::min<std::size_t>(limits_.max_actions, std::size(kActionNames)));
    std::vector<EntityUID> action_uids;
    for (std::size_t i = 0; i < nactions; ++i) {
      EntityUID uid({"Action"}, std::string(kActionNames[i]));
      ActionDecl decl;
      decl.principal_types = nonempty_subset();
      decl.resource_types = nonempty_subset();
      std::size_t nctx = c_.choose(3);
      for (std::size_t k = 0; k < nctx; ++k) {
        std::string name(kAttrNames[c_.choose(std::size(kAttrNames))]);
        decl.context.emplace(std::move(name), AttrType{gen_type(nested_depth()), c_.choose(3) != 2});
      }
      for (const auto& earlier : action_uids) {
        if (c_.flip()) decl.parents.insert(earlier);
      }
      action_uids.push_back(uid);
      s.actions.emplace(std::move(uid), std::move(decl));
    }

    // One entity per type, then extras; parents point only to earlier
    // entities, so the hierarchy is acyclic.
    std::vector<EntityUID> order;
    for (const auto& t : types_) order.push_back(fresh_uid(t));
    std::size_t budget = limits_.max_entities > order.size() ? limits_.max_entities - order.size() : 0;
    std::size_t extra = c_.choose(budget + 1);
    for (std::size_t i = 0; i < extra; ++i) order.push_back(fresh_uid(types_[c_.choose(types_.size())]));
    for (const auto& uid : order) by_type_[uid.type_name()].push_back(uid);

    std::map<EntityUID, EntityData> data;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& uid = order[i];
      const auto& decl = s.entity_types.at(uid.type_name());
      EntityData d;
      for (std::size_t j = 0; j < i; ++j) {
        if (decl.parent_types.contains(order[j].type_name()) && c_.flip()) d.parents.insert(order[j]);
      }
      for (const auto& [name, at] : decl.attributes) {
        if (at.required || c_.flip()) d.attrs.emplace(name, gen_value(at.type));
      }
      data.emplace(uid, std::move(d));
    }
    for (const auto& uid : action_uids) {
      data.emplace(uid, EntityData{{}, s.actions.at(uid).parents});
      by_type_["Action"].push_back(uid);
    }
    w_.store = *Entities::make(std::move(data));

    const auto& [action_uid, action] = *std::next(s.actions.begin(), static_cast<long>(c_.choose(s.actions.size())));
    Request& r = w_.request;
    r.action = action_uid;
    r.principal = pick_of_types(action.principal_types);
    r.resource = pick_of_types(action.resource_types);
    r.context = gen_value(Type::record(action.context));
    return std::move(w_);
  }

 private:
  // Levels of nesting below an attribute's own type.
  std::size_t nested_depth() const { return limits_.max_type_depth > 0 ? limits_.max_type_depth - 1 : 0; }

  Type gen_type(std::size_t depth) {
    std::size_t n = depth == 0 ? 4 : 6;
    switch (c_.choose(n)) {
      case 0: return Type::boolean();
      case 1: return Type::integer();
      case 2: return Type::string();
      case 3: return Type::entity(types_[c_.choose(types_.size())]);
      case 4: return Type::set(gen_type(depth - 1));
      default: {
        std::map<std::string, AttrType> attrs;
        std::size_t k = 1 + c_.choose(2);
        for (std::size_t i = 0; i < k; ++i) {
          std::string name(kAttrNames[c_.choose(std::size(kAttrNames))]);
          attrs.emplace(std::move(name), AttrType{gen_type(depth - 1), c_.choose(3) != 2});
        }
        return Type::record(std::move(attrs));
      }
    }
  }

  std::set<std::string> nonempty_subset() {
    std::set<std::string> out{types_[c_.choose(types_.size())]};
    for (const auto& t : types_) {
      if (c_.choose(3) == 2) out.insert(t);
    }
    return out;
  }

  EntityUID fresh_uid(const std::string& type) {
    std::string id(kIds[c_.choose(std::size(kIds))]);
    EntityUID uid({type}, id);
    for (int k = 0; used_.contains(uid); ++k) uid = EntityUID({type}, id + std::to_string(k));
    used_.insert(uid);
    return uid;
  }

  EntityUID pick_of_types(const std::set<std::string>& types) {
    std::vector<EntityUID> pool;
    for (const auto& t : types) {
      const auto& v = by_type_.at(t);
      pool.insert(pool.end(), v.begin(), v.end());
    }
    return pool[c_.choose(pool.size())];
  }

  Value gen_value(const Type& t) {
    if (t.is_bool()) return Value::boolean(c_.flip());
    if (t.is_long()) return Value::integer(c_.integer());
    if (t.is_string()) return Value::string(std::string(kIds[c_.choose(std::size(kIds))]));
    if (t.is_entity()) {
      const auto& pool = by_type_.at(t.entity_name());
      return Value::entity(pool[c_.choose(pool.size())]);
    }
    if (t.is_set()) {
      std::vector<Value> elems;
      std::size_t n = c_.choose(4);
      for (std::size_t i = 0; i < n; ++i) elems.push_back(gen_value(t.element()));
      return Value::set(std::move(elems));
    }
    ValueRecord fields;
    for (const auto& [name, at] : t.attrs()) {
      if (at.required || c_.flip()) fields.emplace(name, gen_value(at.type));
    }
    return Value::record(std::move(fields));
  }

  ByteCursor& c_;
  const Limits& limits_;
  World w_;
  std::vector<std::string> types_;
  std::set<EntityUID> used_;
  std::map<std::string, std::vector<EntityUID>> by_type_;
};

}  // namespace

World gen_world(ByteCursor& c, const Limits& limits) { return WorldGen(c, limits).run(); }

RequestEnv request_env(const World& w) {
  const ActionDecl* decl = w.schema.action(w.request.action);
  return RequestEnv{w.request.principal.type_name(), w.request.action, w.request.resource.type_name(),
                    decl ? decl->context : std::map<std::string, AttrType>{}};
}

std::vector<std::string> schema_attribute_names(const Schema& schema) {
  std::set<std::string> names;
  auto walk = [&](auto&& self, const std::map<std::string, AttrType>& attrs) -> void {
    for (const auto& [name, at] : attrs) {
      names.insert(name);
      const Type* t = &at.type;
      while (t->is_set()) t = &t->element();
      if (t->is_record()) self(self, t->attrs());
    }
  };
  for (const auto& [_, decl] : schema.entity_types) walk(walk, decl.attributes);
  for (const auto& [_, decl] : schema.actions) walk(walk, decl.context);
  return {names.begin(), names.end()};
}

std::string_view mode_name(PolicyMode m) {
  switch (m) {
    case PolicyMode::TypeDirectedABAC: return "abac-typed";
    case PolicyMode::ArbitraryABAC: return "abac";
    case PolicyMode::RBAC: return "rbac";
  }
  return "?";
}

}  // namespace cedar::gen
