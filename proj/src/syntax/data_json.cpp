#include "cedar/data_json.hpp"

#include <json.hpp>

namespace cedar {

using nlohmann::json;

namespace {

struct JsonError {
  std::string path;
  std::string message;
};

template <class T>
using J = Expected<T, JsonError>;

Unexpected<JsonError> fail(const std::string& path, std::string msg) {
  return Unexpected(JsonError{path, std::move(msg)});
}

std::string quote_key(const std::string& k) { return is_identifier(k) ? "." + k : "[\"" + k + "\"]"; }

J<Ok> require_object(const json& j, const std::string& path) {
  if (!j.is_object()) return fail(path, "expected an object");
  return Ok{};
}

J<Ok> only_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) return fail(path + quote_key(it.key()), "unknown key");
  }
  return Ok{};
}

J<std::string> get_string(const json& j, const std::string& path) {
  if (!j.is_string()) return fail(path, "expected a string");
  return j.get<std::string>();
}

J<std::string> type_name(const json& j, const std::string& path) {
  auto s = get_string(j, path);
  if (!s) return s;
  std::string_view rest = *s;
  while (true) {
    auto pos = rest.find("::");
    auto seg = rest.substr(0, pos);
    if (!is_identifier(seg)) return fail(path, "invalid entity type name");
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 2);
  }
  return s;
}

J<std::vector<std::string>> string_list(const json& j, const std::string& path) {
  if (!j.is_array()) return fail(path, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto s = type_name(j[i], path + "[" + std::to_string(i) + "]");
    if (!s) return Unexpected(std::move(s).error());
    out.push_back(std::move(*s));
  }
  return out;
}

J<EntityUID> uid_from(const json& j, const std::string& path) {
  if (auto r = require_object(j, path); !r) return Unexpected(std::move(r).error());
  if (auto r = only_keys(j, path, {"type", "id"}); !r) return Unexpected(std::move(r).error());
  if (!j.contains("type")) return fail(path + ".type", "missing");
  if (!j.contains("id")) return fail(path + ".id", "missing");
  auto type = type_name(j["type"], path + ".type");
  if (!type) return Unexpected(std::move(type).error());
  auto id = get_string(j["id"], path + ".id");
  if (!id) return Unexpected(std::move(id).error());
  return EntityUID::of(*type, std::move(*id));
}

J<Value> value_from(const json& j, const std::string& path) {
  switch (j.type()) {
    case json::value_t::boolean: return Value::boolean(j.get<bool>());
    case json::value_t::number_integer: return Value::integer(j.get<std::int64_t>());
    case json::value_t::number_unsigned: {
      auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) return fail(path, "integer out of 64-bit range");
      return Value::integer(static_cast<std::int64_t>(u));
    }
    case json::value_t::number_float: return fail(path, "expected an integer");
    case json::value_t::string: return Value::string(j.get<std::string>());
    case json::value_t::array: {
      std::vector<Value> elems;
      for (std::size_t i = 0; i < j.size(); ++i) {
        auto v = value_from(j[i], path + "[" + std::to_string(i) + "]");
        if (!v) return v;
        elems.push_back(std::move(*v));
      }
      return Value::set(std::move(elems));
    }
    case json::value_t::object: {
      if (j.contains("__entity")) {
        if (j.size() != 1) return fail(path, "entity reference must have only __entity");
        auto uid = uid_from(j["__entity"], path + ".__entity");
        if (!uid) return Unexpected(std::move(uid).error());
        return Value::entity(std::move(*uid));
      }
      ValueRecord fields;
      for (auto it = j.begin(); it != j.end(); ++it) {
        auto v = value_from(it.value(), path + quote_key(it.key()));
        if (!v) return v;
        fields.emplace(it.key(), std::move(*v));
      }
      return Value::record(std::move(fields));
    }
    default: return fail(path, "unsupported JSON value");
  }
}

J<AttrType> attr_type_from(const json& j, const std::string& path, bool attr_position);

J<std::map<std::string, AttrType>> attributes_from(const json& j, const std::string& path) {
  if (auto r = require_object(j, path); !r) return Unexpected(std::move(r).error());
  std::map<std::string, AttrType> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto t = attr_type_from(it.value(), path + quote_key(it.key()), true);
    if (!t) return Unexpected(std::move(t).error());
    out.emplace(it.key(), std::move(*t));
  }
  return out;
}

J<AttrType> attr_type_from(const json& j, const std::string& path, bool attr_position) {
  if (auto r = require_object(j, path); !r) return Unexpected(std::move(r).error());
  if (!j.contains("type")) return fail(path + ".type", "missing");
  auto kind = get_string(j["type"], path + ".type");
  if (!kind) return Unexpected(std::move(kind).error());
  AttrType out;
  if (j.contains("required")) {
    if (!attr_position) return fail(path + ".required", "only allowed on attributes");
    if (!j["required"].is_boolean()) return fail(path + ".required", "expected a boolean");
    out.required = j["required"].get<bool>();
  }
  auto keys = [&](std::initializer_list<std::string_view> extra) {
    std::vector<std::string_view> all{"type", "required"};
    all.insert(all.end(), extra);
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (std::find(all.begin(), all.end(), it.key()) == all.end()) {
        return J<Ok>(fail(path + quote_key(it.key()), "unknown key"));
      }
    }
    return J<Ok>(Ok{});
  };
  J<Ok> checked = Ok{};
  if (*kind == "Boolean" || *kind == "Long" || *kind == "String") {
    checked = keys({});
    out.type = *kind == "Boolean" ? Type::boolean() : *kind == "Long" ? Type::integer() : Type::string();
  } else if (*kind == "Entity") {
    checked = keys({"name"});
    if (!j.contains("name")) return fail(path + ".name", "missing");
    auto name = type_name(j["name"], path + ".name");
    if (!name) return Unexpected(std::move(name).error());
    out.type = Type::entity(std::move(*name));
  } else if (*kind == "Set") {
    checked = keys({"element"});
    if (!j.contains("element")) return fail(path + ".element", "missing");
    auto elem = attr_type_from(j["element"], path + ".element", false);
    if (!elem) return elem;
    out.type = Type::set(std::move(elem->type));
  } else if (*kind == "Record") {
    checked = keys({"attributes"});
    std::map<std::string, AttrType> attrs;
    if (j.contains("attributes")) {
      auto a = attributes_from(j["attributes"], path + ".attributes");
      if (!a) return Unexpected(std::move(a).error());
      attrs = std::move(*a);
    }
    out.type = Type::record(std::move(attrs));
  } else {
    return fail(path + ".type", "unknown type " + *kind);
  }
  if (!checked) return Unexpected(std::move(checked).error());
  return out;
}

J<Entities> entities_from(const json& j) {
  if (!j.is_array()) return fail("$", "expected an array");
  std::map<EntityUID, EntityData> data;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string path = "$[" + std::to_string(i) + "]";
    const json& e = j[i];
    if (auto r = require_object(e, path); !r) return Unexpected(std::move(r).error());
    if (auto r = only_keys(e, path, {"uid", "attrs", "parents"}); !r) return Unexpected(std::move(r).error());
    if (!e.contains("uid")) return fail(path + ".uid", "missing");
    auto uid = uid_from(e["uid"], path + ".uid");
    if (!uid) return Unexpected(std::move(uid).error());
    EntityData d;
    if (e.contains("attrs")) {
      if (!e["attrs"].is_object()) return fail(path + ".attrs", "expected an object");
      auto rec = value_from(e["attrs"], path + ".attrs");
      if (!rec) return Unexpected(std::move(rec).error());
      if (!rec->is_record()) return fail(path + ".attrs", "expected a record");
      d.attrs = rec->as_record();
    }
    if (e.contains("parents")) {
      const json& ps = e["parents"];
      if (!ps.is_array()) return fail(path + ".parents", "expected an array");
      for (std::size_t k = 0; k < ps.size(); ++k) {
        auto p = uid_from(ps[k], path + ".parents[" + std::to_string(k) + "]");
        if (!p) return Unexpected(std::move(p).error());
        d.parents.insert(std::move(*p));
      }
    }
    if (!data.emplace(std::move(*uid), std::move(d)).second) return fail(path + ".uid", "duplicate entity");
  }
  auto store = Entities::make(std::move(data));
  if (!store) return fail("$", store.error());
  return std::move(*store);
}

J<Schema> schema_from(const json& j) {
  if (auto r = require_object(j, "$"); !r) return Unexpected(std::move(r).error());
  if (auto r = only_keys(j, "$", {"entityTypes", "actions"}); !r) return Unexpected(std::move(r).error());
  Schema schema;
  if (j.contains("entityTypes")) {
    const json& ets = j["entityTypes"];
    if (auto r = require_object(ets, "$.entityTypes"); !r) return Unexpected(std::move(r).error());
    for (auto it = ets.begin(); it != ets.end(); ++it) {
      std::string path = "$.entityTypes" + quote_key(it.key());
      auto name = type_name(it.key(), path);
      if (!name) return Unexpected(std::move(name).error());
      const json& et = it.value();
      if (auto r = require_object(et, path); !r) return Unexpected(std::move(r).error());
      if (auto r = only_keys(et, path, {"attributes", "memberOfTypes"}); !r) {
        return Unexpected(std::move(r).error());
      }
      EntityTypeDecl decl;
      if (et.contains("attributes")) {
        auto a = attributes_from(et["attributes"], path + ".attributes");
        if (!a) return Unexpected(std::move(a).error());
        decl.attributes = std::move(*a);
      }
      if (et.contains("memberOfTypes")) {
        auto m = string_list(et["memberOfTypes"], path + ".memberOfTypes");
        if (!m) return Unexpected(std::move(m).error());
        decl.parent_types.insert(m->begin(), m->end());
      }
      schema.entity_types.emplace(*name, std::move(decl));
    }
  }
  if (j.contains("actions")) {
    const json& acts = j["actions"];
    if (auto r = require_object(acts, "$.actions"); !r) return Unexpected(std::move(r).error());
    for (auto it = acts.begin(); it != acts.end(); ++it) {
      std::string path = "$.actions" + quote_key(it.key());
      const json& a = it.value();
      if (auto r = require_object(a, path); !r) return Unexpected(std::move(r).error());
      if (auto r = only_keys(a, path, {"appliesTo", "memberOf"}); !r) return Unexpected(std::move(r).error());
      ActionDecl decl;
      if (!a.contains("appliesTo")) return fail(path + ".appliesTo", "missing");
      const json& at = a["appliesTo"];
      std::string at_path = path + ".appliesTo";
      if (auto r = require_object(at, at_path); !r) return Unexpected(std::move(r).error());
      if (auto r = only_keys(at, at_path, {"principalTypes", "resourceTypes", "context"}); !r) {
        return Unexpected(std::move(r).error());
      }
      for (auto [key, dest] : {std::pair{"principalTypes", &decl.principal_types},
                               std::pair{"resourceTypes", &decl.resource_types}}) {
        if (!at.contains(key)) return fail(at_path + "." + key, "missing");
        auto l = string_list(at[key], at_path + "." + key);
        if (!l) return Unexpected(std::move(l).error());
        dest->insert(l->begin(), l->end());
      }
      if (at.contains("context")) {
        auto ctx = attr_type_from(at["context"], at_path + ".context", false);
        if (!ctx) return Unexpected(std::move(ctx).error());
        if (!ctx->type.is_record()) return fail(at_path + ".context", "context must be a Record type");
        decl.context = ctx->type.attrs();
      }
      if (a.contains("memberOf")) {
        const json& m = a["memberOf"];
        if (!m.is_array()) return fail(path + ".memberOf", "expected an array");
        for (std::size_t k = 0; k < m.size(); ++k) {
          auto id = get_string(m[k], path + ".memberOf[" + std::to_string(k) + "]");
          if (!id) return Unexpected(std::move(id).error());
          decl.parents.insert(EntityUID({"Action"}, std::move(*id)));
        }
      }
      schema.actions.emplace(EntityUID({"Action"}, it.key()), std::move(decl));
    }
  }
  auto problems = schema.well_formedness_errors();
  if (!problems.empty()) return fail("$", problems.front());
  return schema;
}

J<Request> request_from(const json& j) {
  if (auto r = require_object(j, "$"); !r) return Unexpected(std::move(r).error());
  if (auto r = only_keys(j, "$", {"principal", "action", "resource", "context"}); !r) {
    return Unexpected(std::move(r).error());
  }
  Request req;
  for (auto [key, dest] : {std::pair{"principal", &req.principal}, std::pair{"action", &req.action},
                           std::pair{"resource", &req.resource}}) {
    std::string path = std::string("$.") + key;
    if (!j.contains(key)) return fail(path, "missing");
    auto uid = uid_from(j[key], path);
    if (!uid) return Unexpected(std::move(uid).error());
    *dest = std::move(*uid);
  }
  if (!req.action.is_action()) return fail("$.action.type", "action type must end in Action");
  if (j.contains("context")) {
    if (!j["context"].is_object()) return fail("$.context", "expected an object");
    auto ctx = value_from(j["context"], "$.context");
    if (!ctx) return Unexpected(std::move(ctx).error());
    if (!ctx->is_record()) return fail("$.context", "expected a record");
    req.context = std::move(*ctx);
  }
  return req;
}

template <class T, class F>
Expected<T, ParseError> run(std::string_view text, F&& convert) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t at = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    return Unexpected(ParseError{std::string("invalid JSON: ") + e.what(), {at, at}});
  }
  auto r = convert(j);
  if (!r) return Unexpected(ParseError{r.error().path + ": " + r.error().message, {0, text.size()}});
  return std::move(*r);
}

json uid_json(const EntityUID& uid) { return json{{"type", uid.type_name()}, {"id", uid.id()}}; }

json value_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Bool: return v.as_bool();
    case ValueKind::Long: return v.as_long();
    case ValueKind::String: return v.as_string();
    case ValueKind::Entity: return json{{"__entity", uid_json(v.as_entity())}};
    case ValueKind::Set: {
      json arr = json::array();
      for (const auto& e : v.as_set()) arr.push_back(value_json(e));
      return arr;
    }
    case ValueKind::Record: {
      json obj = json::object();
      for (const auto& [k, e] : v.as_record()) obj[k] = value_json(e);
      return obj;
    }
  }
  return nullptr;
}

json type_json(const Type& t);

json attrs_json(const std::map<std::string, AttrType>& attrs) {
  json obj = json::object();
  for (const auto& [k, at] : attrs) {
    json tj = type_json(at.type);
    if (!at.required) tj["required"] = false;
    obj[k] = std::move(tj);
  }
  return obj;
}

json type_json(const Type& t) {
  if (t.is_bool()) return json{{"type", "Boolean"}};
  if (t.is_long()) return json{{"type", "Long"}};
  if (t.is_string()) return json{{"type", "String"}};
  if (t.is_entity()) return json{{"type", "Entity"}, {"name", t.entity_name()}};
  if (t.is_set()) return json{{"type", "Set"}, {"element", type_json(t.element())}};
  return json{{"type", "Record"}, {"attributes", attrs_json(t.attrs())}};
}

}  // namespace

Expected<Entities, ParseError> parse_entities(std::string_view text) {
  return run<Entities>(text, entities_from);
}

Expected<Schema, ParseError> parse_schema(std::string_view text) { return run<Schema>(text, schema_from); }

Expected<Request, ParseError> parse_request(std::string_view text) {
  return run<Request>(text, request_from);
}

Expected<Value, ParseError> parse_value(std::string_view text) {
  return run<Value>(text, [](const json& j) { return value_from(j, "$"); });
}

std::string entities_to_json(const Entities& store) {
  json arr = json::array();
  for (const auto& [uid, d] : store.data()) {
    json e{{"uid", uid_json(uid)}, {"attrs", value_json(Value::record(d.attrs))}};
    json ps = json::array();
    for (const auto& p : d.parents) ps.push_back(uid_json(p));
    e["parents"] = std::move(ps);
    arr.push_back(std::move(e));
  }
  return arr.dump(2, ' ', false, json::error_handler_t::replace);
}

std::string schema_to_json(const Schema& schema) {
  json ets = json::object();
  for (const auto& [name, decl] : schema.entity_types) {
    json et{{"attributes", attrs_json(decl.attributes)}};
    et["memberOfTypes"] = json(std::vector<std::string>(decl.parent_types.begin(), decl.parent_types.end()));
    ets[name] = std::move(et);
  }
  json acts = json::object();
  for (const auto& [uid, decl] : schema.actions) {
    json applies{
        {"principalTypes", std::vector<std::string>(decl.principal_types.begin(), decl.principal_types.end())},
        {"resourceTypes", std::vector<std::string>(decl.resource_types.begin(), decl.resource_types.end())},
        {"context", type_json(Type::record(decl.context))}};
    json parents = json::array();
    for (const auto& p : decl.parents) parents.push_back(p.id());
    acts[uid.id()] = json{{"appliesTo", std::move(applies)}, {"memberOf", std::move(parents)}};
  }
  return json{{"entityTypes", std::move(ets)}, {"actions", std::move(acts)}}.dump(2, ' ', false, json::error_handler_t::replace);
}

std::string request_to_json(const Request& req) {
  return json{{"principal", uid_json(req.principal)},
              {"action", uid_json(req.action)},
              {"resource", uid_json(req.resource)},
              {"context", value_json(req.context)}}
      .dump(2, ' ', false, json::error_handler_t::replace);
}

std::string value_to_json(const Value& v) { return value_json(v).dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace cedar
