#include "cedar/schema.hpp"

#include <sstream>

namespace cedar {

bool Type::Record::operator==(const Record& o) const { return attrs == o.attrs; }

Type Type::record(std::map<std::string, AttrType> attrs) { return Type(Record{std::move(attrs)}); }

namespace {

void print_type(std::ostream& os, const Type& t) {
  if (t.is_bool()) {
    os << "Bool";
  } else if (t.is_long()) {
    os << "Long";
  } else if (t.is_string()) {
    os << "String";
  } else if (t.is_entity()) {
    os << "Entity<" << t.entity_name() << '>';
  } else if (t.is_set()) {
    os << "Set<";
    print_type(os, t.element());
    os << '>';
  } else {
    os << '{';
    bool first = true;
    for (const auto& [name, attr] : t.attrs()) {
      if (!first) os << ", ";
      first = false;
      os << name << (attr.required ? ": " : "?: ");
      print_type(os, attr.type);
    }
    os << '}';
  }
}

void check_type_refs(const Type& t, const Schema& schema, const std::string& where,
                     std::vector<std::string>& out) {
  if (t.is_entity()) {
    if (!schema.entity_type(t.entity_name())) {
      out.push_back(where + ": undeclared entity type " + t.entity_name());
    }
  } else if (t.is_set()) {
    check_type_refs(t.element(), schema, where, out);
  } else if (t.is_record()) {
    for (const auto& [name, attr] : t.attrs()) check_type_refs(attr.type, schema, where + "." + name, out);
  }
}

}  // namespace

std::string to_string(const Type& t) {
  std::ostringstream os;
  print_type(os, t);
  return os.str();
}

const EntityTypeDecl* Schema::entity_type(const std::string& name) const {
  auto it = entity_types.find(name);
  return it == entity_types.end() ? nullptr : &it->second;
}

const ActionDecl* Schema::action(const EntityUID& uid) const {
  auto it = actions.find(uid);
  return it == actions.end() ? nullptr : &it->second;
}

bool Schema::knows_entity_type(const std::string& name) const {
  if (entity_types.contains(name)) return true;
  for (const auto& [uid, _] : actions) {
    if (uid.type_name() == name) return true;
  }
  return false;
}

std::set<std::string> Schema::ancestor_types(const std::string& type) const {
  std::set<std::string> seen{type};
  std::vector<std::string> work{type};
  while (!work.empty()) {
    auto cur = std::move(work.back());
    work.pop_back();
    const auto* decl = entity_type(cur);
    if (!decl) continue;
    for (const auto& p : decl->parent_types) {
      if (seen.insert(p).second) work.push_back(p);
    }
  }
  return seen;
}

std::set<EntityUID> Schema::action_ancestors(const EntityUID& action_uid) const {
  std::set<EntityUID> seen{action_uid};
  std::vector<EntityUID> work{action_uid};
  while (!work.empty()) {
    auto cur = std::move(work.back());
    work.pop_back();
    const auto* decl = action(cur);
    if (!decl) continue;
    for (const auto& p : decl->parents) {
      if (seen.insert(p).second) work.push_back(p);
    }
  }
  return seen;
}

std::vector<std::string> Schema::well_formedness_errors() const {
  std::vector<std::string> out;
  for (const auto& [name, decl] : entity_types) {
    if (name.empty()) out.push_back("empty entity type name");
    for (const auto& [attr, at] : decl.attributes) {
      check_type_refs(at.type, *this, name + "." + attr, out);
    }
    for (const auto& p : decl.parent_types) {
      if (!entity_type(p)) out.push_back(name + ": undeclared parent type " + p);
    }
  }
  for (const auto& [uid, decl] : actions) {
    std::string where = to_string(uid);
    if (!uid.is_action()) out.push_back(where + ": action type must end in Action");
    for (const auto& t : decl.principal_types) {
      if (!entity_type(t)) out.push_back(where + ": undeclared principal type " + t);
    }
    for (const auto& t : decl.resource_types) {
      if (!entity_type(t)) out.push_back(where + ": undeclared resource type " + t);
    }
    for (const auto& [attr, at] : decl.context) {
      check_type_refs(at.type, *this, where + ".context." + attr, out);
    }
    for (const auto& p : decl.parents) {
      if (!action(p)) {
        out.push_back(where + ": undeclared parent action " + to_string(p));
      } else if (p == uid || action_ancestors(p).contains(uid)) {
        out.push_back(where + ": action parent cycle");
      }
    }
  }
  return out;
}

bool value_has_type(const Value& v, const Type& t, const Schema& schema) {
  if (t.is_bool()) return v.is_bool();
  if (t.is_long()) return v.is_long();
  if (t.is_string()) return v.is_string();
  if (t.is_entity()) return v.is_entity() && v.as_entity().type_name() == t.entity_name();
  if (t.is_set()) {
    if (!v.is_set()) return false;
    for (const auto& e : v.as_set()) {
      if (!value_has_type(e, t.element(), schema)) return false;
    }
    return true;
  }
  if (!v.is_record()) return false;
  const auto& fields = v.as_record();
  for (const auto& [name, attr] : t.attrs()) {
    auto it = fields.find(name);
    if (it == fields.end()) {
      if (attr.required) return false;
    } else if (!value_has_type(it->second, attr.type, schema)) {
      return false;
    }
  }
  for (const auto& [name, _] : fields) {
    if (!t.attrs().contains(name)) return false;
  }
  return true;
}

}  // namespace cedar
