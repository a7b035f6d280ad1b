#include "cedar/conformance.hpp"

namespace cedar {

std::vector<std::string> store_conformance_errors(const Entities& store, const Schema& schema) {
  std::vector<std::string> out;
  for (const auto& [uid, data] : store.data()) {
    const std::string who = to_string(uid);
    if (const auto* action = schema.action(uid)) {
      if (!data.attrs.empty()) out.push_back(who + ": actions carry no attributes");
      for (const auto& p : data.parents) {
        if (!action->parents.contains(p)) {
          out.push_back(who + ": undeclared action parent " + to_string(p));
        }
      }
      continue;
    }
    const auto* decl = schema.entity_type(uid.type_name());
    if (!decl) {
      out.push_back(who + ": undeclared entity type " + uid.type_name());
      continue;
    }
    for (const auto& [name, attr] : decl->attributes) {
      auto it = data.attrs.find(name);
      if (it == data.attrs.end()) {
        if (attr.required) out.push_back(who + ": missing required attribute " + name);
      } else if (!value_has_type(it->second, attr.type, schema)) {
        out.push_back(who + ": attribute " + name + " is not a " + to_string(attr.type));
      }
    }
    for (const auto& [name, _] : data.attrs) {
      if (!decl->attributes.contains(name)) out.push_back(who + ": undeclared attribute " + name);
    }
    for (const auto& p : data.parents) {
      if (!decl->parent_types.contains(p.type_name())) {
        out.push_back(who + ": parent " + to_string(p) + " has disallowed type");
      }
    }
  }
  return out;
}

std::string request_conformance_error(const Request& request, const Schema& schema) {
  const auto* action = schema.action(request.action);
  if (!action) return "undeclared action " + to_string(request.action);
  if (!action->principal_types.contains(request.principal.type_name())) {
    return "principal type " + request.principal.type_name() + " not applicable to " +
           to_string(request.action);
  }
  if (!action->resource_types.contains(request.resource.type_name())) {
    return "resource type " + request.resource.type_name() + " not applicable to " +
           to_string(request.action);
  }
  if (!value_has_type(request.context, Type::record(action->context), schema)) {
    return "context does not match the declared shape";
  }
  return "";
}

}  // namespace cedar
