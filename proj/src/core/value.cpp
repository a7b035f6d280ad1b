#include "cedar/value.hpp"

#include <algorithm>
#include <sstream>

namespace cedar {

EntityUID::EntityUID(std::vector<std::string> type_path, std::string id)
    : type_path_(std::move(type_path)), id_(std::move(id)) {}

EntityUID EntityUID::of(std::string_view type_name, std::string id) {
  std::vector<std::string> path;
  std::size_t start = 0;
  while (true) {
    auto pos = type_name.find("::", start);
    if (pos == std::string_view::npos) {
      path.emplace_back(type_name.substr(start));
      break;
    }
    path.emplace_back(type_name.substr(start, pos - start));
    start = pos + 2;
  }
  return EntityUID(std::move(path), std::move(id));
}

std::string EntityUID::type_name() const {
  std::string out;
  for (std::size_t i = 0; i < type_path_.size(); ++i) {
    if (i) out += "::";
    out += type_path_[i];
  }
  return out;
}

bool EntityUID::is_action() const {
  return !type_path_.empty() && type_path_.back() == "Action";
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  if (!head(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [&](char c) { return head(c) || (c >= '0' && c <= '9'); });
}

std::ostream& operator<<(std::ostream& os, const EntityUID& uid) {
  os << uid.type_name() << "::\"";
  for (char c : uid.id()) {
    if (c == '"' || c == '\\') os << '\\';
    os << c;
  }
  return os << '"';
}

std::string to_string(const EntityUID& uid) {
  std::ostringstream os;
  os << uid;
  return os.str();
}

std::string_view kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::Bool: return "bool";
    case ValueKind::Long: return "long";
    case ValueKind::String: return "string";
    case ValueKind::Entity: return "entity";
    case ValueKind::Set: return "set";
    case ValueKind::Record: return "record";
  }
  return "?";
}

Value Value::boolean(bool b) {
  Value v;
  v.data_ = b;
  return v;
}

Value Value::integer(std::int64_t n) {
  Value v;
  v.data_ = n;
  return v;
}

Value Value::string(std::string s) {
  Value v;
  v.data_ = std::move(s);
  return v;
}

Value Value::entity(EntityUID uid) {
  Value v;
  v.data_ = std::move(uid);
  return v;
}

Value Value::set(std::vector<Value> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  Value v;
  v.data_ = std::make_shared<const ValueSet>(std::move(elements));
  return v;
}

Value Value::record(ValueRecord fields) {
  Value v;
  v.data_ = std::make_shared<const ValueRecord>(std::move(fields));
  return v;
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
  switch (a.kind()) {
    case ValueKind::Bool: return a.as_bool() <=> b.as_bool();
    case ValueKind::Long: return a.as_long() <=> b.as_long();
    case ValueKind::String: return a.as_string().compare(b.as_string()) <=> 0;
    case ValueKind::Entity: return a.as_entity() <=> b.as_entity();
    case ValueKind::Set: {
      const auto& x = a.as_set();
      const auto& y = b.as_set();
      return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
    }
    case ValueKind::Record: {
      const auto& x = a.as_record();
      const auto& y = b.as_record();
      auto xi = x.begin();
      auto yi = y.begin();
      for (; xi != x.end() && yi != y.end(); ++xi, ++yi) {
        if (auto c = xi->first.compare(yi->first) <=> 0; c != 0) return c;
        if (auto c = xi->second <=> yi->second; c != 0) return c;
      }
      return x.size() <=> y.size();
    }
  }
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Value& v) {
  switch (v.kind()) {
    case ValueKind::Bool: return os << (v.as_bool() ? "true" : "false");
    case ValueKind::Long: return os << v.as_long();
    case ValueKind::String: {
      os << '"';
      for (char c : v.as_string()) {
        if (c == '"' || c == '\\') os << '\\';
        os << c;
      }
      return os << '"';
    }
    case ValueKind::Entity: return os << v.as_entity();
    case ValueKind::Set: {
      os << '[';
      bool first = true;
      for (const auto& e : v.as_set()) {
        if (!first) os << ", ";
        first = false;
        os << e;
      }
      return os << ']';
    }
    case ValueKind::Record: {
      os << '{';
      bool first = true;
      for (const auto& [k, e] : v.as_record()) {
        if (!first) os << ", ";
        first = false;
        os << '"' << k << "\": " << e;
      }
      return os << '}';
    }
  }
  return os;
}

std::string to_string(const Value& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace cedar
