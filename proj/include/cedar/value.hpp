#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cedar {

// Typed entity identifier, e.g. `Team::"interns"`.
class EntityUID {
 public:
  EntityUID() = default;
  EntityUID(std::vector<std::string> type_path, std::string id);

  // Splits "A::B" into its segments. Does not validate.
  static EntityUID of(std::string_view type_name, std::string id);

  const std::vector<std::string>& type_path() const { return type_path_; }
  std::string type_name() const;  // segments joined by "::"
  const std::string& id() const { return id_; }

  // Final segment of the type equals "Action".
  bool is_action() const;

  auto operator<=>(const EntityUID&) const = default;
  bool operator==(const EntityUID&) const = default;

 private:
  std::vector<std::string> type_path_;
  std::string id_;
};

bool is_identifier(std::string_view s);

std::ostream& operator<<(std::ostream& os, const EntityUID& uid);
std::string to_string(const EntityUID& uid);

enum class ValueKind { Bool, Long, String, Entity, Set, Record };

std::string_view kind_name(ValueKind kind);

class Value;
using ValueSet = std::vector<Value>;  // sorted, duplicate-free
using ValueRecord = std::map<std::string, Value>;

class Value {
 public:
  Value() : data_(false) {}
  static Value boolean(bool b);
  static Value integer(std::int64_t n);
  static Value string(std::string s);
  static Value entity(EntityUID uid);
  // Sorts and removes duplicates.
  static Value set(std::vector<Value> elements);
  static Value record(ValueRecord fields);

  ValueKind kind() const { return static_cast<ValueKind>(data_.index()); }

  bool is_bool() const { return kind() == ValueKind::Bool; }
  bool is_long() const { return kind() == ValueKind::Long; }
  bool is_string() const { return kind() == ValueKind::String; }
  bool is_entity() const { return kind() == ValueKind::Entity; }
  bool is_set() const { return kind() == ValueKind::Set; }
  bool is_record() const { return kind() == ValueKind::Record; }

  bool as_bool() const { return std::get<bool>(data_); }
  std::int64_t as_long() const { return std::get<std::int64_t>(data_); }
  const std::string& as_string() const { return std::get<std::string>(data_); }
  const EntityUID& as_entity() const { return std::get<EntityUID>(data_); }
  const ValueSet& as_set() const { return *std::get<SetRef>(data_); }
  const ValueRecord& as_record() const { return *std::get<RecordRef>(data_); }

  friend std::strong_ordering operator<=>(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  using SetRef = std::shared_ptr<const ValueSet>;
  using RecordRef = std::shared_ptr<const ValueRecord>;
  std::variant<bool, std::int64_t, std::string, EntityUID, SetRef, RecordRef> data_;
};

std::ostream& operator<<(std::ostream& os, const Value& v);
std::string to_string(const Value& v);

}  // namespace cedar
