#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cedar/entities.hpp"
#include "cedar/value.hpp"

namespace cedar {

struct AttrType;

// The validator's type language.
class Type {
 public:
  struct Bool {
    bool operator==(const Bool&) const = default;
  };
  struct Long {
    bool operator==(const Long&) const = default;
  };
  struct String {
    bool operator==(const String&) const = default;
  };
  struct Entity {
    std::string name;
    bool operator==(const Entity&) const = default;
  };
  struct Set {
    std::shared_ptr<const Type> element;
    bool operator==(const Set& o) const { return *element == *o.element; }
  };
  struct Record {
    std::map<std::string, AttrType> attrs;
    bool operator==(const Record&) const;
  };

  Type() : v_(Bool{}) {}
  static Type boolean() { return Type(Bool{}); }
  static Type integer() { return Type(Long{}); }
  static Type string() { return Type(String{}); }
  static Type entity(std::string name) { return Type(Entity{std::move(name)}); }
  static Type set(Type element) { return Type(Set{std::make_shared<const Type>(std::move(element))}); }
  static Type record(std::map<std::string, AttrType> attrs);

  bool is_bool() const { return std::holds_alternative<Bool>(v_); }
  bool is_long() const { return std::holds_alternative<Long>(v_); }
  bool is_string() const { return std::holds_alternative<String>(v_); }
  bool is_entity() const { return std::holds_alternative<Entity>(v_); }
  bool is_set() const { return std::holds_alternative<Set>(v_); }
  bool is_record() const { return std::holds_alternative<Record>(v_); }

  const std::string& entity_name() const { return std::get<Entity>(v_).name; }
  const Type& element() const { return *std::get<Set>(v_).element; }
  const std::map<std::string, AttrType>& attrs() const { return std::get<Record>(v_).attrs; }

  bool operator==(const Type& o) const { return v_ == o.v_; }

 private:
  template <class T>
  explicit Type(T t) : v_(std::move(t)) {}
  std::variant<Bool, Long, String, Entity, Set, Record> v_;
};

struct AttrType {
  Type type;
  bool required = true;
  bool operator==(const AttrType&) const = default;
};

std::string to_string(const Type& t);

struct EntityTypeDecl {
  std::map<std::string, AttrType> attributes;
  std::set<std::string> parent_types;  // allowed parent entity types
  bool operator==(const EntityTypeDecl&) const = default;
};

struct ActionDecl {
  std::set<std::string> principal_types;
  std::set<std::string> resource_types;
  std::map<std::string, AttrType> context;
  std::set<EntityUID> parents;
  bool operator==(const ActionDecl&) const = default;
};

struct Schema {
  std::map<std::string, EntityTypeDecl> entity_types;
  std::map<EntityUID, ActionDecl> actions;

  bool operator==(const Schema&) const = default;

  const EntityTypeDecl* entity_type(const std::string& name) const;
  const ActionDecl* action(const EntityUID& uid) const;
  // Declared entity type or the type of some declared action.
  bool knows_entity_type(const std::string& name) const;

  // Reflexive-transitive closure of allowed parent types of `type`.
  std::set<std::string> ancestor_types(const std::string& type) const;
  // Reflexive-transitive closure of declared action parents.
  std::set<EntityUID> action_ancestors(const EntityUID& action) const;

  // Every referenced type is declared, and parent relations are acyclic for
  // actions. Returns the problems found.
  std::vector<std::string> well_formedness_errors() const;
};

// Does `v` inhabit `t`? Records are closed: no undeclared fields.
bool value_has_type(const Value& v, const Type& t, const Schema& schema);

}  // namespace cedar
