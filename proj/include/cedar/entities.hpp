#pragma once

#include <map>
#include <set>
#include <string>

#include "cedar/expected.hpp"
#include "cedar/value.hpp"

namespace cedar {

struct EntityData {
  ValueRecord attrs;
  std::set<EntityUID> parents;

  bool operator==(const EntityData&) const = default;
};

// Immutable entity store. The parent relation is checked for cycles and its
// transitive closure is computed once at construction.
class Entities {
 public:
  Entities() = default;

  // Fails with a description naming an entity on a cycle.
  static Expected<Entities, std::string> make(std::map<EntityUID, EntityData> data);

  const std::map<EntityUID, EntityData>& data() const { return data_; }
  const EntityData* find(const EntityUID& uid) const;
  bool contains(const EntityUID& uid) const { return data_.contains(uid); }
  std::size_t size() const { return data_.size(); }

  // Transitive parents of `uid`, excluding `uid`. Empty for unknown entities.
  const std::set<EntityUID>& ancestors(const EntityUID& uid) const;

  bool operator==(const Entities& other) const { return data_ == other.data_; }

 private:
  std::map<EntityUID, EntityData> data_;
  std::map<EntityUID, std::set<EntityUID>> closure_;
};

std::set<EntityUID> ancestors(const Entities& store, const EntityUID& uid);

// Reflexive-transitive membership: a == b or b is an ancestor of a.
bool in_relation(const Entities& store, const EntityUID& a, const EntityUID& b);

}  // namespace cedar
