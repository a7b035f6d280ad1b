#include "cedar/entities.hpp"

#include <vector>

namespace cedar {

namespace {

const std::set<EntityUID> kNoAncestors;

enum class Mark { Unvisited, Active, Done };

}  // namespace

Expected<Entities, std::string> Entities::make(std::map<EntityUID, EntityData> data) {
  Entities store;
  store.data_ = std::move(data);

  // Iterative post-order DFS; an edge into an Active node closes a cycle.
  std::map<EntityUID, Mark> marks;
  for (const auto& [root, _] : store.data_) {
    if (marks[root] != Mark::Unvisited) continue;
    struct Frame {
      const EntityUID* uid;
      std::set<EntityUID>::const_iterator next;
      std::set<EntityUID>::const_iterator end;
    };
    std::vector<Frame> stack;
    auto push = [&](const EntityUID& uid) {
      marks[uid] = Mark::Active;
      const auto* entity = store.find(uid);
      if (entity) {
        stack.push_back({&uid, entity->parents.begin(), entity->parents.end()});
      } else {
        stack.push_back({&uid, kNoAncestors.end(), kNoAncestors.end()});
      }
    };
    push(root);
    while (!stack.empty()) {
      auto& top = stack.back();
      if (top.next != top.end) {
        const EntityUID& parent = *top.next++;
        Mark m = marks[parent];
        if (m == Mark::Active) {
          return Unexpected(std::string("parent cycle through ") + to_string(parent));
        }
        if (m == Mark::Unvisited) push(parent);
        continue;
      }
      const EntityUID& uid = *top.uid;
      std::set<EntityUID> closure;
      if (const auto* entity = store.find(uid)) {
        for (const auto& p : entity->parents) {
          closure.insert(p);
          auto it = store.closure_.find(p);
          if (it != store.closure_.end()) closure.insert(it->second.begin(), it->second.end());
        }
      }
      store.closure_.emplace(uid, std::move(closure));
      marks[uid] = Mark::Done;
      stack.pop_back();
    }
  }
  return store;
}

const EntityData* Entities::find(const EntityUID& uid) const {
  auto it = data_.find(uid);
  return it == data_.end() ? nullptr : &it->second;
}

const std::set<EntityUID>& Entities::ancestors(const EntityUID& uid) const {
  auto it = closure_.find(uid);
  return it == closure_.end() ? kNoAncestors : it->second;
}

std::set<EntityUID> ancestors(const Entities& store, const EntityUID& uid) {
  return store.ancestors(uid);
}

bool in_relation(const Entities& store, const EntityUID& a, const EntityUID& b) {
  return a == b || store.ancestors(a).contains(b);
}

}  // namespace cedar
