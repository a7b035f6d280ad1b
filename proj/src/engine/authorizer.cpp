#include "cedar/authorizer.hpp"

#include <algorithm>

#include "cedar/evaluator.hpp"

namespace cedar {

std::set<std::string> satisfied_policies(Effect effect, const PolicySet& ps, const Request& req,
                                         const Entities& store) {
  std::set<std::string> ids;
  for (const auto& p : ps) {
    if (p.effect == effect && satisfied(p, req, store).kind == Satisfaction::Kind::Satisfied) {
      ids.insert(p.id);
    }
  }
  return ids;
}

Response is_authorized(const Request& req, const Entities& store, const PolicySet& ps) {
  // One pass over the set; equivalent to two satisfied_policies calls.
  std::set<std::string> permits, forbids;
  Response resp;
  for (const auto& p : ps) {
    auto s = satisfied(p, req, store);
    switch (s.kind) {
      case Satisfaction::Kind::Satisfied:
        (p.effect == Effect::Permit ? permits : forbids).insert(p.id);
        break;
      case Satisfaction::Kind::Errored: resp.errors.emplace_back(p.id, std::move(s.error)); break;
      case Satisfaction::Kind::NotSatisfied: break;
    }
  }
  std::sort(resp.errors.begin(), resp.errors.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (forbids.empty() && !permits.empty()) {
    resp.decision = Decision::Allow;
    resp.determining = std::move(permits);
  } else {
    resp.decision = Decision::Deny;
    resp.determining = std::move(forbids);
  }
  return resp;
}

PolicySet slice(const PolicySet& ps, const Request& req, const Entities& store) {
  std::vector<Policy> kept;
  for (const auto& p : ps) {
    if (scope_matches(p, req, store)) kept.push_back(p);
  }
  return *PolicySet::make(std::move(kept));
}

}  // namespace cedar
