#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cedar/ast.hpp"
#include "cedar/expected.hpp"
#include "cedar/schema.hpp"

namespace cedar {

// One typing environment: an action with one applicable principal type and
// one applicable resource type.
struct RequestEnv {
  std::string principal_type;
  EntityUID action;
  std::string resource_type;
  std::map<std::string, AttrType> context;

  bool operator==(const RequestEnv&) const = default;
};

std::string to_string(const RequestEnv& env);

// Facts "receiver has attr" established by `has` guards. Receivers are keyed
// structurally, which is sound because evaluation is pure.
class CapabilitySet {
 public:
  void add(const Expr& receiver, const std::string& attr);
  bool contains(const Expr& receiver, const std::string& attr) const;
  void merge(const CapabilitySet& other);
  bool empty() const { return caps_.empty(); }
  std::size_t size() const { return caps_.size(); }

  bool operator==(const CapabilitySet&) const = default;

 private:
  std::set<std::pair<std::string, std::string>> caps_;
};

struct TypeCheckError {
  std::string expr;  // dump of the offending subexpression
  std::string message;

  bool operator==(const TypeCheckError&) const = default;
};

struct Typed {
  Type type;
  CapabilitySet caps_if_true;
};

inline constexpr std::size_t kMaxTypecheckDepth = 512;

// Environments in (action, principal type, resource type) order.
std::vector<RequestEnv> request_envs(const Schema& schema);

// Can a request typed by `env` match the policy's scope on a conforming store?
bool env_matches_scope(const Policy& p, const RequestEnv& env, const Schema& schema);

Expected<Typed, TypeCheckError> typecheck(const Expr& e, const RequestEnv& env,
                                          const CapabilitySet& caps, const Schema& schema);

// Every condition typechecks to Bool in every scope-compatible environment.
// An empty vector means the policy validates.
std::vector<TypeCheckError> validate_policy(const Policy& p, const Schema& schema);

// Policy id -> errors, only for policies that fail. Empty means valid.
std::map<std::string, std::vector<TypeCheckError>> validate_policy_set(const PolicySet& ps,
                                                                       const Schema& schema);

}  // namespace cedar
