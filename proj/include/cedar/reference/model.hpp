#pragma once

// Simplicity-first executable model of evaluation, authorization, slicing and
// validation. Shares only the core data types with the production engine and
// is the oracle for differential testing.

#include <set>
#include <string>

#include "cedar/ast.hpp"
#include "cedar/entities.hpp"
#include "cedar/expected.hpp"
#include "cedar/request.hpp"
#include "cedar/schema.hpp"

namespace cedar::reference {

Expected<Value, EvalError> evaluate(const Expr& e, const Request& req, const Entities& store);

Response is_authorized(const Request& req, const Entities& store, const PolicySet& ps);

PolicySet slice(const PolicySet& ps, const Request& req, const Entities& store);

// true iff the policy validates against the schema.
bool validate_policy(const Policy& p, const Schema& schema);

// Naive transitive closure over raw parent edges.
std::set<EntityUID> ancestors(const Entities& store, const EntityUID& uid);

}  // namespace cedar::reference
