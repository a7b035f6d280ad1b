#pragma once

#include <set>
#include <string>

#include "cedar/ast.hpp"
#include "cedar/entities.hpp"
#include "cedar/request.hpp"

namespace cedar {

// Ids of policies with `effect` that are Satisfied for the request.
std::set<std::string> satisfied_policies(Effect effect, const PolicySet& ps, const Request& req,
                                         const Entities& store);

// Allow iff no forbid is satisfied and some permit is. Erroring policies are
// reported in Response::errors and otherwise ignored.
Response is_authorized(const Request& req, const Entities& store, const PolicySet& ps);

// Policies whose scope matches the request.
PolicySet slice(const PolicySet& ps, const Request& req, const Entities& store);

}  // namespace cedar
