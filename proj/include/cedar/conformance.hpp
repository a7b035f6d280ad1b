#pragma once

#include <string>
#include <vector>

#include "cedar/entities.hpp"
#include "cedar/request.hpp"
#include "cedar/schema.hpp"

namespace cedar {

// Empty result means the store conforms.
std::vector<std::string> store_conformance_errors(const Entities& store, const Schema& schema);

// Empty string means the request conforms.
std::string request_conformance_error(const Request& request, const Schema& schema);

inline bool store_conforms(const Entities& store, const Schema& schema) {
  return store_conformance_errors(store, schema).empty();
}
inline bool request_conforms(const Request& request, const Schema& schema) {
  return request_conformance_error(request, schema).empty();
}

}  // namespace cedar
