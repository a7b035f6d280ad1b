#pragma once

#include <string>
#include <string_view>

#include "cedar/entities.hpp"
#include "cedar/expected.hpp"
#include "cedar/request.hpp"
#include "cedar/schema.hpp"
#include "cedar/syntax.hpp"

namespace cedar {

// JSON data documents. Unknown keys are rejected; error messages start with
// the JSON path of the offending element, e.g. `$.action: missing`.
Expected<Entities, ParseError> parse_entities(std::string_view json_text);
Expected<Schema, ParseError> parse_schema(std::string_view json_text);
Expected<Request, ParseError> parse_request(std::string_view json_text);
Expected<Value, ParseError> parse_value(std::string_view json_text);

std::string entities_to_json(const Entities& store);
std::string schema_to_json(const Schema& schema);
std::string request_to_json(const Request& req);
std::string value_to_json(const Value& v);

}  // namespace cedar
