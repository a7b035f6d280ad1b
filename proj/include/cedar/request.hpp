#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cedar/value.hpp"

namespace cedar {

struct Request {
  EntityUID principal;
  EntityUID action;
  EntityUID resource;
  Value context = Value::record({});

  bool operator==(const Request&) const = default;
};

// Dynamic error classes. TypeError and MissingAttr are what validation rules
// out; Overflow is a runtime fact of 64-bit arithmetic.
struct EvalError {
  enum class Kind { TypeError, MissingAttr, Overflow, ArityOrDomain };
  Kind kind = Kind::TypeError;
  std::string detail;

  static EvalError type_error(std::vector<ValueKind> expected, ValueKind got);
  static EvalError missing_attr(std::string attr) { return {Kind::MissingAttr, std::move(attr)}; }
  static EvalError overflow() { return {Kind::Overflow, ""}; }
  static EvalError domain(std::string what) { return {Kind::ArityOrDomain, std::move(what)}; }

  bool operator==(const EvalError&) const = default;
};

std::string_view error_kind_name(EvalError::Kind kind);
std::string to_string(const EvalError& e);

enum class Decision { Allow, Deny };

struct Response {
  Decision decision = Decision::Deny;
  std::set<std::string> determining;
  std::vector<std::pair<std::string, EvalError>> errors;  // sorted by policy id

  std::set<std::string> erroring_ids() const;
  bool operator==(const Response&) const = default;
};

}  // namespace cedar
