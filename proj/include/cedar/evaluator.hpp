#pragma once

#include "cedar/ast.hpp"
#include "cedar/entities.hpp"
#include "cedar/expected.hpp"
#include "cedar/request.hpp"

namespace cedar {

// Nesting bound for evaluation. Parsed and generated expressions stay far
// below it; reaching it yields an ArityOrDomain error instead of recursing.
inline constexpr std::size_t kMaxEvalDepth = 512;

Expected<Value, EvalError> evaluate(const Expr& e, const Request& req, const Entities& store);

// Glob match with `*` matching any (possibly empty) run of code points.
bool wildcard_match(std::u32string_view text, const Pattern& pattern);

bool scope_matches(const Policy& p, const Request& req, const Entities& store);

struct Satisfaction {
  enum class Kind { Satisfied, NotSatisfied, Errored };
  Kind kind = Kind::NotSatisfied;
  EvalError error;  // meaningful when Errored

  static Satisfaction satisfied() { return {Kind::Satisfied, {}}; }
  static Satisfaction not_satisfied() { return {Kind::NotSatisfied, {}}; }
  static Satisfaction errored(EvalError e) { return {Kind::Errored, std::move(e)}; }
  bool operator==(const Satisfaction&) const = default;
};

Satisfaction satisfied(const Policy& p, const Request& req, const Entities& store);

}  // namespace cedar
