#include "cedar/request.hpp"

namespace cedar {

EvalError EvalError::type_error(std::vector<ValueKind> expected, ValueKind got) {
  std::string detail = "expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) detail += "|";
    detail += kind_name(expected[i]);
  }
  detail += ", got ";
  detail += kind_name(got);
  return {Kind::TypeError, std::move(detail)};
}

std::string_view error_kind_name(EvalError::Kind kind) {
  switch (kind) {
    case EvalError::Kind::TypeError: return "TypeError";
    case EvalError::Kind::MissingAttr: return "MissingAttr";
    case EvalError::Kind::Overflow: return "Overflow";
    case EvalError::Kind::ArityOrDomain: return "ArityOrDomain";
  }
  return "?";
}

std::string to_string(const EvalError& e) {
  std::string out(error_kind_name(e.kind));
  if (!e.detail.empty()) out += ": " + e.detail;
  return out;
}

std::set<std::string> Response::erroring_ids() const {
  std::set<std::string> ids;
  for (const auto& [id, _] : errors) ids.insert(id);
  return ids;
}

}  // namespace cedar
