#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "cedar/ast.hpp"
#include "cedar/data_json.hpp"
#include "cedar/entities.hpp"
#include "cedar/schema.hpp"
#include "cedar/syntax.hpp"

namespace cedar::test {

inline std::string data_path(const std::string& name) { return std::string(CEDAR_TEST_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& name) {
  std::ifstream in(data_path(name), std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline EntityUID uid(std::string_view type, std::string id) { return EntityUID::of(type, std::move(id)); }

struct TinyTodo {
  PolicySet policies;
  Entities store;
  Schema schema;
};

inline TinyTodo tinytodo() {
  auto ps = parse_policy_set(slurp("tinytodo.cedar"));
  auto store = parse_entities(slurp("entities.json"));
  auto schema = parse_schema(slurp("schema.json"));
  if (!ps || !store || !schema) throw std::runtime_error("TinyTodo fixtures do not load");
  return {*ps, *store, *schema};
}

inline Request request_file(const std::string& name) {
  auto r = parse_request(slurp(name));
  if (!r) throw std::runtime_error(to_string(r.error()));
  return *r;
}

inline Expr expr(std::string_view text) {
  auto e = parse_expr(text);
  if (!e) throw std::runtime_error(std::string(text) + ": " + to_string(e.error()));
  return *e;
}

}  // namespace cedar::test
