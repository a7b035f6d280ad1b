#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cedar/ast.hpp"
#include "cedar/entities.hpp"
#include "cedar/request.hpp"
#include "cedar/schema.hpp"
#include "cedar/validator.hpp"

namespace cedar::gen {

// Reads generator decisions from a byte string. Each decision consumes at
// least one byte while bytes remain; once exhausted every choice is 0, and
// alternative 0 is always the smallest one.
class ByteCursor {
 public:
  explicit ByteCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // A value in [0, n). n must be positive.
  std::size_t choose(std::size_t n);
  bool flip() { return choose(2) == 1; }
  // Mostly small magnitudes, sometimes the 64-bit extremes.
  std::int64_t integer();

  bool exhausted() const { return pos_ >= bytes_.size(); }
  std::size_t position() const { return pos_; }

 private:
  std::uint8_t byte();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Limits {
  std::size_t max_entity_types = 4;
  std::size_t max_attrs = 4;
  std::size_t max_entities = 8;
  std::size_t max_type_depth = 3;
  std::size_t max_actions = 4;
  std::size_t max_rbac_policies = 8;
  std::size_t max_condition_depth = 3;  // type-directed ABAC conditions
  std::size_t max_arbitrary_depth = 4;
};

// A schema with a conforming store and request. Every entity referenced by an
// attribute value or a parent edge is present in the store.
struct World {
  Schema schema;
  Entities store;
  Request request;
};

World gen_world(ByteCursor& c, const Limits& limits = {});

// The environment the world's request is typed under.
RequestEnv request_env(const World& w);

enum class PolicyMode { TypeDirectedABAC, ArbitraryABAC, RBAC };

std::string_view mode_name(PolicyMode m);

// Policy ids are policy0, policy1, ... so the result reparses to itself.
// With `perturb`, about one in sixteen type-directed policies has a subterm
// replaced by an arbitrary, usually ill-typed, expression.
PolicySet gen_policies(PolicyMode mode, ByteCursor& c, const World& w, const Limits& limits = {},
                       bool perturb = true);

// An expression that typechecks to `target` under `env` with no initial
// capabilities. Optional attributes are read behind `has` guards. Depth 0
// yields a leaf when the target has one; otherwise the depth is raised to the
// least depth at which `target` can be built. Returns nullopt only when no
// expression of that type exists for this world.
std::optional<Expr> gen_expr(ByteCursor& c, const RequestEnv& env, const Type& target,
                             const World& w, std::size_t depth);

// Untyped expression over the world's entities and schema attribute names.
Expr gen_arbitrary_expr(ByteCursor& c, const World& w, std::size_t depth);

// Every attribute name declared anywhere in the schema.
std::vector<std::string> schema_attribute_names(const Schema& schema);

}  // namespace cedar::gen
