#include <gtest/gtest.h>

#include <random>

#include "cedar/conformance.hpp"
#include "cedar/gen/generators.hpp"
#include "cedar/reference/model.hpp"
#include "cedar/syntax.hpp"
#include "cedar/validator.hpp"

namespace cedar::gen {
namespace {

std::vector<std::uint8_t> bytes(std::uint64_t seed, std::size_t n = 512) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

TEST(ByteCursor, ExhaustedChoosesZero) {
  std::vector<std::uint8_t> b{7};
  ByteCursor c(b);
  EXPECT_EQ(c.choose(4), 3u);
  EXPECT_TRUE(c.exhausted());
  EXPECT_EQ(c.choose(100), 0u);
  EXPECT_FALSE(c.flip());
}

TEST(ByteCursor, LargeChoiceStaysInRange) {
  auto b = bytes(1);
  ByteCursor c(b);
  for (int i = 0; i < 200; ++i) EXPECT_LT(c.choose(1000), 1000u);
}

TEST(Generators, Deterministic) {
  auto b = bytes(2);
  ByteCursor c1(b), c2(b);
  auto w1 = gen_world(c1);
  auto w2 = gen_world(c2);
  EXPECT_EQ(w1.schema, w2.schema);
  EXPECT_EQ(w1.store, w2.store);
  EXPECT_EQ(w1.request, w2.request);
  EXPECT_EQ(gen_policies(PolicyMode::TypeDirectedABAC, c1, w1), gen_policies(PolicyMode::TypeDirectedABAC, c2, w2));
}

TEST(Generators, EmptyInputGivesMinimalWorld) {
  ByteCursor c(std::span<const std::uint8_t>{});
  auto w = gen_world(c);
  EXPECT_EQ(w.schema.entity_types.size(), 1u);
  EXPECT_EQ(w.schema.actions.size(), 1u);
  EXPECT_TRUE(store_conforms(w.store, w.schema));
  EXPECT_TRUE(request_conforms(w.request, w.schema));
}

TEST(Generators, WorldsConform) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    auto b = bytes(s);
    ByteCursor c(b);
    auto w = gen_world(c);
    ASSERT_TRUE(w.schema.well_formedness_errors().empty()) << s;
    ASSERT_TRUE(store_conforms(w.store, w.schema)) << s;
    ASSERT_TRUE(request_conforms(w.request, w.schema)) << s;
  }
}

TEST(Generators, TypeDirectedPoliciesValidateWithoutPerturbation) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    auto b = bytes(s);
    ByteCursor c(b);
    auto w = gen_world(c);
    auto ps = gen_policies(PolicyMode::TypeDirectedABAC, c, w, {}, false);
    for (const auto& p : ps) {
      ASSERT_TRUE(validate_policy(p, w.schema).empty()) << s << "\n" << pretty_print(p);
      ASSERT_TRUE(reference::validate_policy(p, w.schema)) << s;
    }
  }
}

TEST(Generators, RbacHasNoConditions) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto b = bytes(s);
    ByteCursor c(b);
    auto w = gen_world(c);
    auto ps = gen_policies(PolicyMode::RBAC, c, w);
    EXPECT_GE(ps.size(), 1u);
    for (const auto& p : ps) EXPECT_TRUE(p.conditions.empty());
  }
}

TEST(Generators, PolicyIdsArePositional) {
  auto b = bytes(5);
  ByteCursor c(b);
  auto w = gen_world(c);
  auto ps = gen_policies(PolicyMode::RBAC, c, w);
  for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(ps.policies()[i].id, "policy" + std::to_string(i));
}

TEST(Generators, TypedExpressionsHaveTheirType) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    auto b = bytes(s);
    ByteCursor c(b);
    auto w = gen_world(c);
    auto env = request_env(w);
    for (const Type& t : {Type::boolean(), Type::integer(), Type::string()}) {
      auto e = gen_expr(c, env, t, w, 3);
      ASSERT_TRUE(e);
      auto typed = typecheck(*e, env, {}, w.schema);
      ASSERT_TRUE(typed) << s << ": " << pretty_print(*e) << ": " << typed.error().message;
      EXPECT_EQ(typed->type, t);
    }
  }
}

TEST(Generators, ArbitraryExpressionsUseSchemaNames) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto b = bytes(s);
    ByteCursor c(b);
    auto w = gen_world(c);
    auto names = schema_attribute_names(w.schema);
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
      if (const auto* g = std::get_if<ast::GetAttr>(&e.node().v)) {
        EXPECT_NE(std::find(names.begin(), names.end(), g->attr), names.end()) << g->attr;
      }
      for (const auto& ch : children(e)) walk(ch);
    };
    walk(gen_arbitrary_expr(c, w, 4));
  }
}

}  // namespace
}  // namespace cedar::gen
