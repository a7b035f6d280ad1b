#include <gtest/gtest.h>

#include "cedar/reference/model.hpp"
#include "cedar/validator.hpp"
#include "support.hpp"

namespace cedar {
namespace {

using test::expr;
using test::uid;

Policy when(std::string_view cond) {
  Policy p;
  p.id = "p";
  p.conditions.push_back({ConditionKind::When, expr(cond)});
  return p;
}

class ValidatorTest : public ::testing::Test {
 protected:
  test::TinyTodo t = test::tinytodo();

  RequestEnv get_list_env() const {
    for (const auto& env : request_envs(t.schema)) {
      if (env.action == uid("Action", "GetList")) return env;
    }
    throw std::runtime_error("no GetList env");
  }
  Expected<Typed, TypeCheckError> check(std::string_view text) const {
    return typecheck(expr(text), get_list_env(), {}, t.schema);
  }
};

TEST_F(ValidatorTest, RequestEnvs) {
  auto envs = request_envs(t.schema);
  ASSERT_EQ(envs.size(), 3u);
  EXPECT_EQ(envs[0].action, uid("Action", "CreateList"));
  EXPECT_EQ(envs[0].resource_type, "Application");
}

TEST_F(ValidatorTest, TinyTodoValidates) {
  for (const auto& p : t.policies) EXPECT_TRUE(validate_policy(p, t.schema).empty()) << p.id;
  EXPECT_TRUE(validate_policy_set(t.policies, t.schema).empty());
}

TEST_F(ValidatorTest, PwnerRejected) {
  auto ps = *parse_policy_set(test::slurp("pwner.cedar"));
  EXPECT_FALSE(validate_policy(ps.policies()[0], t.schema).empty());
}

TEST_F(ValidatorTest, IllTypedArithmetic) {
  EXPECT_FALSE(validate_policy(when("1 + true"), t.schema).empty());
  EXPECT_FALSE(check("1 < principal"));
}

TEST_F(ValidatorTest, SetWithOneBadPolicy) {
  auto ps = *parse_policy_set(
      "permit(principal, action, resource);\n"
      "permit(principal, action, resource) when { 1 + true };");
  auto errs = validate_policy_set(ps, t.schema);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs.begin()->first, "policy1");
  EXPECT_TRUE(validate_policy_set(PolicySet{}, t.schema).empty());
}

TEST_F(ValidatorTest, ConditionMustBeBool) {
  EXPECT_FALSE(validate_policy(when("1"), t.schema).empty());
}

TEST_F(ValidatorTest, Types) {
  EXPECT_EQ(check("resource.owner")->type, Type::entity("User"));
  EXPECT_EQ(check("[1, 2]")->type, Type::set(Type::integer()));
  EXPECT_EQ(check("{a: \"x\"}.a")->type, Type::string());
  EXPECT_EQ(check("if true then 1 else 2")->type, Type::integer());
  EXPECT_FALSE(check("if true then 1 else \"a\""));
  EXPECT_FALSE(check("[1, \"a\"]"));
  EXPECT_FALSE(check("1 == \"a\""));
}

TEST_F(ValidatorTest, OptionalAttributeNeedsGuard) {
  RequestEnv create;
  for (const auto& env : request_envs(t.schema)) {
    if (env.action == uid("Action", "CreateList")) create = env;
  }
  EXPECT_FALSE(typecheck(expr("resource.owner == principal"), create, {}, t.schema));
  EXPECT_TRUE(typecheck(expr("resource has owner && resource.owner == principal"), create, {}, t.schema));
  EXPECT_FALSE(typecheck(expr("resource has owner || resource.owner == principal"), create, {}, t.schema));
  EXPECT_TRUE(typecheck(expr("if resource has owner then resource.owner == principal else false"), create,
                        {}, t.schema));
}

TEST_F(ValidatorTest, CapabilitiesFlowOutOfAnd) {
  RequestEnv create;
  for (const auto& env : request_envs(t.schema)) {
    if (env.action == uid("Action", "CreateList")) create = env;
  }
  auto r = typecheck(expr("resource has owner && true"), create, {}, t.schema);
  ASSERT_TRUE(r);
  EXPECT_TRUE(r->caps_if_true.contains(expr("resource"), "owner"));
}

TEST_F(ValidatorTest, ScopeRestrictsEnvironments) {
  // Only CreateList applies to Application; List attributes are not in play.
  auto p = *parse_policy_set(
      "permit(principal, action, resource == Application::\"TinyTodo\") when { resource has owner };");
  EXPECT_TRUE(validate_policy(p.policies()[0], t.schema).empty());
  auto q = *parse_policy_set(
      "permit(principal, action, resource == Application::\"TinyTodo\") when { resource.readers == principal };");
  EXPECT_FALSE(validate_policy(q.policies()[0], t.schema).empty());
}

TEST_F(ValidatorTest, PolicyMatchingNoEnvValidates) {
  auto p = *parse_policy_set("permit(principal == Team::\"r1\", action, resource) when { 1 + true };");
  EXPECT_TRUE(validate_policy(p.policies()[0], t.schema).empty());
}

TEST_F(ValidatorTest, EnvMatchesScope) {
  auto p = *parse_policy_set("permit(principal in Team::\"interns\", action, resource);");
  for (const auto& env : request_envs(t.schema)) {
    EXPECT_TRUE(env_matches_scope(p.policies()[0], env, t.schema));
  }
  auto q = *parse_policy_set("permit(principal in List::\"l1\", action, resource);");
  for (const auto& env : request_envs(t.schema)) {
    EXPECT_FALSE(env_matches_scope(q.policies()[0], env, t.schema));
  }
}

TEST_F(ValidatorTest, ReferenceAgrees) {
  EXPECT_TRUE(reference::validate_policy(t.policies.policies()[1], t.schema));
  EXPECT_FALSE(reference::validate_policy(when("resource.pwner == principal"), t.schema));
  EXPECT_FALSE(reference::validate_policy(when("1 + true"), t.schema));
}

}  // namespace
}  // namespace cedar
