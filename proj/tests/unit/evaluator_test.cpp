#include <gtest/gtest.h>

#include "cedar/authorizer.hpp"
#include "cedar/evaluator.hpp"
#include "support.hpp"

namespace cedar {
namespace {

using test::expr;
using test::uid;

class EvaluatorTest : public ::testing::Test {
 protected:
  test::TinyTodo t = test::tinytodo();
  Request alice_get = test::request_file("request_alice_get.json");

  Expected<Value, EvalError> eval(std::string_view text, const Request& r) const {
    return evaluate(expr(text), r, t.store);
  }
  Expected<Value, EvalError> eval(std::string_view text) const { return eval(text, alice_get); }

  static EvalError::Kind kind_of(const Expected<Value, EvalError>& r) { return r.error().kind; }
};

TEST_F(EvaluatorTest, OwnerCheck) {
  auto r = eval("resource has owner && resource.owner == principal");
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, Value::boolean(true));
}

TEST_F(EvaluatorTest, MissingAttribute) {
  auto r = eval("resource.pwner");
  ASSERT_FALSE(r);
  EXPECT_EQ(kind_of(r), EvalError::Kind::MissingAttr);
}

TEST_F(EvaluatorTest, EntityComparisonIsTypeError) {
  auto r = eval("principal < resource");
  ASSERT_FALSE(r);
  EXPECT_EQ(kind_of(r), EvalError::Kind::TypeError);
}

TEST_F(EvaluatorTest, ShortCircuitAbsorbsError) {
  EXPECT_EQ(*eval("false && (1 < User::\"x\")"), Value::boolean(false));
  EXPECT_EQ(*eval("true || (1 < User::\"x\")"), Value::boolean(true));
  EXPECT_FALSE(eval("true && (1 < User::\"x\")"));
}

TEST_F(EvaluatorTest, Overflow) {
  auto r = eval("9223372036854775807 + 1");
  ASSERT_FALSE(r);
  EXPECT_EQ(kind_of(r), EvalError::Kind::Overflow);
  EXPECT_EQ(kind_of(eval("-9223372036854775808 - 1")), EvalError::Kind::Overflow);
  EXPECT_EQ(kind_of(eval("-(-9223372036854775808)")), EvalError::Kind::Overflow);
  EXPECT_EQ(*eval("-9223372036854775808"), Value::integer(INT64_MIN));
}

TEST_F(EvaluatorTest, InThroughAttribute) {
  Request carol = test::request_file("request_carol_get.json");
  EXPECT_EQ(*eval("principal in resource.readers", carol), Value::boolean(true));
  EXPECT_EQ(*eval("principal in resource.readers"), Value::boolean(false));
}

TEST_F(EvaluatorTest, InSetOfEntities) {
  EXPECT_EQ(*eval("principal in [Team::\"r1\", Team::\"e1\"]"), Value::boolean(true));
  EXPECT_EQ(*eval("principal in []"), Value::boolean(false));
  EXPECT_FALSE(eval("principal in [1]"));
}

TEST_F(EvaluatorTest, EqualityAcrossKindsIsFalse) {
  EXPECT_EQ(*eval("1 == \"1\""), Value::boolean(false));
  EXPECT_EQ(*eval("principal != 1"), Value::boolean(true));
  EXPECT_EQ(*eval("[1, 2] == [2, 1, 1]"), Value::boolean(true));
  EXPECT_EQ(*eval("{a: 1} == {a: 1}"), Value::boolean(true));
}

TEST_F(EvaluatorTest, UnknownEntityHasNoAttributes) {
  EXPECT_EQ(*eval("User::\"nobody\" has name"), Value::boolean(false));
  EXPECT_EQ(kind_of(eval("User::\"nobody\".name")), EvalError::Kind::MissingAttr);
}

TEST_F(EvaluatorTest, IfRequiresBool) {
  EXPECT_EQ(*eval("if 1 < 2 then \"a\" else 3"), Value::string("a"));
  EXPECT_EQ(kind_of(eval("if 1 then 2 else 3")), EvalError::Kind::TypeError);
}

TEST_F(EvaluatorTest, Contains) {
  EXPECT_EQ(*eval("[1, 2].contains(2)"), Value::boolean(true));
  EXPECT_EQ(*eval("[1, 2].contains(\"2\")"), Value::boolean(false));
  EXPECT_EQ(kind_of(eval("1.contains(1)")), EvalError::Kind::TypeError);
}

TEST_F(EvaluatorTest, Records) {
  EXPECT_EQ(*eval("{\"display name\": 3}[\"display name\"]"), Value::integer(3));
  EXPECT_EQ(*eval("{a: 1} has a"), Value::boolean(true));
  EXPECT_EQ(kind_of(eval("{a: 1}.b")), EvalError::Kind::MissingAttr);
  EXPECT_EQ(kind_of(eval("1 has a")), EvalError::Kind::TypeError);
}

TEST_F(EvaluatorTest, Like) {
  EXPECT_EQ(*eval("\"été\" like \"*t?\""), Value::boolean(false));
  EXPECT_EQ(*eval("\"été\" like \"*t*\""), Value::boolean(true));
  EXPECT_EQ(*eval("\"a*b\" like \"a\\*b\""), Value::boolean(true));
  EXPECT_EQ(*eval("\"axb\" like \"a\\*b\""), Value::boolean(false));
  EXPECT_EQ(*eval("\"\" like \"*\""), Value::boolean(true));
}

TEST(WildcardMatch, CodePoints) {
  Pattern p{PatternElem::literal(U'é'), PatternElem::star()};
  EXPECT_TRUE(wildcard_match(U"é", p));
  EXPECT_TRUE(wildcard_match(U"éxyz", p));
  EXPECT_FALSE(wildcard_match(U"e", p));
}

TEST_F(EvaluatorTest, Context) {
  Request r = alice_get;
  r.context = Value::record({{"n", Value::integer(4)}});
  EXPECT_EQ(*eval("context.n - 1 >= 3", r), Value::boolean(true));
}

TEST_F(EvaluatorTest, DeepNestingHitsGuardNotStack) {
  Expr e = Expr::boolean(true);
  for (std::size_t i = 0; i < kMaxEvalDepth + 10; ++i) e = Expr::not_(e);
  auto r = evaluate(e, alice_get, t.store);
  ASSERT_FALSE(r);
  EXPECT_EQ(r.error().kind, EvalError::Kind::ArityOrDomain);
}

TEST_F(EvaluatorTest, ScopeMatching) {
  const Policy& p3 = t.policies.policies()[2];
  Request bob = test::request_file("request_bob_create.json");
  EXPECT_TRUE(scope_matches(p3, bob, t.store));
  Request bob_l1 = bob;
  bob_l1.resource = uid("List", "l1");
  EXPECT_FALSE(scope_matches(p3, bob_l1, t.store));
  EXPECT_TRUE(scope_matches(t.policies.policies()[0], bob, t.store));
}

TEST_F(EvaluatorTest, ActionGroupScope) {
  Policy p;
  p.action = ActionScopeConstraint::in({uid("Action", "UpdateList"), uid("Action", "GetList")});
  EXPECT_TRUE(scope_matches(p, alice_get, t.store));
  p.action = ActionScopeConstraint::in({uid("Action", "CreateList")});
  EXPECT_FALSE(scope_matches(p, alice_get, t.store));
}

TEST_F(EvaluatorTest, Satisfaction) {
  const Policy& p1 = t.policies.policies()[0];
  EXPECT_EQ(satisfied(p1, alice_get, t.store), Satisfaction::satisfied());

  Request ownerless = alice_get;
  ownerless.resource = uid("Team", "r1");
  EXPECT_EQ(satisfied(p1, ownerless, t.store), Satisfaction::not_satisfied());

  Policy bad;
  bad.conditions.push_back({ConditionKind::When, expr("1 + true")});
  auto s = satisfied(bad, alice_get, t.store);
  EXPECT_EQ(s.kind, Satisfaction::Kind::Errored);
  EXPECT_EQ(s.error.kind, EvalError::Kind::TypeError);

  Policy non_bool;
  non_bool.conditions.push_back({ConditionKind::When, expr("1")});
  EXPECT_EQ(satisfied(non_bool, alice_get, t.store).kind, Satisfaction::Kind::Errored);

  Policy unless;
  unless.conditions.push_back({ConditionKind::Unless, expr("false")});
  EXPECT_EQ(satisfied(unless, alice_get, t.store), Satisfaction::satisfied());
}

class AuthorizerTest : public EvaluatorTest {};

TEST_F(AuthorizerTest, SatisfiedPolicies) {
  EXPECT_EQ(satisfied_policies(Effect::Permit, t.policies, alice_get, t.store),
            (std::set<std::string>{"policy0", "policy1"}));
  EXPECT_TRUE(satisfied_policies(Effect::Forbid, t.policies, alice_get, t.store).empty());
  EXPECT_TRUE(satisfied_policies(Effect::Permit, PolicySet{}, alice_get, t.store).empty());
}

TEST_F(AuthorizerTest, OwnerAllowed) {
  auto r = is_authorized(alice_get, t.store, t.policies);
  EXPECT_EQ(r.decision, Decision::Allow);
  EXPECT_EQ(r.determining, (std::set<std::string>{"policy0", "policy1"}));
  EXPECT_TRUE(r.errors.empty());
}

TEST_F(AuthorizerTest, ForbidWinsOverSatisfiedPermit) {
  Request bob = test::request_file("request_bob_create.json");
  ASSERT_EQ(satisfied_policies(Effect::Permit, t.policies, bob, t.store), std::set<std::string>{"policy0"});
  auto r = is_authorized(bob, t.store, t.policies);
  EXPECT_EQ(r.decision, Decision::Deny);
  EXPECT_EQ(r.determining, std::set<std::string>{"policy2"});
}

TEST_F(AuthorizerTest, EmptySetDenies) {
  auto r = is_authorized(alice_get, t.store, PolicySet{});
  EXPECT_EQ(r.decision, Decision::Deny);
  EXPECT_TRUE(r.determining.empty());
}

TEST_F(AuthorizerTest, ErroringPolicyIgnored) {
  auto ps = *parse_policy_set(
      "permit(principal, action, resource) when { resource.pwner == principal };\n"
      "permit(principal, action, resource) when { resource.owner == principal };\n"
      "forbid(principal, action, resource) when { 1 + true };");
  auto r = is_authorized(alice_get, t.store, ps);
  EXPECT_EQ(r.decision, Decision::Allow);
  EXPECT_EQ(r.determining, std::set<std::string>{"policy1"});
  EXPECT_EQ(r.erroring_ids(), (std::set<std::string>{"policy0", "policy2"}));
  ASSERT_EQ(r.errors.size(), 2u);
  EXPECT_EQ(r.errors[0].second.kind, EvalError::Kind::MissingAttr);
  EXPECT_EQ(r.errors[1].second.kind, EvalError::Kind::TypeError);
}

TEST_F(AuthorizerTest, SliceExcludesApplicationForbid) {
  auto s = slice(t.policies, alice_get, t.store);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.policies()[0].id, "policy0");
  EXPECT_EQ(s.policies()[1].id, "policy1");
  EXPECT_EQ(slice(s, alice_get, t.store), s);
  EXPECT_EQ(is_authorized(alice_get, t.store, s), is_authorized(alice_get, t.store, t.policies));
}

TEST_F(AuthorizerTest, SliceKeepsUnconstrainedPolicies) {
  auto ps = *parse_policy_set("permit(principal, action, resource);\nforbid(principal, action, resource);");
  EXPECT_EQ(slice(ps, alice_get, t.store), ps);
}

TEST(PolicySet, DuplicateIdsRejected) {
  Policy a;
  a.id = "x";
  EXPECT_FALSE(PolicySet::make({a, a}));
  Policy b = a;
  b.id = "y";
  EXPECT_TRUE(PolicySet::make({a, b}));
}

}  // namespace
}  // namespace cedar
