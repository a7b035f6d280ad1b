#include <gtest/gtest.h>

#include "cedar/reference/model.hpp"
#include "support.hpp"

namespace cedar {
namespace {

using test::uid;

TEST(ReferenceModel, TinyTodoDecisions) {
  auto t = test::tinytodo();
  struct Case {
    const char* file;
    Decision decision;
    std::set<std::string> determining;
  };
  for (const auto& c : {Case{"request_alice_get.json", Decision::Allow, {"policy0", "policy1"}},
                        Case{"request_alice_update.json", Decision::Allow, {"policy0"}},
                        Case{"request_carol_get.json", Decision::Allow, {"policy1"}},
                        Case{"request_bob_create.json", Decision::Deny, {"policy2"}}}) {
    auto r = reference::is_authorized(test::request_file(c.file), t.store, t.policies);
    EXPECT_EQ(r.decision, c.decision) << c.file;
    EXPECT_EQ(r.determining, c.determining) << c.file;
  }
}

TEST(ReferenceModel, Ancestors) {
  auto t = test::tinytodo();
  EXPECT_EQ(reference::ancestors(t.store, uid("User", "bob")), std::set<EntityUID>{uid("Team", "interns")});
  EXPECT_TRUE(reference::ancestors(t.store, uid("User", "nobody")).empty());
}

TEST(ReferenceModel, Evaluate) {
  auto t = test::tinytodo();
  auto req = test::request_file("request_alice_get.json");
  auto ok = reference::evaluate(test::expr("resource has owner && resource.owner == principal"), req, t.store);
  EXPECT_EQ(*ok, Value::boolean(true));
  auto over = reference::evaluate(test::expr("9223372036854775807 + 1"), req, t.store);
  EXPECT_EQ(over.error().kind, EvalError::Kind::Overflow);
}

TEST(ReferenceModel, Slice) {
  auto t = test::tinytodo();
  auto s = reference::slice(t.policies, test::request_file("request_alice_get.json"), t.store);
  EXPECT_EQ(s.size(), 2u);
}

}  // namespace
}  // namespace cedar
