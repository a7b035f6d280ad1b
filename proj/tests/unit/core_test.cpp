#include <gtest/gtest.h>

#include "cedar/conformance.hpp"
#include "cedar/entities.hpp"
#include "cedar/utf8.hpp"
#include "cedar/value.hpp"
#include "support.hpp"

namespace cedar {
namespace {

using test::uid;

Entities chain() {
  std::map<EntityUID, EntityData> d;
  d[uid("A", "a")].parents = {uid("B", "b")};
  d[uid("B", "b")].parents = {uid("C", "c")};
  d[uid("C", "c")];
  return *Entities::make(std::move(d));
}

TEST(Ancestors, TransitiveChain) {
  auto s = chain();
  EXPECT_EQ(ancestors(s, uid("A", "a")), (std::set<EntityUID>{uid("B", "b"), uid("C", "c")}));
  EXPECT_TRUE(ancestors(s, uid("C", "c")).empty());
}

TEST(Ancestors, UnknownEntityHasNone) {
  Entities empty;
  EXPECT_TRUE(ancestors(empty, uid("A", "a")).empty());
}

TEST(Ancestors, TinyTodoIntern) {
  auto t = test::tinytodo();
  EXPECT_EQ(ancestors(t.store, uid("User", "bob")), std::set<EntityUID>{uid("Team", "interns")});
}

TEST(Ancestors, FixedPoint) {
  auto s = chain();
  for (const auto& [u, d] : s.data()) {
    std::set<EntityUID> expect = d.parents;
    for (const auto& p : d.parents) {
      auto more = ancestors(s, p);
      expect.insert(more.begin(), more.end());
    }
    EXPECT_EQ(ancestors(s, u), expect);
  }
}

TEST(Entities, CycleRejected) {
  std::map<EntityUID, EntityData> d;
  d[uid("A", "a")].parents = {uid("B", "b")};
  d[uid("B", "b")].parents = {uid("A", "a")};
  EXPECT_FALSE(Entities::make(std::move(d)));
}

TEST(InRelation, Reflexive) {
  Entities empty;
  EXPECT_TRUE(in_relation(empty, uid("User", "alice"), uid("User", "alice")));
}

TEST(InRelation, ThroughParent) {
  auto t = test::tinytodo();
  EXPECT_TRUE(in_relation(t.store, uid("User", "bob"), uid("Team", "interns")));
  EXPECT_FALSE(in_relation(t.store, uid("User", "alice"), uid("Team", "interns")));
}

TEST(InRelation, UnrelatedInEmptyStore) {
  Entities empty;
  EXPECT_FALSE(in_relation(empty, uid("User", "a"), uid("User", "b")));
}

TEST(InRelation, Transitive) {
  auto s = chain();
  EXPECT_TRUE(in_relation(s, uid("A", "a"), uid("C", "c")));
  EXPECT_FALSE(in_relation(s, uid("C", "c"), uid("A", "a")));
}

TEST(Value, SetIgnoresOrderAndDuplicates) {
  auto a = Value::set({Value::integer(2), Value::integer(1), Value::integer(2)});
  auto b = Value::set({Value::integer(1), Value::integer(2)});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.as_set().size(), 2u);
}

TEST(Value, CrossKindOrderingIsTotal) {
  auto b = Value::boolean(true);
  auto l = Value::integer(0);
  EXPECT_NE(b, l);
  EXPECT_TRUE((b < l) != (l < b));
}

TEST(Value, Printing) {
  EXPECT_EQ(to_string(Value::string("a\"b")), "\"a\\\"b\"");
  EXPECT_EQ(to_string(uid("Team", "interns")), "Team::\"interns\"");
}

TEST(EntityUID, NamespacedType) {
  auto u = EntityUID::of("A::B::Action", "x");
  EXPECT_EQ(u.type_path().size(), 3u);
  EXPECT_EQ(u.type_name(), "A::B::Action");
  EXPECT_TRUE(u.is_action());
  EXPECT_FALSE(uid("User", "x").is_action());
}

TEST(Conformance, EmptyStoreConforms) {
  auto t = test::tinytodo();
  EXPECT_TRUE(store_conforms(Entities{}, t.schema));
}

TEST(Conformance, TinyTodoStoreConforms) {
  auto t = test::tinytodo();
  EXPECT_TRUE(store_conformance_errors(t.store, t.schema).empty());
}

TEST(Conformance, UndeclaredAttributeNamed) {
  auto t = test::tinytodo();
  auto data = t.store.data();
  data[uid("List", "l1")].attrs["pwner"] = Value::entity(uid("User", "alice"));
  auto errs = store_conformance_errors(*Entities::make(data), t.schema);
  ASSERT_FALSE(errs.empty());
  EXPECT_NE(errs.front().find("pwner"), std::string::npos);
}

TEST(Conformance, MissingRequiredAttribute) {
  auto t = test::tinytodo();
  auto data = t.store.data();
  data[uid("List", "l1")].attrs.erase("owner");
  EXPECT_FALSE(store_conforms(*Entities::make(data), t.schema));
}

TEST(Conformance, WrongAttributeType) {
  auto t = test::tinytodo();
  auto data = t.store.data();
  data[uid("List", "l1")].attrs["owner"] = Value::string("alice");
  EXPECT_FALSE(store_conforms(*Entities::make(data), t.schema));
}

TEST(Conformance, DisallowedParentType) {
  auto t = test::tinytodo();
  auto data = t.store.data();
  data[uid("Team", "r1")].parents = {uid("User", "alice")};
  EXPECT_FALSE(store_conforms(*Entities::make(data), t.schema));
}

TEST(Conformance, UndeclaredEntityType) {
  auto t = test::tinytodo();
  auto data = t.store.data();
  data[uid("Photo", "p")];
  EXPECT_FALSE(store_conforms(*Entities::make(data), t.schema));
}

TEST(RequestConformance, Accepts) {
  auto t = test::tinytodo();
  EXPECT_TRUE(request_conforms(test::request_file("request_alice_get.json"), t.schema));
}

TEST(RequestConformance, WrongPrincipalType) {
  auto t = test::tinytodo();
  Request r{uid("List", "l1"), uid("Action", "GetList"), uid("List", "l1")};
  EXPECT_FALSE(request_conforms(r, t.schema));
}

TEST(RequestConformance, UndeclaredAction) {
  auto t = test::tinytodo();
  Request r{uid("User", "alice"), uid("Action", "DeleteList"), uid("List", "l1")};
  EXPECT_FALSE(request_conforms(r, t.schema));
}

TEST(RequestConformance, ContextShape) {
  auto t = test::tinytodo();
  Request r{uid("User", "alice"), uid("Action", "GetList"), uid("List", "l1"),
            Value::record({{"extra", Value::integer(1)}})};
  EXPECT_FALSE(request_conforms(r, t.schema));
}

TEST(Schema, WellFormedness) {
  auto t = test::tinytodo();
  EXPECT_TRUE(t.schema.well_formedness_errors().empty());
  t.schema.entity_types["List"].attributes["x"] = {Type::entity("Nope"), true};
  EXPECT_FALSE(t.schema.well_formedness_errors().empty());
}

TEST(Schema, AncestorTypes) {
  auto t = test::tinytodo();
  EXPECT_EQ(t.schema.ancestor_types("User"), (std::set<std::string>{"User", "Team"}));
}

TEST(Schema, ClosedRecords) {
  Schema s;
  auto rec = Type::record({{"a", {Type::integer(), true}}, {"b", {Type::string(), false}}});
  EXPECT_TRUE(value_has_type(Value::record({{"a", Value::integer(1)}}), rec, s));
  EXPECT_FALSE(value_has_type(Value::record({{"b", Value::string("x")}}), rec, s));
  EXPECT_FALSE(value_has_type(Value::record({{"a", Value::integer(1)}, {"c", Value::integer(1)}}), rec, s));
}

TEST(Utf8, StrictDecoding) {
  EXPECT_EQ(decode_utf8("\xc3\xa9t\xc3\xa9"), std::u32string(U"\u00e9t\u00e9"));
  EXPECT_FALSE(decode_utf8("\xc0\xaf"));      // overlong
  EXPECT_FALSE(decode_utf8("\xed\xa0\x80"));  // surrogate
  EXPECT_EQ(first_invalid_utf8("ab\xff"), 2u);
  EXPECT_EQ(encode_utf8(U"\U0001F600"), "\xf0\x9f\x98\x80");
}

}  // namespace
}  // namespace cedar
