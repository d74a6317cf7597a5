#include "helpers.hpp"

#include "tsm/value.hpp"

#include "check.hpp"

using namespace tsm;

TEST_CASE("canonical rendering") {
    CHECK(render(Value(true)) == "true");
    CHECK(render(Value(std::int64_t{-4})) == "-4");
    CHECK(render(Value::sym("Color", "Red")) == "Color.Red");
    CHECK(render(Value::ident("t1")) == "t1");
    CHECK(render(Value::none()) == "none");

    RecordVal todo{"Todo", {"id", "status"}, {Value::ident("t1"), Value::sym("Status", "done")}};
    CHECK(render(Value(todo)) == "{id: t1, status: Status.done}");
    ListVal l{TypeExpr::record("Todo"), {Value(todo), Value(todo)}};
    CHECK(render(Value(l)) == "[{id: t1, status: Status.done}, {id: t1, status: Status.done}]");
    CHECK(render(Value(ListVal{TypeExpr::integer(), {}})) == "[]");
}

TEST_CASE("values compare structurally") {
    CHECK(Value::ident("t1") == Value::ident("t1"));
    CHECK_FALSE(Value::ident("t1") == Value::none());
    CHECK_FALSE(Value(std::int64_t{1}) == Value(true));
    CHECK(Value(ListVal{TypeExpr::integer(), {Value(std::int64_t{1})}}) ==
          Value(ListVal{TypeExpr::integer(), {Value(std::int64_t{1})}}));
    CHECK_FALSE(Value(ListVal{TypeExpr::integer(), {}}) == Value(ListVal{TypeExpr::id(), {}}));
}

TEST_CASE("type conformance") {
    const Model m = testing::fixture("mytodo.tsm");
    const TypeTable& types = m.types;
    CHECK(types.conforms(Value::sym("Phase", "N"), TypeExpr::enumeration("Phase")));
    CHECK_FALSE(types.conforms(Value::sym("Phase", "X"), TypeExpr::enumeration("Phase")));
    CHECK_FALSE(types.conforms(Value::sym("Status", "done"), TypeExpr::enumeration("Phase")));
    CHECK(types.conforms(Value::none(), TypeExpr::id()));

    RecordVal ok{"Todo", {"id", "status"}, {Value::ident("t1"), Value::sym("Status", "done")}};
    RecordVal extra{"Todo", {"id", "status", "x"}, {Value::ident("t1"), Value::sym("Status", "done"), Value(true)}};
    RecordVal missing{"Todo", {"id"}, {Value::ident("t1")}};
    CHECK(types.conforms(Value(ok), TypeExpr::record("Todo")));
    CHECK_FALSE(types.conforms(Value(extra), TypeExpr::record("Todo")));
    CHECK_FALSE(types.conforms(Value(missing), TypeExpr::record("Todo")));

    ListVal good{TypeExpr::record("Todo"), {Value(ok)}};
    ListVal bad{TypeExpr::record("Todo"), {Value(true)}};
    CHECK(types.conforms(Value(good), TypeExpr::list(TypeExpr::record("Todo"))));
    CHECK_FALSE(types.conforms(Value(bad), TypeExpr::list(TypeExpr::record("Todo"))));
}

TEST_CASE("parseValue reads canonical renderings back") {
    const Model m = testing::fixture("mytodo.tsm");
    const TypeExpr listT = m.findVar("l")->type;
    for (const char* text : {"[]", "[{id: t1, status: Status.notdone}]",
                             "[{id: t2, status: Status.done}, {id: t1, status: Status.delayed}]"}) {
        auto v = parseValue(text, listT, m.types);
        REQUIRE(v);
        CHECK(render(*v) == text);
    }
    CHECK(render(*parseValue("done", TypeExpr::enumeration("Status"), m.types)) == "Status.done");
    CHECK(render(*parseValue("t9", TypeExpr::id(), m.types)) == "t9");
    CHECK(render(*parseValue("none", TypeExpr::id(), m.types)) == "none");

    std::string error;
    CHECK_FALSE(parseValue("Phase.N", TypeExpr::enumeration("Status"), m.types, &error));
    CHECK_FALSE(error.empty());
    CHECK_FALSE(parseValue("[{id: t1}]", listT, m.types));
    CHECK_FALSE(parseValue("1 +", TypeExpr::integer(), m.types));
    CHECK_FALSE(parseValue("len([])", TypeExpr::integer(), m.types));
}
