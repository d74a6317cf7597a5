#include "helpers.hpp"

#include "tsm/expr.hpp"
#include "tsm/frontend.hpp"

#include "check.hpp"

#include <random>

using namespace tsm;

namespace {

// Builds a model around one observe expression so the frontend resolves it.
struct Probe {
    Model m;
    StateEnv state;

    Probe(const std::string& expr, const std::string& type, const std::vector<std::string>& values = {}) {
        m = testing::model(R"(model Probe
enum Status { notdone, done, delayed }
enum Other { done2, x }
record Todo { id: id, status: Status }
var l: list<Todo>
var k: id
var n: int
var b: bool
init l := []
init k := none
init n := 0
init b := false
action go
observe (out: )" + expr + ")\nrule r: on go => b := true\n");
        (void)type;
        state = values.empty() ? StateEnv{} : testing::state(m, values);
    }

    Value eval() const {
        std::map<std::string, Value, std::less<>> env;
        for (const auto& [n, v] : state.bindings()) env.emplace(n, v);
        return tsm::eval(*m.observe[0].value, env);
    }
};

std::vector<std::string> todos(const std::string& list, const std::string& k = "none", const std::string& n = "0") {
    return {list, k, n, "false"};
}

} // namespace

TEST_CASE("list builtins") {
    const auto l = todos("[{id: t1, status: Status.done}, {id: t2, status: Status.notdone}, {id: t3, status: Status.notdone}]",
                         "t2");
    CHECK(render(Probe("len(l)", "int", l).eval()) == "3");
    CHECK(render(Probe("count(l where .status != Status.done)", "int", l).eval()) == "2");
    CHECK(render(Probe("exists(l where .id == k)", "bool", l).eval()) == "true");
    CHECK(render(Probe("contains(l, k)", "bool", l).eval()) == "true");
    CHECK(render(Probe("status(l, k)", "Status", l).eval()) == "Status.notdone");
    CHECK(render(Probe("find(l where .status == done).id", "id", l).eval()) == "t1");
    CHECK(render(Probe("remove(l where .id == k)", "", l).eval()) ==
          "[{id: t1, status: Status.done}, {id: t3, status: Status.notdone}]");
    CHECK(render(Probe("update(l where .id == k set status := Status.delayed)", "", l).eval()) ==
          "[{id: t1, status: Status.done}, {id: t2, status: Status.delayed}, {id: t3, status: Status.notdone}]");
    CHECK(render(Probe("add(l, {status: Status.done, id: k})", "", l).eval()).ends_with("{id: t2, status: Status.done}]"));
}

TEST_CASE("evaluation errors are distinct from values") {
    const auto l = todos("[{id: t1, status: Status.done}, {id: t1, status: Status.notdone}]", "t1");
    CHECK_THROWS_AS(Probe("find(l where .id == k)", "", l).eval(), EvalError);
    auto kindOf = [](const Probe& p) -> std::optional<EvalError::Kind> {
        try {
            (void)p.eval();
        } catch (const EvalError& e) {
            CHECK(e.span().valid());
            return e.kind();
        }
        return std::nullopt;
    };
    CHECK(kindOf(Probe("find(l where .status == delayed)", "", l)) == EvalError::Kind::FindMiss);
    CHECK(kindOf(Probe("status(l, k)", "", l)) == EvalError::Kind::FindAmbiguous);
    CHECK(kindOf(Probe("n + 9223372036854775807", "", todos("[]", "none", "1"))) == EvalError::Kind::Overflow);
    CHECK(kindOf(Probe("n - 9223372036854775807 - 3", "", todos("[]", "none", "-1"))) == EvalError::Kind::Overflow);
}

TEST_CASE("short-circuit keeps guarded lookups safe") {
    // status() would miss, but the left operand already decides.
    CHECK(render(Probe("contains(l, k) and status(l, k) == done", "", todos("[]", "t1")).eval()) == "false");
    CHECK(render(Probe("not contains(l, k) or status(l, k) == done", "", todos("[]", "t1")).eval()) == "true");
}

TEST_CASE("operators") {
    const auto s = todos("[]", "none", "5");
    CHECK(render(Probe("n - 7 + 1", "", s).eval()) == "-1");
    CHECK(render(Probe("n - (7 + 1)", "", s).eval()) == "-3");
    CHECK(render(Probe("n >= 5 and n < 6", "", s).eval()) == "true");
    CHECK(render(Probe("k in {none}", "", s).eval()) == "true");
    CHECK(render(Probe("k not in {none}", "", s).eval()) == "false");
    CHECK(render(Probe("not b or false", "", s).eval()) == "true");
}

TEST_CASE("type errors are reported with spans") {
    auto diag = [](const std::string& expr) {
        auto r = parse("model P\nvar n: int\ninit n := 0\naction go\nobserve (o: n)\nrule r: on go when " + expr +
                       " => n := 1\n");
        REQUIRE_FALSE(r.ok());
        return r.diagnostics.front();
    };
    CHECK(diag("n + true == 1").code == std::string(codes::kTypeMismatch));
    CHECK(diag("n").message.find("bool") != std::string::npos);
    CHECK(diag("nosuch == 1").code == std::string(codes::kUnknownName));
    CHECK(diag("len(n) == 1").code == std::string(codes::kTypeMismatch));
    CHECK(diag("count(n) == 1").code == std::string(codes::kSyntax));
    const Diagnostic d = diag("n == 1 and frob(n)");
    CHECK(d.span.startLine == 6);
    CHECK(d.span.startCol == 31);
}

TEST_CASE("ambiguous bare enum members must be qualified") {
    auto r = parse("model P\nenum A { x, y }\nenum B { x, z }\nvar a: A\ninit a := A.x\naction go\n"
                   "observe (o: a)\nrule r: on go when z == z and a == x => a := A.y\n");
    CHECK(r.ok());  // `a == x` resolves through the left operand's type
    r = parse("model P\nenum A { x, y }\nenum B { x, z }\nvar a: A\ninit a := A.x\naction go\n"
              "observe (o: a)\nrule r: on go when x == x => a := A.y\n");
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics.front().message.find("ambiguous") != std::string::npos);
}

TEST_CASE("list operation algebra") {
    // Properties over random lists: remove after add, update idempotence,
    // len/count relations.
    std::mt19937_64 rng(7);
    const char* statuses[] = {"Status.notdone", "Status.done", "Status.delayed"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string list = "[";
        const int n = static_cast<int>(rng() % 5);
        for (int i = 0; i < n; ++i)
            list += std::string(i ? ", " : "") + "{id: t" + std::to_string(rng() % 3) + ", status: " + statuses[rng() % 3] + "}";
        list += "]";
        const std::string k = "t" + std::to_string(rng() % 4);
        const auto s = todos(list, k);
        CAPTURE(list);
        CAPTURE(k);

        const auto lenL = Probe("len(l)", "", s).eval().asInt();
        CHECK(Probe("len(add(l, {id: k, status: done}))", "", s).eval().asInt() == lenL + 1);
        CHECK(Probe("contains(add(l, {id: k, status: done}), k)", "", s).eval().asBool());
        CHECK_FALSE(Probe("contains(remove(l where .id == k), k)", "", s).eval().asBool());
        CHECK(render(Probe("remove(add(remove(l where .id == k), {id: k, status: done}) where .id == k)", "", s).eval()) ==
              render(Probe("remove(l where .id == k)", "", s).eval()));
        CHECK(render(Probe("update(update(l where .id == k set status := done) where .id == k set status := done)", "", s)
                         .eval()) == render(Probe("update(l where .id == k set status := done)", "", s).eval()));
        CHECK(Probe("count(l where .id == k) + len(remove(l where .id == k))", "", s).eval().asInt() == lenL);
        CHECK(Probe("count(l where .status == done) + count(l where .status != done)", "", s).eval().asInt() == lenL);
        CHECK(Probe("exists(l where .id == k)", "", s).eval().asBool() == Probe("contains(l, k)", "", s).eval().asBool());
        CHECK(Probe("len(update(l where .id == k set status := delayed))", "", s).eval().asInt() == lenL);
    }
}

TEST_CASE("formatting re-parses to the same tree") {
    for (const char* text : {"n - (n - 1)", "n - n - 1", "not (b and b) or b", "(b or b) and b", "n + -3 > -1",
                             "count(l where .status in {done, delayed}) == 0",
                             "find(l where .id == k).status != Status.delayed", "k not in {none}",
                             "len(update(l where .id == k set status := done)) > 0",
                             "len([{id: k, status: done}]) == 1"}) {
        CAPTURE(text);
        const Probe a(text, "");
        const std::string once = formatExpr(*a.m.observe[0].value);
        const Probe b(once, "");
        CHECK(sameExpr(*a.m.observe[0].value, *b.m.observe[0].value));
        CHECK(formatExpr(*b.m.observe[0].value) == once);
    }
    CHECK(formatExpr(*Probe("n - (n - 1)", "").m.observe[0].value) == "n - (n - 1)");
    CHECK(formatExpr(*Probe("(n - n) - 1", "").m.observe[0].value) == "n - n - 1");
    CHECK(formatExpr(*Probe("done == Status.done", "").m.observe[0].value) == "Status.done == Status.done");
}
