#include "helpers.hpp"

#include "tsm/session.hpp"

#include "check.hpp"

#include <random>

using namespace tsm;
using testing::act;

TEST_CASE("fire, undo, reset") {
    auto m = testing::shared(testing::fixture("trafficlight.tsm"));
    Session s(m);
    CHECK(s.current().canonical() == "{s: Color.Black}");
    CHECK_THROWS_AS(s.undo(), EmptyHistory);

    CHECK(s.fire(act(*m, "manualswitch")).undefined());
    CHECK(s.historySize() == 0);
    CHECK(s.current().canonical() == "{s: Color.Black}");

    CHECK(s.fire(act(*m, "timerflip")).get().ruleLabel == "r4");
    CHECK(s.fire(act(*m, "timerflip")).get().ruleLabel == "r1");
    CHECK(s.current().canonical() == "{s: Color.Yellow}");
    s.undo();
    CHECK(s.current().canonical() == "{s: Color.Red}");
    CHECK(s.recorded().steps.size() == 1);
    s.reset();
    CHECK(s.current().canonical() == "{s: Color.Black}");
    CHECK(s.historySize() == 0);
    CHECK(s.recorded().steps.empty());
    CHECK_THROWS_AS(s.fire(ActionInstance{"nope", {}}), ModelError);
}

TEST_CASE("sessions are independent") {
    auto m = testing::shared(testing::fixture("trafficlight.tsm"));
    Session a(m), b(m);
    (void)a.fire(act(*m, "timerflip"));
    CHECK(a.current().canonical() == "{s: Color.Red}");
    CHECK(b.current().canonical() == "{s: Color.Black}");
}

TEST_CASE("undo restores each earlier state") {
    auto m = testing::shared(testing::fixture("mytodo.tsm"));
    std::mt19937_64 rng(11);
    const auto instances = actionInstances(*m, Universe{});
    for (int round = 0; round < 50; ++round) {
        Session s(m);
        std::vector<std::string> seen{s.current().canonical()};
        while (seen.size() < 21) {
            if (s.fire(instances[rng() % instances.size()]).fired()) seen.push_back(s.current().canonical());
        }
        const std::size_t k = 1 + rng() % 20;
        for (std::size_t i = 0; i < k; ++i) s.undo();
        CHECK(s.current().canonical() == seen[seen.size() - 1 - k]);
        CHECK(s.historySize() == 20 - k);
    }
}

TEST_CASE("replay") {
    const Model m = testing::fixture("mytodo.tsm");
    Trace t{"MyTodo", {{act(m, "Add", {"t1"}), {}}, {act(m, "Add", {"t2"}), {}}, {act(m, "MarkDone", {"t1"}), {}}}};
    ReplayResult r = replay(m, t);
    CHECK_FALSE(r.halt);
    REQUIRE(r.steps.size() == 3);
    CHECK(r.steps[2].ruleLabel == "markSome");
    CHECK(r.finalState.canonical() ==
          "{s: Phase.S, l: [{id: t1, status: Status.done}, {id: t2, status: Status.notdone}], last: t1}");

    const Model tl = testing::fixture("trafficlight.tsm");
    Trace halts{"TrafficLight", {{act(tl, "timerflip"), {}}, {act(tl, "manualswitch"), {}}, {act(tl, "manualswitch"), {}}}};
    r = replay(tl, halts);
    REQUIRE(r.halt);
    CHECK(r.halt->index == 2);
    CHECK(r.halt->reason == ReplayHalt::Reason::Undefined);
    CHECK(r.steps.size() == 2);
    CHECK(r.finalState.canonical() == "{s: Color.Black}");

    CHECK(replay(tl, Trace{"TrafficLight", {}}).finalState.canonical() == "{s: Color.Black}");
}

TEST_CASE("trace JSON round trip and errors") {
    const Model m = testing::fixture("mytodo.tsm");
    const Trace golden = readTraceFile(m, testing::fixturePath("traces/mytodo_golden.json"));
    CHECK(golden.steps.size() == 10);
    const Trace again = readTrace(m, writeTrace(m, golden));
    REQUIRE(again.steps.size() == golden.steps.size());
    for (std::size_t i = 0; i < golden.steps.size(); ++i) {
        CHECK(again.steps[i].action.canonical() == golden.steps[i].action.canonical());
        CHECK((again.steps[i].expectedObs == golden.steps[i].expectedObs));
    }

    const char* bad[] = {
        "not json",
        "[]",
        R"({"model": "Other", "steps": []})",
        R"({"model": "MyTodo"})",
        R"({"steps": [{"args": {}}]})",
        R"({"steps": [{"action": "Zap"}]})",
        R"({"steps": [{"action": "Add", "args": {}}]})",
        R"({"steps": [{"action": "Add", "args": {"t": "t1", "u": "t2"}}]})",
        R"({"steps": [{"action": "Add", "args": {"t": 3}}]})",
        R"({"steps": [{"action": "Add", "args": {"t": "t1"}, "expected": {"l": "[]"}}]})",
        R"({"steps": [{"action": "Add", "args": {"t": "t1"}, "expected": {"l": "[]", "t": "t1", "z": 1}}]})",
        R"({"steps": [{"action": "Add", "args": {"t": "t1"}, "expected": {"l": "[{id: t1}]", "t": "t1"}}]})",
    };
    for (const char* text : bad) CHECK_THROWS_AS((void)readTrace(m, text), TraceError);
    CHECK_THROWS_AS((void)readTraceFile(m, "/nonexistent/trace.json"), TraceError);

    CHECK(readAction(m, R"({"action": "Remove", "args": {"t": "t2"}})").canonical() == "Remove(t2)");
    CHECK(readAction(m, R"({"action": "Add", "args": {"t": null}})").canonical() == "Add(none)");
}

TEST_CASE("trace length limit") {
    const Model m = testing::fixture("trafficlight.tsm");
    Trace t{"TrafficLight", std::vector<TraceStep>(kMaxTraceSteps + 1, TraceStep{act(m, "timerflip"), {}})};
    CHECK_THROWS_AS((void)replay(m, t), TraceError);
    t.steps.pop_back();
    ReplayResult r = replay(m, t);
    CHECK_FALSE(r.halt);
    CHECK(r.steps.size() == kMaxTraceSteps);

    std::string big = R"({"steps": [)";
    for (std::size_t i = 0; i <= kMaxTraceSteps; ++i) big += std::string(i ? "," : "") + R"({"action": "timerflip"})";
    big += "]}";
    CHECK_THROWS_AS((void)readTrace(m, big), TraceError);
}
