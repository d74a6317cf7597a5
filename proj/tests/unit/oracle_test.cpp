#include "check.hpp"

#include "fuzz_models.hpp"
#include "helpers.hpp"
#include "mytodo_oracle.hpp"

#include "tsm/analysis.hpp"

#include <chrono>

using namespace tsm;

namespace {

using Edge = std::tuple<std::string, std::string, std::string, std::string>;

std::set<std::string> stateSet(const ExplorationResult& r) { return {r.canonical.begin(), r.canonical.end()}; }

std::set<Edge> edgeSet(const ExplorationResult& r) {
    std::set<Edge> out;
    for (const auto& t : r.transitions) out.emplace(r.canonical[t.from], t.action.canonical(), t.rule, r.canonical[t.to]);
    return out;
}

} // namespace

TEST_CASE("explore matches the brute-force myTodo enumerator") {
    const Model m = testing::fixture("mytodo.tsm");
    const auto start = std::chrono::steady_clock::now();
    for (const std::vector<std::string>& ids : {std::vector<std::string>{"t1"}, std::vector<std::string>{"t1", "t2"}}) {
        for (std::size_t maxLen : {1, 2, 3}) {
            CAPTURE(ids.size());
            CAPTURE(maxLen);
            Universe u;
            u.idPool = ids;
            u.maxListLen = maxLen;
            const ExplorationResult r = explore(m, u, 1'000'000);
            const oracle::TodoGraph g = oracle::exploreMyTodo(ids, maxLen);
            CHECK_FALSE(r.frontierTruncated);
            CHECK(r.states.size() == g.states.size());
            CHECK(stateSet(r) == g.states);
            CHECK(r.transitions.size() == g.transitions.size());
            CHECK(edgeSet(r) == g.transitions);
        }
    }
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(30));
}

TEST_CASE("explore matches product-space enumeration on random enum models") {
    fuzz::Rng rng(99);
    for (int i = 0; i < 300; ++i) {
        const fuzz::EnumModel em = fuzz::randomEnumModel(rng, i);
        const Model m = testing::model(em.source());
        const ExplorationResult r = explore(m, Universe{}, 1'000'000);
        const fuzz::EnumGraph g = fuzz::enumOracle(em);
        CAPTURE(em.source());
        CHECK(stateSet(r) == g.states);
        CHECK(edgeSet(r) == g.transitions);
        std::set<std::pair<std::string, std::string>> undefined;
        for (const auto& p : r.undefinedPairs) undefined.emplace(r.canonical[p.state], p.action);
        CHECK(undefined == g.undefined);
        for (const auto& p : r.undefinedPairs) CHECK(step(m, r.states[p.state], p.witness).undefined());
    }
}

TEST_CASE("the traffic light as an enum model") {
    fuzz::EnumModel em;
    em.name = "TrafficLight";
    em.enums = {{"Color", {"Red", "Yellow", "Green", "Black"}}};
    em.varEnum = {0};
    em.init = {3};
    em.actions = {{"timerflip", {}}, {"manualswitch", {}}};
    em.rules = {
        {"r1", 0, {{0, true, 0}}, false, {{0, fuzz::EnumModel::Update::Member, 1}}},
        {"r2", 0, {{0, true, 1}}, false, {{0, fuzz::EnumModel::Update::Member, 2}}},
        {"r3", 0, {{0, true, 2}}, false, {{0, fuzz::EnumModel::Update::Member, 0}}},
        {"r4", 0, {{0, true, 3}}, false, {{0, fuzz::EnumModel::Update::Member, 0}}},
        {"r5", 1, {{0, false, 3}}, false, {{0, fuzz::EnumModel::Update::Member, 3}}},
    };
    const fuzz::EnumGraph g = fuzz::enumOracle(em);
    CHECK(g.states.size() == 4);
    CHECK(g.transitions.size() == 7);
    CHECK(g.undefined.size() == 1);

    const Model fixture = testing::fixture("trafficlight.tsm");
    const ExplorationResult r = explore(fixture, Universe{}, 100);
    std::set<std::string> states;
    for (const auto& s : r.states) states.insert("{v0: " + s.at("s").asSym().enumName + "." + s.at("s").asSym().member + "}");
    CHECK(states == g.states);
}
