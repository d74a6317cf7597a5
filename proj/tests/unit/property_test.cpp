#include "check.hpp"

#include "fuzz_models.hpp"
#include "helpers.hpp"
#include "traces.hpp"

#include "tsm/analysis.hpp"
#include "tsm/frontend.hpp"

using namespace tsm;

TEST_CASE("explored rich models are closed under step") {
    fuzz::Rng rng(17);
    Universe u;
    u.maxListLen = 2;
    u.intRange = {0, 1};
    for (int i = 0; i < 60; ++i) {
        const Model m = testing::model(fuzz::richModelSource(rng, i));
        const ExplorationResult r = explore(m, u, 300);
        CHECK(r.canonical[0] == initialState(m).canonical());
        std::set<std::string> unique(r.canonical.begin(), r.canonical.end());
        CHECK(unique.size() == r.states.size());
        for (std::size_t k = 0; k < r.states.size(); ++k) {
            CHECK_NOTHROW(checkState(m, r.states[k]));
            CHECK(r.states[k].canonical() == r.canonical[k]);
            // canonical values read back to the same value
            for (const auto& var : m.stateVars) {
                const Value& v = r.states[k].at(var.name);
                CHECK(testing::parseVal(m, render(v), var.type) == v);
            }
        }
        for (const auto& t : r.transitions) {
            const StepOutcome o = step(m, r.states[t.from], t.action);
            REQUIRE(o.fired());
            CHECK(o.get().ruleLabel == t.rule);
            CHECK(o.get().nextState.canonical() == r.canonical[t.to]);
        }
        const ExplorationResult again = explore(m, u, 300);
        CHECK(again.canonical == r.canonical);
        CHECK(again.transitions.size() == r.transitions.size());
        CHECK(exportGraph(again, GraphFormat::Json) == exportGraph(r, GraphFormat::Json));
    }
}

TEST_CASE("formatting preserves behaviour") {
    fuzz::Rng rng(23);
    Universe u;
    u.maxListLen = 2;
    u.intRange = {0, 1};
    for (int i = 0; i < 40; ++i) {
        const Model m = testing::model(fuzz::richModelSource(rng, i));
        const Model f = testing::model(formatModel(m));
        CHECK(diffModels(m, f).empty());
        const ExplorationResult a = explore(m, u, 200);
        const ExplorationResult b = explore(f, u, 200);
        CHECK(a.canonical == b.canonical);
        CHECK(a.undefinedPairs.size() == b.undefinedPairs.size());
    }
}

TEST_CASE("written traces replay identically") {
    std::mt19937_64 rng(8);
    for (const char* name : {"trafficlight.tsm", "mytodo.tsm", "mytodo_expire.tsm"}) {
        const Model m = testing::fixture(name);
        for (int i = 0; i < 30; ++i) {
            const Trace t = testing::selfTrace(m, Universe{}, rng, 25);
            const Trace back = readTrace(m, writeTrace(m, t));
            const ReplayResult a = replay(m, t);
            const ReplayResult b = replay(m, back);
            CHECK(a.finalState == b.finalState);
            CHECK(checkConformance(m, back).status == DivergenceReport::Status::Conformant);
        }
    }
}
