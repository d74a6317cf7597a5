#include "tsm/analysis.hpp"
#include "tsm/frontend.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace tsm;

namespace {

std::string fixtureText(const char* name) {
    std::ifstream in(std::string(TSM_FIXTURES) + "/" + name, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Model fixture(const char* name) {
    auto r = parse(fixtureText(name));
    if (!r.ok()) throw std::runtime_error(std::string(name) + " does not parse");
    return std::move(*r.model);
}

void BM_ParseMyTodo(benchmark::State& state) {
    const std::string src = fixtureText("mytodo.tsm");
    for (auto _ : state) benchmark::DoNotOptimize(parse(src));
}
BENCHMARK(BM_ParseMyTodo);

void BM_FormatMyTodo(benchmark::State& state) {
    const Model m = fixture("mytodo.tsm");
    for (auto _ : state) benchmark::DoNotOptimize(formatModel(m));
}
BENCHMARK(BM_FormatMyTodo);

void BM_StepMyTodo(benchmark::State& state) {
    const Model m = fixture("mytodo.tsm");
    const ExplorationResult ex = explore(m, Universe{}, 10000);
    std::size_t i = 0;
    for (auto _ : state) {
        const Transition& t = ex.transitions[i++ % ex.transitions.size()];
        benchmark::DoNotOptimize(step(m, ex.states[t.from], t.action));
    }
}
BENCHMARK(BM_StepMyTodo);

// Argument: maxListLen, over a four-id pool.
void BM_ExploreMyTodo(benchmark::State& state) {
    const Model m = fixture("mytodo.tsm");
    Universe u;
    u.idPool = {"t1", "t2", "t3", "t4"};
    u.maxListLen = static_cast<std::size_t>(state.range(0));
    std::size_t states = 0;
    for (auto _ : state) {
        const ExplorationResult r = explore(m, u, 1'000'000);
        states = r.states.size();
        benchmark::DoNotOptimize(r.transitions.data());
    }
    state.counters["states"] = static_cast<double>(states);
    state.counters["states/s"] = benchmark::Counter(static_cast<double>(states), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ExploreMyTodo)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_QuestionsMyTodo(benchmark::State& state) {
    const Model m = fixture("mytodo.tsm");
    for (auto _ : state) benchmark::DoNotOptimize(questionsReport(m, explore(m, Universe{}, 10000)));
}
BENCHMARK(BM_QuestionsMyTodo)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
