#pragma once

#include "tsm/model.hpp"
#include "tsm/semantics.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsm {

struct TraceStep {
    ActionInstance action;
    std::optional<ObsEnv> expectedObs;
};

struct Trace {
    std::string model;
    std::vector<TraceStep> steps;
};

/// Traces longer than this are refused by replay and the trace reader.
inline constexpr std::size_t kMaxTraceSteps = 100'000;

class TraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads the JSON trace format:
/// `{"model": ..., "steps": [{"action": ..., "args": {...}, "expected": {...} | null}]}`.
/// Values are canonical renderings in JSON strings; JSON booleans and
/// integers are also accepted. Throws TraceError.
[[nodiscard]] Trace readTrace(const Model& model, const std::string& json);
[[nodiscard]] Trace readTraceFile(const Model& model, const std::string& path);
/// Reads one `{"action": ..., "args": {...}}` object in the trace encoding.
[[nodiscard]] ActionInstance readAction(const Model& model, const std::string& json);
[[nodiscard]] std::string writeTrace(const Model& model, const Trace& trace);

class EmptyHistory : public std::logic_error {
public:
    EmptyHistory() : std::logic_error("no history to undo") {}
};

/// A live simulation. Single owner; callers serialize mutation.
class Session {
public:
    explicit Session(std::shared_ptr<const Model> model);

    [[nodiscard]] const Model& model() const { return *model_; }
    [[nodiscard]] const StateEnv& current() const { return current_; }
    [[nodiscard]] const Trace& recorded() const { return recorded_; }
    [[nodiscard]] std::size_t historySize() const { return history_.size(); }

    /// Advances on Fired; leaves the session untouched on Undefined or when
    /// evaluation throws.
    StepOutcome fire(const ActionInstance& action);
    /// Restores the state before the last fired action. Throws EmptyHistory.
    void undo();
    void reset();

private:
    struct Entry {
        ActionInstance action;
        StateEnv prior;
    };

    std::shared_ptr<const Model> model_;
    StateEnv current_;
    std::vector<Entry> history_;
    Trace recorded_;
};

struct ReplayStep {
    std::string ruleLabel;
    StateEnv state;
    ObsEnv observable;
};

struct ReplayHalt {
    enum class Reason { Undefined, EvalError };
    std::size_t index = 0;
    Reason reason = Reason::Undefined;
    std::string detail;
};

struct ReplayResult {
    std::vector<ReplayStep> steps;
    std::optional<ReplayHalt> halt;
    StateEnv finalState;
};

/// Folds step over the trace from the initial state, halting at the first
/// Undefined outcome or evaluation error. Expected observables are ignored.
[[nodiscard]] ReplayResult replay(const Model& model, const Trace& trace);

} // namespace tsm
