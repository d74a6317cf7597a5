#pragma once

#include "tsm/diagnostic.hpp"
#include "tsm/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tsm {

/// Re-checks every model invariant on a parsed model. Empty iff well formed.
[[nodiscard]] std::vector<Diagnostic> validateModel(const Model& model);

struct Fired {
    std::string ruleLabel;
    StateEnv nextState;
    ObsEnv observable;
};

struct Undefined {};

/// Result of one application of the transition relation. `Undefined` means
/// no rule matched; evaluation failures are thrown as EvalError instead.
class StepOutcome {
public:
    StepOutcome(Fired fired) : data_(std::move(fired)) {}  // NOLINT(google-explicit-constructor)
    StepOutcome(Undefined u) : data_(u) {}  // NOLINT(google-explicit-constructor)

    [[nodiscard]] bool fired() const { return std::holds_alternative<Fired>(data_); }
    [[nodiscard]] bool undefined() const { return !fired(); }
    [[nodiscard]] const Fired& get() const { return std::get<Fired>(data_); }

private:
    std::variant<Fired, Undefined> data_;
};

/// Raised when a caller hands the engine a state or action that does not fit
/// the model's declarations.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluates the init assignment into the single initial state.
[[nodiscard]] StateEnv initialState(const Model& model);

/// Fires the first rule (in declaration order) matching the action whose
/// guard holds. Updates read the pre-state.
[[nodiscard]] StepOutcome step(const Model& model, const StateEnv& state, const ActionInstance& action);

/// Applies the display map h.
[[nodiscard]] ObsEnv observe(const Model& model, const StateEnv& state);

/// Static type of each observe output, in clause order.
[[nodiscard]] std::vector<std::pair<std::string, TypeExpr>> observeTypes(const Model& model);

/// Labels of every rule for `action` whose guard holds in `state`, in
/// declaration order. Used for overlap detection.
[[nodiscard]] std::vector<std::string> matchingRules(const Model& model, const StateEnv& state,
                                                     const ActionInstance& action);

/// Throws ModelError unless the action names a declared signature with
/// well-typed arguments.
void checkAction(const Model& model, const ActionInstance& action);
/// Throws ModelError unless the state binds exactly the declared variables
/// with conforming values.
void checkState(const Model& model, const StateEnv& state);

/// Finite candidate values for action parameters and a bound on list sizes.
struct Universe {
    std::vector<std::string> idPool{"t1", "t2"};
    std::size_t maxListLen = 3;
    std::pair<std::int64_t, std::int64_t> intRange{0, 3};
};

class UniverseMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Every action instance over the universe, in (declaration order, universe
/// value order). Throws UniverseMismatch when an id parameter meets an empty
/// id pool.
[[nodiscard]] std::vector<ActionInstance> actionInstances(const Model& model, const Universe& universe);

/// The instances from `actionInstances` for which step fires.
[[nodiscard]] std::vector<ActionInstance> enabledActions(const Model& model, const StateEnv& state,
                                                         const Universe& universe);

} // namespace tsm
