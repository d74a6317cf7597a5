#pragma once

#include "tsm/model.hpp"
#include "tsm/semantics.hpp"
#include "tsm/session.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsm {

// ---------------------------------------------------------------------------
// Bounded state-space exploration
// ---------------------------------------------------------------------------

struct Transition {
    std::size_t from = 0;
    ActionInstance action;
    std::string rule;
    std::size_t to = 0;
};

struct UndefinedPair {
    std::size_t state = 0;
    std::string action;
    ActionInstance witness;  // first instance of `action` found undefined
};

struct EvalFailure {
    std::size_t state = 0;
    ActionInstance action;
    std::string detail;
};

struct InvariantViolation {
    std::string invariant;
    std::size_t state = 0;
    std::vector<ActionInstance> path;  // from the initial state
};

/// Reachable fragment of the state space. States are indexed in breadth-first
/// discovery order; index 0 is the initial state.
struct ExplorationResult {
    std::string modelFingerprint;
    Universe universe;
    std::map<std::string, std::vector<std::string>> actionParams;  // parameter names per action
    std::vector<StateEnv> states;
    std::vector<std::string> canonical;  // canonical rendering per state
    std::vector<Transition> transitions;
    std::vector<UndefinedPair> undefinedPairs;
    std::vector<std::size_t> deadlocks;
    std::vector<InvariantViolation> invariantViolations;
    std::vector<EvalFailure> evalFailures;
    bool frontierTruncated = false;  // maxStates reached
    std::size_t listBoundPruned = 0;  // successors dropped for exceeding maxListLen

    [[nodiscard]] std::optional<std::size_t> indexOf(const std::string& canonicalState) const;
};

/// Breadth-first closure over `step` from the initial state.
[[nodiscard]] ExplorationResult explore(const Model& model, const Universe& universe, std::size_t maxStates);

// ---------------------------------------------------------------------------
// Conformance
// ---------------------------------------------------------------------------

struct DivergenceReport {
    enum class Status { Conformant, Diverged, ModelUndefined };

    Status status = Status::Conformant;
    std::optional<std::size_t> stepIndex;
    std::optional<ObsEnv> expected;
    std::optional<ObsEnv> actual;
    std::optional<StateEnv> stateAtDivergence;
    std::optional<std::string> firedRule;
    std::optional<std::string> detail;  // evaluation error text, if any
};

[[nodiscard]] const char* toString(DivergenceReport::Status status);

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ConformanceOptions {
    /// Compare list outputs element by element instead of as id-keyed sets.
    bool strictOrder = false;
};

/// Replays the observed actions and compares each predicted observable with
/// the expected one. Throws PreconditionError if any step lacks expectations.
[[nodiscard]] DivergenceReport checkConformance(const Model& model, const Trace& observed,
                                                const ConformanceOptions& options = {});

/// Observable equality as used by the conformance checker.
[[nodiscard]] bool observablesMatch(const ObsEnv& expected, const ObsEnv& actual, bool strictOrder);

// ---------------------------------------------------------------------------
// Model diff
// ---------------------------------------------------------------------------

struct Change {
    std::string name;
    std::string detail;
    friend bool operator==(const Change&, const Change&) = default;
};

struct CategoryDiff {
    std::vector<std::string> added;
    std::vector<std::string> removed;
    std::vector<Change> changed;

    [[nodiscard]] bool empty() const { return added.empty() && removed.empty() && changed.empty(); }
};

struct RuleChange {
    std::string label;
    bool actionChanged = false;
    bool guardChanged = false;
    bool updatesChanged = false;
    bool implChanged = false;
    bool moved = false;  // position among rules differs
};

struct ModelDiff {
    CategoryDiff enums;
    CategoryDiff enumMembers;   // "Enum.Member"
    CategoryDiff records;
    CategoryDiff recordFields;  // "Record.field"
    CategoryDiff stateVars;
    CategoryDiff init;
    CategoryDiff actions;
    std::vector<std::string> rulesAdded;
    std::vector<std::string> rulesRemoved;
    std::vector<RuleChange> rulesChanged;
    CategoryDiff observe;
    CategoryDiff invariants;

    [[nodiscard]] bool empty() const;
};

[[nodiscard]] ModelDiff diffModels(const Model& oldModel, const Model& newModel);

// ---------------------------------------------------------------------------
// Learner questions
// ---------------------------------------------------------------------------

struct QuestionItem {
    enum class Kind { UndefinedTransition, OverlappingRules, UnreachableEnumMember, UnusedAction, RuleWithoutImplLink };

    Kind kind = Kind::UndefinedTransition;
    std::vector<std::string> subject;
    std::optional<std::string> witnessState;
    std::optional<std::string> witnessAction;
    std::optional<SourceSpan> span;
    std::string prompt;
};

[[nodiscard]] const char* toString(QuestionItem::Kind kind);

struct UnderspecReport {
    std::vector<QuestionItem> questions;
    [[nodiscard]] std::size_t count(QuestionItem::Kind kind) const;
};

class StaleExploration : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Items ordered by kind: undefined transitions, overlapping rules,
/// unreachable enum members, unused actions, rules without @impl.
/// Throws StaleExploration if `exploration` came from a different model.
[[nodiscard]] UnderspecReport questionsReport(const Model& model, const ExplorationResult& exploration);

// ---------------------------------------------------------------------------
// Graph export
// ---------------------------------------------------------------------------

enum class GraphFormat { Dot, Json };

[[nodiscard]] std::string exportGraph(const ExplorationResult& exploration, GraphFormat format);

} // namespace tsm
