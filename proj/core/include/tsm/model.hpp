#pragma once

#include "tsm/decls.hpp"
#include "tsm/expr.hpp"
#include "tsm/value.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsm {

struct VarDecl {
    std::string name;
    TypeExpr type;
    SourceSpan span;
};

struct InitAssign {
    std::string var;
    ExprPtr value;
    SourceSpan span;
};

struct ActionSig {
    std::string name;
    std::vector<FieldDecl> params;
    SourceSpan span;
};

struct Update {
    std::string var;
    ExprPtr value;
    SourceSpan span;
};

/// One case of the transition relation.
struct Rule {
    std::string label;
    std::string action;
    ExprPtr guard;  // null means `true`
    std::vector<Update> updates;
    std::optional<std::string> implLink;
    SourceSpan span;
    SourceSpan actionSpan;
};

struct ObserveOutput {
    std::string name;
    ExprPtr value;
    SourceSpan span;
};

struct Invariant {
    std::string name;
    ExprPtr condition;
    SourceSpan span;
};

/// The six-tuple: state variables (X), one initial assignment (X0),
/// action signatures (U), ordered guarded rules (f) and the observe clause
/// (Y and h), plus invariants and free-form metadata.
struct Model {
    std::string name;
    SourceSpan nameSpan;
    TypeTable types;
    std::vector<VarDecl> stateVars;
    std::vector<InitAssign> init;
    std::vector<ActionSig> actions;
    std::vector<Rule> rules;
    std::vector<ObserveOutput> observe;
    std::vector<Invariant> invariants;
    std::map<std::string, std::string> meta;

    [[nodiscard]] const VarDecl* findVar(std::string_view name) const;
    [[nodiscard]] const ActionSig* findAction(std::string_view name) const;
    [[nodiscard]] const Rule* findRule(std::string_view label) const;

    /// Stable hash of the canonical formatting; ties analysis results to the
    /// model they were computed from.
    [[nodiscard]] std::string fingerprint() const;
};

/// Metadata key that declares the implementation a model maps to. Models that
/// carry it are expected to link every rule with `@impl`.
inline constexpr const char* kImplementationMeta = "implementation";

/// Ordered variable → value map; one element of X (or of Y, for ObsEnv).
class Env {
public:
    using Binding = std::pair<std::string, Value>;

    Env() = default;
    explicit Env(std::vector<Binding> bindings) : bindings_(std::move(bindings)) {}

    [[nodiscard]] const Value* find(std::string_view name) const;
    [[nodiscard]] const Value& at(std::string_view name) const;
    void set(std::string_view name, Value value);

    [[nodiscard]] const std::vector<Binding>& bindings() const { return bindings_; }
    [[nodiscard]] std::size_t size() const { return bindings_.size(); }

    /// `{name: value, ...}` in binding order.
    [[nodiscard]] std::string canonical() const;

    friend bool operator==(const Env&, const Env&) = default;

private:
    std::vector<Binding> bindings_;
};

using StateEnv = Env;
using ObsEnv = Env;

struct ActionInstance {
    std::string name;
    std::vector<Value> args;

    /// `name` or `name(arg, ...)`.
    [[nodiscard]] std::string canonical() const;
    friend bool operator==(const ActionInstance&, const ActionInstance&) = default;
};

} // namespace tsm
