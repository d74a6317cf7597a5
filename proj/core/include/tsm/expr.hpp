#pragma once

#include "tsm/decls.hpp"
#include "tsm/diagnostic.hpp"
#include "tsm/value.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsm {

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Guard, update and observe expressions.
///
/// The parser produces unresolved trees: `Color.Red` arrives as a field
/// access on a variable named `Color`, and bare enum members (`done`) as
/// variable references. `typecheck` returns a resolved copy in which those
/// become literals, record literals are reordered to declaration order and
/// list literals carry their element type. Only resolved trees are evaluated.
struct Expr {
    enum class Kind {
        Literal,
        VarRef,
        It,           // the element bound by a `where` clause
        FieldAccess,  // operands[0].name
        Compare,      // operands[0] cmp operands[1]
        And,
        Or,
        Not,
        InSet,        // operands[0] in {operands[1..]}
        Arith,        // operands[0] arith operands[1]
        Call,         // name(operands...) [where predicate] [set setField := setValue]
        RecordLit,    // {fieldNames[i]: operands[i]}
        ListLit,      // [operands...]
    };

    Kind kind = Kind::Literal;
    SourceSpan span;
    Value value;
    std::string name;
    std::vector<ExprPtr> operands;
    std::vector<std::string> fieldNames;
    CompareOp cmp = CompareOp::Eq;
    ArithOp arith = ArithOp::Add;
    bool negated = false;
    ExprPtr where;
    std::string setField;
    ExprPtr setValue;
    TypeExpr type;  // element type of a resolved ListLit; record type of a resolved RecordLit

    static ExprPtr literal(Value v, SourceSpan span = {});
    static ExprPtr var(std::string name, SourceSpan span = {});
};

/// Builtins that accept a `where` clause.
[[nodiscard]] bool isListBuiltin(std::string_view name);
[[nodiscard]] bool isBuiltin(std::string_view name);

/// Variables visible to an expression and the declarations they refer to.
struct TypeScope {
    const TypeTable* types = nullptr;
    std::map<std::string, TypeExpr, std::less<>> vars;
    /// Read unbound bare names of expected type `id` as id tokens. Used when
    /// parsing canonical values, never for model expressions.
    bool bareIdLiterals = false;
};

struct TypedExpr {
    ExprPtr expr;
    TypeExpr type;
};

struct TypeCheckResult {
    std::optional<TypedExpr> typed;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return typed.has_value(); }
};

/// Checks `expr` in `scope`. `expected`, when given, drives inference for
/// record literals, empty lists and bare enum members; it is a hint, not a
/// constraint, so callers still compare the returned type.
[[nodiscard]] TypeCheckResult typecheck(const Expr& expr, const TypeScope& scope,
                                        const TypeExpr* expected = nullptr);

class EvalError : public std::runtime_error {
public:
    enum class Kind { FindMiss, FindAmbiguous, NoSuchField, TypeMismatchAtRuntime, Overflow, UnboundName };

    EvalError(Kind kind, SourceSpan span, const std::string& detail);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] const SourceSpan& span() const { return span_; }

private:
    Kind kind_;
    SourceSpan span_;
};

[[nodiscard]] const char* toString(EvalError::Kind kind);

/// Non-owning name → value lookup used during evaluation. Bound values must
/// outlive the Bindings.
class Bindings {
public:
    Bindings() = default;
    explicit Bindings(const std::map<std::string, Value, std::less<>>& env);

    void bind(std::string_view name, const Value& value) { slots_.emplace_back(name, &value); }
    [[nodiscard]] const Value* find(std::string_view name) const;

private:
    std::vector<std::pair<std::string_view, const Value*>> slots_;
};

/// Evaluates a resolved expression. Pure: never mutates its inputs.
[[nodiscard]] Value eval(const Expr& expr, const Bindings& env);
[[nodiscard]] Value eval(const Expr& expr, const std::map<std::string, Value, std::less<>>& env);

/// Canonical source text of an expression, parenthesized only where needed.
[[nodiscard]] std::string formatExpr(const Expr& expr);

/// Structural equality of resolved trees, ignoring spans.
[[nodiscard]] bool sameExpr(const Expr& a, const Expr& b);

} // namespace tsm
