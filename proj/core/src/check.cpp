#include "check.hpp"

#include <map>
#include <set>
#include <string>

namespace tsm::detail {

namespace {

class ModelChecker {
public:
    explicit ModelChecker(const Model& model) : out_(model) {}

    std::vector<Diagnostic> run();
    Model take() { return std::move(out_); }

private:
    void error(const char* code, const SourceSpan& span, std::string message,
               std::optional<std::string> hint = std::nullopt) {
        diags_.push_back({Severity::Error, code, span, std::move(message), std::move(hint)});
    }
    void warning(const char* code, const SourceSpan& span, std::string message,
                 std::optional<std::string> hint = std::nullopt) {
        diags_.push_back({Severity::Warning, code, span, std::move(message), std::move(hint)});
    }
    void merge(std::vector<Diagnostic> more) {
        for (auto& d : more) diags_.push_back(std::move(d));
    }

    std::optional<TypeExpr> resolveType(const TypeExpr& t, const SourceSpan& span);
    ExprPtr checkExpr(const ExprPtr& expr, const TypeScope& scope, const TypeExpr& expected,
                      const std::string& what, const SourceSpan& fallback);

    void checkDeclarations();
    void checkInit();
    void checkActions();
    void checkRules();
    void checkObserve();
    void checkInvariants();
    void checkWarnings();

    TypeScope stateScope() const {
        TypeScope scope{&out_.types, {}};
        for (const auto& v : out_.stateVars) scope.vars.emplace(v.name, v.type);
        return scope;
    }

    Model out_;
    std::vector<Diagnostic> diags_;
    std::set<std::string> badVars_;  // variables whose type failed to resolve
};

bool isLiteralTree(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Literal: return true;
        case Expr::Kind::RecordLit:
        case Expr::Kind::ListLit:
            for (const auto& o : e.operands)
                if (!isLiteralTree(*o)) return false;
            return true;
        default: return false;
    }
}

std::optional<TypeExpr> ModelChecker::resolveType(const TypeExpr& t, const SourceSpan& span) {
    switch (t.kind()) {
        case TypeExpr::Kind::List: {
            if (t.element().kind() == TypeExpr::Kind::List) {
                error(codes::kBadType, span, "lists of lists are not supported");
                return std::nullopt;
            }
            auto elem = resolveType(t.element(), span);
            if (!elem) return std::nullopt;
            return TypeExpr::list(*elem);
        }
        case TypeExpr::Kind::Enum:
        case TypeExpr::Kind::Record:
            if (out_.types.findEnum(t.name())) return TypeExpr::enumeration(t.name());
            if (out_.types.findRecord(t.name())) return TypeExpr::record(t.name());
            error(codes::kUnknownType, span, "unknown type " + t.name());
            return std::nullopt;
        default: return t;
    }
}

ExprPtr ModelChecker::checkExpr(const ExprPtr& expr, const TypeScope& scope, const TypeExpr& expected,
                                const std::string& what, const SourceSpan& fallback) {
    if (!expr) return nullptr;
    auto result = typecheck(*expr, scope, &expected);
    if (!result.ok()) {
        merge(std::move(result.diagnostics));
        return nullptr;
    }
    if (!(result.typed->type == expected)) {
        error(codes::kTypeMismatch, expr->span.valid() ? expr->span : fallback,
              what + " expects " + expected.str() + ", found " + result.typed->type.str());
        return nullptr;
    }
    return result.typed->expr;
}

void ModelChecker::checkDeclarations() {
    std::map<std::string, const SourceSpan*> typeNames;
    auto declareType = [&](const std::string& name, const SourceSpan& span) {
        if (!typeNames.emplace(name, &span).second) error(codes::kDuplicate, span, "type " + name + " declared twice");
    };
    for (const auto& e : out_.types.enums) {
        declareType(e.name, e.span);
        std::set<std::string> members;
        for (const auto& m : e.members)
            if (!members.insert(m).second) error(codes::kDuplicate, e.span, "enum " + e.name + " repeats member " + m);
    }
    for (const auto& r : out_.types.records) declareType(r.name, r.span);

    for (auto& r : out_.types.records) {
        std::set<std::string> names;
        for (auto& f : r.fields) {
            if (!names.insert(f.name).second) error(codes::kDuplicate, f.span, "record " + r.name + " repeats field " + f.name);
            if (f.type.kind() == TypeExpr::Kind::List) {
                error(codes::kBadType, f.span, "record fields may not be lists");
                continue;
            }
            if (auto t = resolveType(f.type, f.span)) f.type = *t;
        }
    }
    // Records nested in records must not be self-referential.
    for (const auto& r : out_.types.records)
        for (const auto& f : r.fields)
            if (f.type.kind() == TypeExpr::Kind::Record && f.type.name() == r.name)
                error(codes::kBadType, f.span, "record " + r.name + " contains itself");

    std::set<std::string> vars;
    for (auto& v : out_.stateVars) {
        if (!vars.insert(v.name).second) error(codes::kDuplicate, v.span, "variable " + v.name + " declared twice");
        if (auto t = resolveType(v.type, v.span))
            v.type = *t;
        else
            badVars_.insert(v.name);
    }
}

void ModelChecker::checkInit() {
    const TypeScope scope{&out_.types, {}};
    std::set<std::string> assigned;
    for (auto& init : out_.init) {
        const VarDecl* var = out_.findVar(init.var);
        if (!var) {
            error(codes::kUnknownName, init.span, "init assigns undeclared variable " + init.var);
            continue;
        }
        if (!assigned.insert(init.var).second) {
            error(codes::kDuplicate, init.span, "init assigns " + init.var + " twice");
            continue;
        }
        if (badVars_.count(init.var) || !init.value) continue;
        auto result = typecheck(*init.value, scope, &var->type);
        if (!result.ok()) {
            merge(std::move(result.diagnostics));
            continue;
        }
        if (!isLiteralTree(*result.typed->expr)) {
            error(codes::kBadLiteral, init.value->span, "init value for " + init.var + " must be a literal");
            continue;
        }
        if (!(result.typed->type == var->type)) {
            error(codes::kTypeMismatch, init.value->span,
                  "init of " + init.var + " expects " + var->type.str() + ", found " + result.typed->type.str());
            continue;
        }
        init.value = result.typed->expr;
    }
    for (const auto& v : out_.stateVars)
        if (!assigned.count(v.name)) error(codes::kInitCoverage, v.span, "init does not cover variable " + v.name);
}

void ModelChecker::checkActions() {
    std::set<std::string> names;
    for (auto& a : out_.actions) {
        if (!names.insert(a.name).second) error(codes::kDuplicate, a.span, "action " + a.name + " declared twice");
        std::set<std::string> params;
        for (auto& p : a.params) {
            if (!params.insert(p.name).second)
                error(codes::kDuplicate, p.span, "action " + a.name + " repeats parameter " + p.name);
            if (out_.findVar(p.name))
                error(codes::kDuplicate, p.span, "parameter " + p.name + " shadows a state variable");
            if (auto t = resolveType(p.type, p.span)) {
                p.type = *t;
                if (!p.type.isScalar())
                    error(codes::kBadType, p.span, "action parameters must be bool, int, id or an enum");
            }
        }
    }
}

void ModelChecker::checkRules() {
    std::set<std::string> labels;
    const TypeScope base = stateScope();
    for (auto& rule : out_.rules) {
        if (!labels.insert(rule.label).second) error(codes::kDuplicate, rule.span, "rule " + rule.label + " declared twice");
        const ActionSig* action = out_.findAction(rule.action);
        if (!action) {
            error(codes::kUnknownAction, rule.actionSpan, "unknown action " + rule.action);
            continue;
        }
        TypeScope scope = base;
        for (const auto& p : action->params) scope.vars[p.name] = p.type;

        if (rule.guard) rule.guard = checkExpr(rule.guard, scope, TypeExpr::boolean(), "guard", rule.span);

        std::set<std::string> targets;
        for (auto& u : rule.updates) {
            const VarDecl* var = out_.findVar(u.var);
            if (!var) {
                error(codes::kUnknownName, u.span, "update of undeclared variable " + u.var);
                continue;
            }
            if (!targets.insert(u.var).second) {
                error(codes::kDuplicateUpdate, u.span, "rule " + rule.label + " updates " + u.var + " twice");
                continue;
            }
            if (badVars_.count(u.var)) continue;
            u.value = checkExpr(u.value, scope, var->type, "update of " + u.var, u.span);
        }
    }
}

void ModelChecker::checkObserve() {
    const TypeScope scope = stateScope();
    std::set<std::string> names;
    for (auto& o : out_.observe) {
        if (!names.insert(o.name).second) error(codes::kDuplicate, o.span, "observable " + o.name + " declared twice");
        if (!o.value) continue;
        auto result = typecheck(*o.value, scope, nullptr);
        if (!result.ok()) {
            merge(std::move(result.diagnostics));
            continue;
        }
        o.value = result.typed->expr;
    }
}

void ModelChecker::checkInvariants() {
    const TypeScope scope = stateScope();
    std::set<std::string> names;
    for (auto& inv : out_.invariants) {
        if (!names.insert(inv.name).second) error(codes::kDuplicate, inv.span, "invariant " + inv.name + " declared twice");
        inv.condition = checkExpr(inv.condition, scope, TypeExpr::boolean(), "invariant", inv.span);
    }
}

void ModelChecker::checkWarnings() {
    for (const auto& a : out_.actions) {
        bool used = false;
        for (const auto& r : out_.rules) used = used || r.action == a.name;
        if (!used) warning(codes::kUnusedAction, a.span, "action " + a.name + " has no rule");
    }
    if (!out_.meta.count(kImplementationMeta)) return;
    for (const auto& r : out_.rules)
        if (!r.implLink)
            warning(codes::kMissingImpl, r.span, "rule lacks @impl link", "annotate rule " + r.label + " with @impl(\"path:line\")");
}

std::vector<Diagnostic> ModelChecker::run() {
    checkDeclarations();
    checkActions();
    checkInit();
    checkRules();
    checkObserve();
    checkInvariants();
    checkWarnings();
    return std::move(diags_);
}

} // namespace

std::vector<Diagnostic> checkModel(const Model& model, Model* resolved) {
    ModelChecker checker(model);
    auto diags = checker.run();
    if (resolved) *resolved = checker.take();
    return diags;
}

} // namespace tsm::detail
