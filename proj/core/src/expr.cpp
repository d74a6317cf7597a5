#include "tsm/expr.hpp"

#include <algorithm>
#include <array>

namespace tsm {

namespace {

constexpr std::array<std::string_view, 9> kBuiltins = {"len",  "count", "exists", "contains", "find",
                                                       "add",  "remove", "update", "status"};
constexpr std::array<std::string_view, 5> kWhereBuiltins = {"count", "exists", "remove", "update", "find"};

std::shared_ptr<Expr> cloneNode(const Expr& e) { return std::make_shared<Expr>(e); }

const char* compareText(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "==";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Type checking
// ---------------------------------------------------------------------------

class Checker {
public:
    explicit Checker(const TypeScope& scope) : scope_(scope) {}

    std::optional<TypedExpr> check(const Expr& e, const TypeExpr* expected);
    std::vector<Diagnostic> takeDiagnostics() { return std::move(diags_); }

private:
    std::optional<TypedExpr> fail(const SourceSpan& span, const char* code, std::string message,
                                  std::optional<std::string> hint = std::nullopt) {
        diags_.push_back({Severity::Error, code, span, std::move(message), std::move(hint)});
        return std::nullopt;
    }

    bool inScope(const std::string& name) const { return scope_.vars.count(name) > 0; }
    const TypeTable& types() const { return *scope_.types; }

    /// True when the node's type can only be known from context.
    bool needsHint(const Expr& e) const {
        switch (e.kind) {
            case Expr::Kind::VarRef: return !inScope(e.name);
            case Expr::Kind::RecordLit: return true;
            case Expr::Kind::ListLit: return e.operands.empty();
            default: return false;
        }
    }

    std::optional<TypedExpr> checkVar(const Expr& e, const TypeExpr* expected);
    std::optional<TypedExpr> checkField(const Expr& e);
    std::optional<TypedExpr> checkCompare(const Expr& e);
    std::optional<TypedExpr> checkInSet(const Expr& e);
    std::optional<TypedExpr> checkCall(const Expr& e, const TypeExpr* expected);
    std::optional<TypedExpr> checkRecord(const Expr& e, const TypeExpr* expected);
    std::optional<TypedExpr> checkList(const Expr& e, const TypeExpr* expected);
    std::optional<TypedExpr> checkBool(const Expr& e, const char* what);

    const TypeScope& scope_;
    std::vector<Diagnostic> diags_;
    std::vector<TypeExpr> itTypes_;
};

TypeExpr typeOfLiteral(const Value& v) {
    if (v.isBool()) return TypeExpr::boolean();
    if (v.isInt()) return TypeExpr::integer();
    if (v.isSym()) return TypeExpr::enumeration(v.asSym().enumName);
    if (v.isId()) return TypeExpr::id();
    if (v.isRecord()) return TypeExpr::record(v.asRecord().typeName);
    return TypeExpr::list(v.asList().elementType);
}

std::optional<TypedExpr> Checker::checkBool(const Expr& e, const char* what) {
    auto bool_t = TypeExpr::boolean();
    auto r = check(e, &bool_t);
    if (!r) return r;
    if (!(r->type == bool_t))
        return fail(e.span, codes::kTypeMismatch, std::string(what) + " requires bool, found " + r->type.str());
    return r;
}

std::optional<TypedExpr> Checker::check(const Expr& e, const TypeExpr* expected) {
    switch (e.kind) {
        case Expr::Kind::Literal: return TypedExpr{cloneNode(e), typeOfLiteral(e.value)};
        case Expr::Kind::VarRef: return checkVar(e, expected);
        case Expr::Kind::It:
            if (itTypes_.empty())
                return fail(e.span, codes::kUnknownName, "element reference outside a where clause");
            return TypedExpr{cloneNode(e), itTypes_.back()};
        case Expr::Kind::FieldAccess: return checkField(e);
        case Expr::Kind::Compare: return checkCompare(e);
        case Expr::Kind::And:
        case Expr::Kind::Or: {
            const char* what = e.kind == Expr::Kind::And ? "and" : "or";
            auto lhs = checkBool(*e.operands[0], what);
            auto rhs = checkBool(*e.operands[1], what);
            if (!lhs || !rhs) return std::nullopt;
            auto out = cloneNode(e);
            out->operands = {lhs->expr, rhs->expr};
            return TypedExpr{out, TypeExpr::boolean()};
        }
        case Expr::Kind::Not: {
            auto operand = checkBool(*e.operands[0], "not");
            if (!operand) return std::nullopt;
            auto out = cloneNode(e);
            out->operands = {operand->expr};
            return TypedExpr{out, TypeExpr::boolean()};
        }
        case Expr::Kind::InSet: return checkInSet(e);
        case Expr::Kind::Arith: {
            auto int_t = TypeExpr::integer();
            auto lhs = check(*e.operands[0], &int_t);
            auto rhs = check(*e.operands[1], &int_t);
            if (!lhs || !rhs) return std::nullopt;
            if (!(lhs->type == int_t) || !(rhs->type == int_t))
                return fail(e.span, codes::kTypeMismatch, "arith requires Int",
                            "found " + lhs->type.str() + " and " + rhs->type.str());
            auto out = cloneNode(e);
            out->operands = {lhs->expr, rhs->expr};
            return TypedExpr{out, int_t};
        }
        case Expr::Kind::Call: return checkCall(e, expected);
        case Expr::Kind::RecordLit: return checkRecord(e, expected);
        case Expr::Kind::ListLit: return checkList(e, expected);
    }
    return fail(e.span, codes::kSyntax, "malformed expression");
}

std::optional<TypedExpr> Checker::checkVar(const Expr& e, const TypeExpr* expected) {
    if (auto it = scope_.vars.find(e.name); it != scope_.vars.end()) return TypedExpr{cloneNode(e), it->second};

    if (scope_.bareIdLiterals && expected && expected->kind() == TypeExpr::Kind::Id)
        return TypedExpr{Expr::literal(Value::ident(e.name), e.span), *expected};

    // Bare enum member: prefer the expected enum, else a unique owner.
    if (expected && expected->kind() == TypeExpr::Kind::Enum) {
        const EnumDecl* decl = types().findEnum(expected->name());
        if (decl && decl->hasMember(e.name))
            return TypedExpr{Expr::literal(Value::sym(decl->name, e.name), e.span), *expected};
    }
    const EnumDecl* owner = nullptr;
    int owners = 0;
    for (const auto& decl : types().enums) {
        if (decl.hasMember(e.name)) {
            owner = &decl;
            ++owners;
        }
    }
    if (owners == 1)
        return TypedExpr{Expr::literal(Value::sym(owner->name, e.name), e.span),
                         TypeExpr::enumeration(owner->name)};
    if (owners > 1)
        return fail(e.span, codes::kUnknownName, "ambiguous enum member " + e.name,
                    "qualify it as Enum." + e.name);
    return fail(e.span, codes::kUnknownName, "unknown name " + e.name);
}

std::optional<TypedExpr> Checker::checkField(const Expr& e) {
    const Expr& base = *e.operands[0];
    if (base.kind == Expr::Kind::VarRef && !inScope(base.name)) {
        if (const EnumDecl* decl = types().findEnum(base.name)) {
            if (!decl->hasMember(e.name))
                return fail(e.span, codes::kUnknownName, "enum " + decl->name + " has no member " + e.name);
            return TypedExpr{Expr::literal(Value::sym(decl->name, e.name), e.span),
                             TypeExpr::enumeration(decl->name)};
        }
    }
    auto b = check(base, nullptr);
    if (!b) return std::nullopt;
    if (b->type.kind() != TypeExpr::Kind::Record)
        return fail(e.span, codes::kTypeMismatch, "field access ." + e.name + " on non-record " + b->type.str());
    const RecordDecl* decl = types().findRecord(b->type.name());
    const FieldDecl* field = decl ? decl->field(e.name) : nullptr;
    if (!field) return fail(e.span, codes::kUnknownName, "record " + b->type.name() + " has no field " + e.name);
    auto out = cloneNode(e);
    out->operands = {b->expr};
    return TypedExpr{out, field->type};
}

std::optional<TypedExpr> Checker::checkCompare(const Expr& e) {
    const Expr& lhsExpr = *e.operands[0];
    const Expr& rhsExpr = *e.operands[1];
    std::optional<TypedExpr> lhs, rhs;
    if (needsHint(lhsExpr) && !needsHint(rhsExpr)) {
        rhs = check(rhsExpr, nullptr);
        if (!rhs) return std::nullopt;
        lhs = check(lhsExpr, &rhs->type);
    } else {
        lhs = check(lhsExpr, nullptr);
        if (!lhs) return std::nullopt;
        rhs = check(rhsExpr, &lhs->type);
    }
    if (!lhs || !rhs) return std::nullopt;
    if (!(lhs->type == rhs->type))
        return fail(e.span, codes::kTypeMismatch,
                    "cannot compare " + lhs->type.str() + " with " + rhs->type.str());
    if (e.cmp != CompareOp::Eq && e.cmp != CompareOp::Ne && lhs->type.kind() != TypeExpr::Kind::Int)
        return fail(e.span, codes::kTypeMismatch,
                    std::string("operator ") + compareText(e.cmp) + " requires Int, found " + lhs->type.str());
    auto out = cloneNode(e);
    out->operands = {lhs->expr, rhs->expr};
    return TypedExpr{out, TypeExpr::boolean()};
}

std::optional<TypedExpr> Checker::checkInSet(const Expr& e) {
    auto subject = check(*e.operands[0], nullptr);
    if (!subject) return std::nullopt;
    if (!subject->type.isScalar())
        return fail(e.operands[0]->span, codes::kTypeMismatch, "set membership requires a scalar, found " +
                                                                   subject->type.str());
    auto out = cloneNode(e);
    out->operands = {subject->expr};
    bool ok = true;
    for (std::size_t i = 1; i < e.operands.size(); ++i) {
        auto member = check(*e.operands[i], &subject->type);
        if (!member) {
            ok = false;
            continue;
        }
        if (member->expr->kind != Expr::Kind::Literal) {
            fail(e.operands[i]->span, codes::kBadLiteral, "set members must be literals");
            ok = false;
        } else if (!(member->type == subject->type)) {
            fail(e.operands[i]->span, codes::kTypeMismatch,
                 "set member of type " + member->type.str() + " does not match " + subject->type.str());
            ok = false;
        }
        out->operands.push_back(member ? member->expr : nullptr);
    }
    if (!ok) return std::nullopt;
    return TypedExpr{out, TypeExpr::boolean()};
}

std::optional<TypedExpr> Checker::checkCall(const Expr& e, const TypeExpr* expected) {
    (void)expected;
    const std::string& fn = e.name;
    if (!isBuiltin(fn)) return fail(e.span, codes::kUnknownName, "unknown function " + fn);
    const bool wantsWhere = isListBuiltin(fn);
    if (e.where && !wantsWhere)
        return fail(e.where->span, codes::kSyntax, "where clause is not allowed on " + fn);
    if (!e.where && wantsWhere) return fail(e.span, codes::kSyntax, fn + " requires a where clause");
    if (!e.setField.empty() && fn != "update")
        return fail(e.span, codes::kSyntax, "set clause is only allowed on update");
    if (fn == "update" && e.setField.empty())
        return fail(e.span, codes::kSyntax, "update requires a set clause");

    const std::size_t arity = (fn == "contains" || fn == "add" || fn == "status") ? 2 : 1;
    if (e.operands.size() != arity)
        return fail(e.span, codes::kSyntax,
                    fn + " takes " + std::to_string(arity) + " argument" + (arity == 1 ? "" : "s"));

    auto list = check(*e.operands[0], nullptr);
    if (!list) return std::nullopt;
    if (list->type.kind() != TypeExpr::Kind::List)
        return fail(e.operands[0]->span, codes::kTypeMismatch, fn + " requires a list, found " + list->type.str());
    const TypeExpr& elem = list->type.element();
    const RecordDecl* elemRecord =
        elem.kind() == TypeExpr::Kind::Record ? types().findRecord(elem.name()) : nullptr;

    auto out = cloneNode(e);
    out->operands = {list->expr};

    if (e.where) {
        itTypes_.push_back(elem);
        auto pred = checkBool(*e.where, "where clause");
        std::optional<TypedExpr> setValue;
        if (pred && fn == "update") {
            const FieldDecl* field = elemRecord ? elemRecord->field(e.setField) : nullptr;
            if (!field) {
                itTypes_.pop_back();
                return fail(e.span, codes::kUnknownName, "update target has no field " + e.setField);
            }
            setValue = check(*e.setValue, &field->type);
            if (setValue && !(setValue->type == field->type)) {
                itTypes_.pop_back();
                return fail(e.setValue->span, codes::kTypeMismatch,
                            "cannot set " + e.setField + " of type " + field->type.str() + " to " +
                                setValue->type.str());
            }
            if (!setValue) pred.reset();
        }
        itTypes_.pop_back();
        if (!pred) return std::nullopt;
        out->where = pred->expr;
        if (setValue) out->setValue = setValue->expr;
    }

    if (fn == "len" || fn == "count") return TypedExpr{out, TypeExpr::integer()};
    if (fn == "exists") return TypedExpr{out, TypeExpr::boolean()};
    if (fn == "find") return TypedExpr{out, elem};
    if (fn == "remove" || fn == "update") return TypedExpr{out, list->type};
    if (fn == "add") {
        auto item = check(*e.operands[1], &elem);
        if (!item) return std::nullopt;
        if (!(item->type == elem))
            return fail(e.operands[1]->span, codes::kTypeMismatch,
                        "cannot add " + item->type.str() + " to " + list->type.str());
        out->operands.push_back(item->expr);
        return TypedExpr{out, list->type};
    }
    // contains / status match on the `id` field of record elements.
    TypeExpr key = elem;
    if (elemRecord) {
        const FieldDecl* idField = elemRecord->field("id");
        if (!idField) {
            if (fn == "status")
                return fail(e.span, codes::kTypeMismatch, "status requires records with an id field");
        } else {
            key = idField->type;
        }
    }
    auto needle = check(*e.operands[1], &key);
    if (!needle) return std::nullopt;
    if (!(needle->type == key))
        return fail(e.operands[1]->span, codes::kTypeMismatch,
                    fn + " expects " + key.str() + ", found " + needle->type.str());
    out->operands.push_back(needle->expr);
    if (fn == "contains") return TypedExpr{out, TypeExpr::boolean()};
    const FieldDecl* statusField = elemRecord ? elemRecord->field("status") : nullptr;
    if (!statusField) return fail(e.span, codes::kTypeMismatch, "status requires records with a status field");
    return TypedExpr{out, statusField->type};
}

std::optional<TypedExpr> Checker::checkRecord(const Expr& e, const TypeExpr* expected) {
    const RecordDecl* decl = nullptr;
    if (expected && expected->kind() == TypeExpr::Kind::Record) {
        decl = types().findRecord(expected->name());
    } else {
        // Infer from the field-name set when unambiguous.
        std::vector<std::string> names = e.fieldNames;
        std::sort(names.begin(), names.end());
        int matches = 0;
        for (const auto& r : types().records) {
            std::vector<std::string> declared;
            for (const auto& f : r.fields) declared.push_back(f.name);
            std::sort(declared.begin(), declared.end());
            if (declared == names) {
                decl = &r;
                ++matches;
            }
        }
        if (matches != 1) decl = nullptr;
    }
    if (!decl) return fail(e.span, codes::kTypeMismatch, "cannot infer the record type of this literal");

    auto out = cloneNode(e);
    out->fieldNames.clear();
    out->operands.clear();
    out->type = TypeExpr::record(decl->name);
    bool ok = true;
    for (std::size_t i = 0; i < e.fieldNames.size(); ++i) {
        if (!decl->field(e.fieldNames[i])) {
            fail(e.operands[i]->span, codes::kUnknownName, "record " + decl->name + " has no field " + e.fieldNames[i]);
            ok = false;
        }
        for (std::size_t j = 0; j < i; ++j)
            if (e.fieldNames[j] == e.fieldNames[i]) {
                fail(e.operands[i]->span, codes::kDuplicate, "duplicate field " + e.fieldNames[i]);
                ok = false;
            }
    }
    for (const auto& f : decl->fields) {
        auto pos = std::find(e.fieldNames.begin(), e.fieldNames.end(), f.name);
        if (pos == e.fieldNames.end()) {
            fail(e.span, codes::kTypeMismatch, "record literal is missing field " + f.name);
            ok = false;
            continue;
        }
        const Expr& fe = *e.operands[static_cast<std::size_t>(pos - e.fieldNames.begin())];
        auto v = check(fe, &f.type);
        if (!v) {
            ok = false;
            continue;
        }
        if (!(v->type == f.type)) {
            fail(fe.span, codes::kTypeMismatch, "field " + f.name + " expects " + f.type.str() + ", found " +
                                                    v->type.str());
            ok = false;
            continue;
        }
        out->fieldNames.push_back(f.name);
        out->operands.push_back(v->expr);
    }
    if (!ok) return std::nullopt;
    return TypedExpr{out, out->type};
}

std::optional<TypedExpr> Checker::checkList(const Expr& e, const TypeExpr* expected) {
    std::optional<TypeExpr> elem;
    if (expected && expected->kind() == TypeExpr::Kind::List) elem = expected->element();
    auto out = cloneNode(e);
    out->operands.clear();
    for (const auto& item : e.operands) {
        auto v = check(*item, elem ? &*elem : nullptr);
        if (!v) return std::nullopt;
        if (!elem) elem = v->type;
        if (!(v->type == *elem))
            return fail(item->span, codes::kTypeMismatch,
                        "list element of type " + v->type.str() + " in list<" + elem->str() + ">");
        out->operands.push_back(v->expr);
    }
    if (!elem) return fail(e.span, codes::kTypeMismatch, "cannot infer the element type of []");
    if (elem->kind() == TypeExpr::Kind::List) return fail(e.span, codes::kBadType, "lists of lists are not supported");
    out->type = *elem;
    return TypedExpr{out, TypeExpr::list(*elem)};
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

class Evaluator {
public:
    explicit Evaluator(const Bindings& env) : env_(env) {}

    Value eval(const Expr& e, const Value* it) const;

private:
    [[noreturn]] static void raise(EvalError::Kind kind, const Expr& e, const std::string& detail) {
        throw EvalError(kind, e.span, detail);
    }

    bool predicate(const Expr& where, const Value& item) const {
        Value v = eval(where, &item);
        if (!v.isBool()) raise(EvalError::Kind::TypeMismatchAtRuntime, where, "where clause is not boolean");
        return v.asBool();
    }
    static const Value& key(const Value& item) {
        if (item.isRecord())
            if (const Value* id = item.asRecord().field("id")) return *id;
        return item;
    }
    Value call(const Expr& e, const Value* it) const;

    const Bindings& env_;
};

Value Evaluator::eval(const Expr& e, const Value* it) const {
    switch (e.kind) {
        case Expr::Kind::Literal: return e.value;
        case Expr::Kind::VarRef: {
            const Value* v = env_.find(e.name);
            if (!v) raise(EvalError::Kind::UnboundName, e, "unbound variable " + e.name);
            return *v;
        }
        case Expr::Kind::It:
            if (!it) raise(EvalError::Kind::UnboundName, e, "element reference outside a where clause");
            return *it;
        case Expr::Kind::FieldAccess: {
            Value base = eval(*e.operands[0], it);
            if (!base.isRecord()) raise(EvalError::Kind::TypeMismatchAtRuntime, e, "field access on non-record");
            const Value* f = base.asRecord().field(e.name);
            if (!f) raise(EvalError::Kind::NoSuchField, e, "no field " + e.name);
            return *f;
        }
        case Expr::Kind::Compare: {
            Value lhs = eval(*e.operands[0], it);
            Value rhs = eval(*e.operands[1], it);
            if (e.cmp == CompareOp::Eq) return lhs == rhs;
            if (e.cmp == CompareOp::Ne) return !(lhs == rhs);
            if (!lhs.isInt() || !rhs.isInt())
                raise(EvalError::Kind::TypeMismatchAtRuntime, e, "ordering comparison on non-integers");
            const std::int64_t a = lhs.asInt();
            const std::int64_t b = rhs.asInt();
            switch (e.cmp) {
                case CompareOp::Lt: return a < b;
                case CompareOp::Le: return a <= b;
                case CompareOp::Gt: return a > b;
                default: return a >= b;
            }
        }
        case Expr::Kind::And:
        case Expr::Kind::Or: {
            const bool isAnd = e.kind == Expr::Kind::And;
            for (const auto& operand : e.operands) {
                Value v = eval(*operand, it);
                if (!v.isBool()) raise(EvalError::Kind::TypeMismatchAtRuntime, *operand, "boolean operand expected");
                if (v.asBool() != isAnd) return !isAnd;
            }
            return isAnd;
        }
        case Expr::Kind::Not: {
            Value v = eval(*e.operands[0], it);
            if (!v.isBool()) raise(EvalError::Kind::TypeMismatchAtRuntime, e, "boolean operand expected");
            return !v.asBool();
        }
        case Expr::Kind::InSet: {
            Value subject = eval(*e.operands[0], it);
            bool found = false;
            for (std::size_t i = 1; i < e.operands.size() && !found; ++i) found = subject == eval(*e.operands[i], it);
            return found != e.negated;
        }
        case Expr::Kind::Arith: {
            Value lhs = eval(*e.operands[0], it);
            Value rhs = eval(*e.operands[1], it);
            if (!lhs.isInt() || !rhs.isInt()) raise(EvalError::Kind::TypeMismatchAtRuntime, e, "arith on non-integers");
            std::int64_t result = 0;
            const bool overflow = e.arith == ArithOp::Add
                                      ? __builtin_add_overflow(lhs.asInt(), rhs.asInt(), &result)
                                      : __builtin_sub_overflow(lhs.asInt(), rhs.asInt(), &result);
            if (overflow) raise(EvalError::Kind::Overflow, e, "integer overflow");
            return result;
        }
        case Expr::Kind::Call: return call(e, it);
        case Expr::Kind::RecordLit: {
            RecordVal rec{e.type.name(), e.fieldNames, {}};
            rec.values.reserve(e.operands.size());
            for (const auto& operand : e.operands) rec.values.push_back(eval(*operand, it));
            return rec;
        }
        case Expr::Kind::ListLit: {
            ListVal list{e.type, {}};
            list.items.reserve(e.operands.size());
            for (const auto& operand : e.operands) list.items.push_back(eval(*operand, it));
            return list;
        }
    }
    raise(EvalError::Kind::TypeMismatchAtRuntime, e, "malformed expression");
}

Value Evaluator::call(const Expr& e, const Value* it) const {
    const std::string& fn = e.name;
    Value listValue = eval(*e.operands[0], it);
    if (!listValue.isList()) raise(EvalError::Kind::TypeMismatchAtRuntime, e, fn + " on non-list");
    const ListVal& list = listValue.asList();

    if (fn == "len") return static_cast<std::int64_t>(list.items.size());
    if (fn == "count") {
        std::int64_t n = 0;
        for (const auto& item : list.items) n += predicate(*e.where, item) ? 1 : 0;
        return n;
    }
    if (fn == "exists") {
        for (const auto& item : list.items)
            if (predicate(*e.where, item)) return true;
        return false;
    }
    if (fn == "find") {
        const Value* hit = nullptr;
        for (const auto& item : list.items) {
            if (!predicate(*e.where, item)) continue;
            if (hit) raise(EvalError::Kind::FindAmbiguous, e, "find matched more than one element");
            hit = &item;
        }
        if (!hit) raise(EvalError::Kind::FindMiss, e, "find matched no element");
        return *hit;
    }
    if (fn == "add") {
        ListVal out = list;
        out.items.push_back(eval(*e.operands[1], it));
        return out;
    }
    if (fn == "remove") {
        ListVal out{list.elementType, {}};
        for (const auto& item : list.items)
            if (!predicate(*e.where, item)) out.items.push_back(item);
        return out;
    }
    if (fn == "update") {
        ListVal out{list.elementType, {}};
        out.items.reserve(list.items.size());
        for (const auto& item : list.items) {
            if (!predicate(*e.where, item)) {
                out.items.push_back(item);
                continue;
            }
            if (!item.isRecord()) raise(EvalError::Kind::TypeMismatchAtRuntime, e, "update on non-record element");
            RecordVal rec = item.asRecord();
            auto pos = std::find(rec.names.begin(), rec.names.end(), e.setField);
            if (pos == rec.names.end()) raise(EvalError::Kind::NoSuchField, e, "no field " + e.setField);
            rec.values[static_cast<std::size_t>(pos - rec.names.begin())] = eval(*e.setValue, &item);
            out.items.emplace_back(std::move(rec));
        }
        return out;
    }
    Value needle = eval(*e.operands[1], it);
    if (fn == "contains") {
        for (const auto& item : list.items)
            if (key(item) == needle) return true;
        return false;
    }
    // status(list, id)
    const Value* hit = nullptr;
    for (const auto& item : list.items) {
        if (!(key(item) == needle)) continue;
        if (hit) raise(EvalError::Kind::FindAmbiguous, e, "status: more than one element with id " + render(needle));
        hit = &item;
    }
    if (!hit) raise(EvalError::Kind::FindMiss, e, "status: no element with id " + render(needle));
    if (!hit->isRecord()) raise(EvalError::Kind::TypeMismatchAtRuntime, e, "status on non-record element");
    const Value* status = hit->asRecord().field("status");
    if (!status) raise(EvalError::Kind::NoSuchField, e, "no field status");
    return *status;
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Or: return 1;
        case Expr::Kind::And: return 2;
        case Expr::Kind::Not: return 3;
        case Expr::Kind::Compare:
        case Expr::Kind::InSet: return 4;
        case Expr::Kind::Arith: return 5;
        case Expr::Kind::Literal:
            // Negative literals print with a leading minus.
            return e.value.isInt() && e.value.asInt() < 0 ? 5 : 6;
        default: return 6;
    }
}

void format(const Expr& e, std::string& out);

void formatChild(const Expr& child, int minPrec, std::string& out) {
    if (precedence(child) < minPrec) {
        out += '(';
        format(child, out);
        out += ')';
    } else {
        format(child, out);
    }
}

void format(const Expr& e, std::string& out) {
    switch (e.kind) {
        case Expr::Kind::Literal: render(e.value, out); return;
        case Expr::Kind::VarRef: out += e.name; return;
        case Expr::Kind::It: out += "it"; return;
        case Expr::Kind::FieldAccess:
            if (e.operands[0]->kind != Expr::Kind::It) formatChild(*e.operands[0], 6, out);
            out += '.';
            out += e.name;
            return;
        case Expr::Kind::Compare:
            formatChild(*e.operands[0], 5, out);
            out += ' ';
            out += compareText(e.cmp);
            out += ' ';
            formatChild(*e.operands[1], 5, out);
            return;
        case Expr::Kind::And:
        case Expr::Kind::Or: {
            const int p = precedence(e);
            formatChild(*e.operands[0], p, out);
            out += e.kind == Expr::Kind::And ? " and " : " or ";
            formatChild(*e.operands[1], p + 1, out);
            return;
        }
        case Expr::Kind::Not:
            out += "not ";
            formatChild(*e.operands[0], 3, out);
            return;
        case Expr::Kind::InSet:
            formatChild(*e.operands[0], 5, out);
            out += e.negated ? " not in {" : " in {";
            for (std::size_t i = 1; i < e.operands.size(); ++i) {
                if (i > 1) out += ", ";
                format(*e.operands[i], out);
            }
            out += '}';
            return;
        case Expr::Kind::Arith:
            formatChild(*e.operands[0], 5, out);
            out += e.arith == ArithOp::Add ? " + " : " - ";
            formatChild(*e.operands[1], 6, out);
            return;
        case Expr::Kind::Call:
            out += e.name;
            out += '(';
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                if (i) out += ", ";
                format(*e.operands[i], out);
            }
            if (e.where) {
                out += " where ";
                format(*e.where, out);
            }
            if (e.setValue) {
                out += " set ";
                out += e.setField;
                out += " := ";
                format(*e.setValue, out);
            }
            out += ')';
            return;
        case Expr::Kind::RecordLit:
            out += '{';
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                if (i) out += ", ";
                out += e.fieldNames[i];
                out += ": ";
                format(*e.operands[i], out);
            }
            out += '}';
            return;
        case Expr::Kind::ListLit:
            out += '[';
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                if (i) out += ", ";
                format(*e.operands[i], out);
            }
            out += ']';
            return;
    }
}

bool samePtr(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return sameExpr(*a, *b);
}

} // namespace

ExprPtr Expr::literal(Value v, SourceSpan span) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Literal;
    e->value = std::move(v);
    e->span = std::move(span);
    return e;
}

ExprPtr Expr::var(std::string name, SourceSpan span) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::VarRef;
    e->name = std::move(name);
    e->span = std::move(span);
    return e;
}

bool isListBuiltin(std::string_view name) {
    return std::find(kWhereBuiltins.begin(), kWhereBuiltins.end(), name) != kWhereBuiltins.end();
}

bool isBuiltin(std::string_view name) {
    return std::find(kBuiltins.begin(), kBuiltins.end(), name) != kBuiltins.end();
}

TypeCheckResult typecheck(const Expr& expr, const TypeScope& scope, const TypeExpr* expected) {
    Checker checker(scope);
    TypeCheckResult result;
    result.typed = checker.check(expr, expected);
    result.diagnostics = checker.takeDiagnostics();
    if (!result.diagnostics.empty()) result.typed.reset();
    return result;
}

EvalError::EvalError(Kind kind, SourceSpan span, const std::string& detail)
    : std::runtime_error(std::string(toString(kind)) + ": " + detail), kind_(kind), span_(std::move(span)) {}

const char* toString(EvalError::Kind kind) {
    switch (kind) {
        case EvalError::Kind::FindMiss: return "findMiss";
        case EvalError::Kind::FindAmbiguous: return "findAmbiguous";
        case EvalError::Kind::NoSuchField: return "noSuchField";
        case EvalError::Kind::TypeMismatchAtRuntime: return "typeMismatchAtRuntime";
        case EvalError::Kind::Overflow: return "overflow";
        case EvalError::Kind::UnboundName: return "unboundName";
    }
    return "?";
}

Bindings::Bindings(const std::map<std::string, Value, std::less<>>& env) {
    slots_.reserve(env.size());
    for (const auto& [name, value] : env) slots_.emplace_back(name, &value);
}

const Value* Bindings::find(std::string_view name) const {
    for (auto it = slots_.rbegin(); it != slots_.rend(); ++it)
        if (it->first == name) return it->second;
    return nullptr;
}

Value eval(const Expr& expr, const Bindings& env) { return Evaluator(env).eval(expr, nullptr); }

Value eval(const Expr& expr, const std::map<std::string, Value, std::less<>>& env) {
    return eval(expr, Bindings(env));
}

std::string formatExpr(const Expr& expr) {
    std::string out;
    format(expr, out);
    return out;
}

bool sameExpr(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.name != b.name || a.fieldNames != b.fieldNames || a.setField != b.setField)
        return false;
    if (a.operands.size() != b.operands.size()) return false;
    switch (a.kind) {
        case Expr::Kind::Literal:
            if (!(a.value == b.value)) return false;
            break;
        case Expr::Kind::Compare:
            if (a.cmp != b.cmp) return false;
            break;
        case Expr::Kind::Arith:
            if (a.arith != b.arith) return false;
            break;
        case Expr::Kind::InSet:
            if (a.negated != b.negated) return false;
            break;
        case Expr::Kind::RecordLit:
        case Expr::Kind::ListLit:
            if (!(a.type == b.type)) return false;
            break;
        default: break;
    }
    for (std::size_t i = 0; i < a.operands.size(); ++i)
        if (!samePtr(a.operands[i], b.operands[i])) return false;
    return samePtr(a.where, b.where) && samePtr(a.setValue, b.setValue);
}

} // namespace tsm
