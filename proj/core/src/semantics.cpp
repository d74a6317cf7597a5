#include "tsm/semantics.hpp"

#include "tsm/frontend.hpp"

#include "check.hpp"

#include <algorithm>
#include <cctype>

namespace tsm {

namespace {

Bindings stateBindings(const StateEnv& state) {
    Bindings b;
    for (const auto& [name, value] : state.bindings()) b.bind(name, value);
    return b;
}

const ActionSig& signatureOf(const Model& model, const ActionInstance& action) {
    const ActionSig* sig = model.findAction(action.name);
    if (!sig) throw ModelError("unknown action " + action.name);
    if (sig->params.size() != action.args.size())
        throw ModelError("action " + action.name + " takes " + std::to_string(sig->params.size()) +
                         " argument(s), got " + std::to_string(action.args.size()));
    return *sig;
}

void candidates(const TypeExpr& type, const Model& model, const Universe& universe, std::vector<Value>& out) {
    switch (type.kind()) {
        case TypeExpr::Kind::Bool:
            out.emplace_back(false);
            out.emplace_back(true);
            break;
        case TypeExpr::Kind::Int:
            for (std::int64_t n = universe.intRange.first; n <= universe.intRange.second; ++n) out.emplace_back(n);
            break;
        case TypeExpr::Kind::Enum:
            if (const EnumDecl* decl = model.types.findEnum(type.name()))
                for (const auto& m : decl->members) out.push_back(Value::sym(decl->name, m));
            break;
        case TypeExpr::Kind::Id:
            for (const auto& id : universe.idPool) out.push_back(Value::ident(id));
            break;
        default: break;
    }
}

} // namespace

std::vector<Diagnostic> validateModel(const Model& model) { return detail::checkModel(model, nullptr); }

StateEnv initialState(const Model& model) {
    const Bindings empty;
    std::vector<Env::Binding> bindings;
    bindings.reserve(model.stateVars.size());
    for (const auto& var : model.stateVars) {
        const InitAssign* assign = nullptr;
        for (const auto& i : model.init)
            if (i.var == var.name) assign = &i;
        if (!assign || !assign->value) throw ModelError("init does not cover variable " + var.name);
        bindings.emplace_back(var.name, eval(*assign->value, empty));
    }
    return StateEnv(std::move(bindings));
}

StepOutcome step(const Model& model, const StateEnv& state, const ActionInstance& action) {
    const ActionSig& sig = signatureOf(model, action);
    Bindings env = stateBindings(state);
    for (std::size_t i = 0; i < sig.params.size(); ++i) env.bind(sig.params[i].name, action.args[i]);

    for (const auto& rule : model.rules) {
        if (rule.action != action.name) continue;
        if (rule.guard) {
            Value holds = eval(*rule.guard, env);
            if (!holds.isBool())
                throw EvalError(EvalError::Kind::TypeMismatchAtRuntime, rule.guard->span, "guard is not boolean");
            if (!holds.asBool()) continue;
        }
        // Every right-hand side reads the pre-state.
        std::vector<Value> values;
        values.reserve(rule.updates.size());
        for (const auto& u : rule.updates) values.push_back(eval(*u.value, env));
        StateEnv next = state;
        for (std::size_t i = 0; i < rule.updates.size(); ++i) next.set(rule.updates[i].var, std::move(values[i]));
        ObsEnv obs = observe(model, next);
        return Fired{rule.label, std::move(next), std::move(obs)};
    }
    return Undefined{};
}

ObsEnv observe(const Model& model, const StateEnv& state) {
    const Bindings env = stateBindings(state);
    std::vector<Env::Binding> out;
    out.reserve(model.observe.size());
    for (const auto& o : model.observe) out.emplace_back(o.name, eval(*o.value, env));
    return ObsEnv(std::move(out));
}

std::vector<std::pair<std::string, TypeExpr>> observeTypes(const Model& model) {
    TypeScope scope{&model.types, {}};
    for (const auto& v : model.stateVars) scope.vars.emplace(v.name, v.type);
    std::vector<std::pair<std::string, TypeExpr>> out;
    for (const auto& o : model.observe) {
        auto typed = typecheck(*o.value, scope);
        if (!typed.ok()) throw ModelError("observable " + o.name + " does not type-check");
        out.emplace_back(o.name, typed.typed->type);
    }
    return out;
}

std::vector<std::string> matchingRules(const Model& model, const StateEnv& state, const ActionInstance& action) {
    const ActionSig& sig = signatureOf(model, action);
    Bindings env = stateBindings(state);
    for (std::size_t i = 0; i < sig.params.size(); ++i) env.bind(sig.params[i].name, action.args[i]);
    std::vector<std::string> labels;
    for (const auto& rule : model.rules) {
        if (rule.action != action.name) continue;
        if (!rule.guard) {
            labels.push_back(rule.label);
            continue;
        }
        Value holds = eval(*rule.guard, env);
        if (holds.isBool() && holds.asBool()) labels.push_back(rule.label);
    }
    return labels;
}

void checkAction(const Model& model, const ActionInstance& action) {
    const ActionSig& sig = signatureOf(model, action);
    for (std::size_t i = 0; i < sig.params.size(); ++i)
        if (!model.types.conforms(action.args[i], sig.params[i].type))
            throw ModelError("argument " + sig.params[i].name + " of " + action.name + " must be " +
                             sig.params[i].type.str() + ", got " + render(action.args[i]));
}

void checkState(const Model& model, const StateEnv& state) {
    const auto& bindings = state.bindings();
    if (bindings.size() != model.stateVars.size())
        throw ModelError("state binds " + std::to_string(bindings.size()) + " variables, model declares " +
                         std::to_string(model.stateVars.size()));
    for (std::size_t i = 0; i < bindings.size(); ++i) {
        const VarDecl& var = model.stateVars[i];
        if (bindings[i].first != var.name) throw ModelError("state binding " + bindings[i].first + " out of place");
        if (!model.types.conforms(bindings[i].second, var.type))
            throw ModelError("variable " + var.name + " must be " + var.type.str() + ", got " +
                             render(bindings[i].second));
    }
}

std::vector<ActionInstance> actionInstances(const Model& model, const Universe& universe) {
    for (std::size_t i = 0; i < universe.idPool.size(); ++i) {
        const std::string& id = universe.idPool[i];
        const bool word = !id.empty() && !std::isdigit(static_cast<unsigned char>(id[0])) &&
                          std::all_of(id.begin(), id.end(),
                                      [](unsigned char c) { return std::isalnum(c) || c == '_'; });
        if (!word || isKeyword(id)) throw UniverseMismatch("id pool entry \"" + id + "\" is not an identifier");
        if (std::find(universe.idPool.begin(), universe.idPool.begin() + i, id) != universe.idPool.begin() + i)
            throw UniverseMismatch("id pool lists " + id + " twice");
    }
    std::vector<ActionInstance> out;
    for (const auto& sig : model.actions) {
        std::vector<std::vector<Value>> pools;
        for (const auto& p : sig.params) {
            pools.emplace_back();
            candidates(p.type, model, universe, pools.back());
            if (pools.back().empty()) {
                if (p.type.kind() == TypeExpr::Kind::Id)
                    throw UniverseMismatch("parameter " + p.name + " of " + sig.name + " is id-typed but the id pool is empty");
                throw UniverseMismatch("no candidate values for parameter " + p.name + " of " + sig.name);
            }
        }
        // Odometer over the parameter pools; the last parameter varies fastest.
        std::vector<std::size_t> index(pools.size(), 0);
        for (;;) {
            ActionInstance inst{sig.name, {}};
            for (std::size_t i = 0; i < pools.size(); ++i) inst.args.push_back(pools[i][index[i]]);
            out.push_back(std::move(inst));
            std::size_t k = pools.size();
            while (k > 0 && ++index[k - 1] == pools[k - 1].size()) index[--k] = 0;
            if (k == 0) break;
        }
    }
    return out;
}

std::vector<ActionInstance> enabledActions(const Model& model, const StateEnv& state, const Universe& universe) {
    std::vector<ActionInstance> out;
    for (auto& inst : actionInstances(model, universe))
        if (step(model, state, inst).fired()) out.push_back(std::move(inst));
    return out;
}

} // namespace tsm
