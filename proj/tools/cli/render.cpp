#include "render.hpp"

namespace tsm::cli {

json valueJson(const Value& value) {
    if (value.isBool()) return value.asBool();
    if (value.isInt()) return value.asInt();
    return render(value);
}

json envJson(const Env& env) {
    json out = json::object();
    for (const auto& [name, value] : env.bindings()) out[name] = valueJson(value);
    return out;
}

json actionJson(const Model& model, const ActionInstance& action) {
    json args = json::object();
    if (const ActionSig* sig = model.findAction(action.name))
        for (std::size_t i = 0; i < sig->params.size() && i < action.args.size(); ++i)
            args[sig->params[i].name] = valueJson(action.args[i]);
    return {{"action", action.name}, {"args", args}, {"canonical", action.canonical()}};
}

json spanJson(const SourceSpan& span) {
    return {{"file", span.file},
            {"line", span.startLine},
            {"column", span.startCol},
            {"endLine", span.endLine},
            {"endColumn", span.endCol}};
}

json diagnosticJson(const Diagnostic& d) {
    json out = {{"severity", d.isError() ? "error" : "warning"},
                {"code", d.code},
                {"span", spanJson(d.span)},
                {"message", d.message}};
    out["hint"] = d.hint ? json(*d.hint) : json(nullptr);
    return out;
}

json questionJson(const QuestionItem& q) {
    json out = {{"kind", toString(q.kind)}, {"subject", q.subject}};
    out["witnessState"] = q.witnessState ? json(*q.witnessState) : json(nullptr);
    out["witnessAction"] = q.witnessAction ? json(*q.witnessAction) : json(nullptr);
    out["span"] = q.span && q.span->valid() ? spanJson(*q.span) : json(nullptr);
    out["prompt"] = q.prompt;
    return out;
}

json modelSummaryJson(const Model& model) {
    json vars = json::array();
    for (const auto& v : model.stateVars) vars.push_back({{"name", v.name}, {"type", v.type.str()}});
    json actions = json::array();
    for (const auto& a : model.actions) {
        json params = json::array();
        for (const auto& p : a.params) params.push_back({{"name", p.name}, {"type", p.type.str()}});
        actions.push_back({{"name", a.name}, {"params", params}});
    }
    json rules = json::array();
    for (const auto& r : model.rules) {
        json rule = {{"label", r.label}, {"action", r.action}, {"guard", r.guard ? formatExpr(*r.guard) : "true"}};
        rule["implLink"] = r.implLink ? json(*r.implLink) : json(nullptr);
        rules.push_back(std::move(rule));
    }
    json observe = json::array();
    for (const auto& o : model.observe) observe.push_back({{"name", o.name}, {"expr", formatExpr(*o.value)}});
    return {{"name", model.name},
            {"stateVars", vars},
            {"actions", actions},
            {"rules", rules},
            {"observeOutputs", observe}};
}

namespace {

json categoryJson(const CategoryDiff& c) {
    json changed = json::array();
    for (const auto& ch : c.changed) changed.push_back({{"name", ch.name}, {"detail", ch.detail}});
    return {{"added", c.added}, {"removed", c.removed}, {"changed", changed}};
}

} // namespace

json diffJson(const ModelDiff& d) {
    json rulesChanged = json::array();
    for (const auto& r : d.rulesChanged)
        rulesChanged.push_back({{"label", r.label},
                                {"actionChanged", r.actionChanged},
                                {"guardChanged", r.guardChanged},
                                {"updatesChanged", r.updatesChanged},
                                {"implChanged", r.implChanged},
                                {"moved", r.moved}});
    return {{"empty", d.empty()},
            {"enums", categoryJson(d.enums)},
            {"enumMembers", categoryJson(d.enumMembers)},
            {"records", categoryJson(d.records)},
            {"recordFields", categoryJson(d.recordFields)},
            {"stateVars", categoryJson(d.stateVars)},
            {"init", categoryJson(d.init)},
            {"actions", categoryJson(d.actions)},
            {"rules", {{"added", d.rulesAdded}, {"removed", d.rulesRemoved}, {"changed", rulesChanged}}},
            {"observe", categoryJson(d.observe)},
            {"invariants", categoryJson(d.invariants)}};
}

std::string undefinedPrompt(const ActionInstance& action, const StateEnv& state) {
    return "What does the system do when " + action.canonical() + " occurs in state " + state.canonical() + "?";
}

} // namespace tsm::cli
