#include "tsm/session.hpp"

#include "tsm/frontend.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tsm {

namespace {

using json = nlohmann::ordered_json;

Value decodeValue(const json& j, const TypeExpr& type, const Model& model, const std::string& where) {
    if (j.is_boolean() && type.kind() == TypeExpr::Kind::Bool) return Value(j.get<bool>());
    if (j.is_number_integer() && type.kind() == TypeExpr::Kind::Int) return Value(j.get<std::int64_t>());
    if (j.is_null() && type.kind() == TypeExpr::Kind::Id) return Value::none();
    if (!j.is_string()) throw TraceError(where + ": expected a canonical " + type.str() + " value");
    std::string error;
    auto v = parseValue(j.get<std::string>(), type, model.types, &error);
    if (!v) throw TraceError(where + ": " + error);
    return *v;
}

ActionInstance decodeAction(const json& s, const Model& model, const std::string& where) {
    if (!s.is_object() || !s.contains("action") || !s["action"].is_string())
        throw TraceError(where + ": needs an \"action\" name");
    ActionInstance action;
    action.name = s["action"].get<std::string>();
    const ActionSig* sig = model.findAction(action.name);
    if (!sig) throw TraceError(where + ": unknown action " + action.name);

    const json args = s.contains("args") && !s["args"].is_null() ? s["args"] : json::object();
    if (!args.is_object()) throw TraceError(where + ": \"args\" must be an object");
    for (const auto& [key, _] : args.items())
        if (std::none_of(sig->params.begin(), sig->params.end(), [&](const FieldDecl& p) { return p.name == key; }))
            throw TraceError(where + ": " + action.name + " has no parameter " + key);
    for (const auto& p : sig->params) {
        if (!args.contains(p.name)) throw TraceError(where + ": missing argument " + p.name);
        action.args.push_back(decodeValue(args[p.name], p.type, model, where + " argument " + p.name));
    }
    return action;
}

json encodeValue(const Value& v) {
    if (v.isBool()) return v.asBool();
    if (v.isInt()) return v.asInt();
    return render(v);
}

} // namespace

Trace readTrace(const Model& model, const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw TraceError(std::string("malformed trace JSON: ") + e.what());
    }
    if (!doc.is_object()) throw TraceError("trace must be a JSON object");
    Trace trace;
    if (doc.contains("model")) {
        if (!doc["model"].is_string()) throw TraceError("\"model\" must be a string");
        trace.model = doc["model"].get<std::string>();
        if (trace.model != model.name)
            throw TraceError("trace is for model " + trace.model + ", not " + model.name);
    } else {
        trace.model = model.name;
    }
    if (!doc.contains("steps") || !doc["steps"].is_array()) throw TraceError("trace needs a \"steps\" array");
    const json& steps = doc["steps"];
    if (steps.size() > kMaxTraceSteps)
        throw TraceError("trace has " + std::to_string(steps.size()) + " steps; the limit is " +
                         std::to_string(kMaxTraceSteps));

    for (std::size_t i = 0; i < steps.size(); ++i) {
        const json& s = steps[i];
        const std::string where = "step " + std::to_string(i);
        TraceStep step;
        step.action = decodeAction(s, model, where);

        if (s.contains("expected") && !s["expected"].is_null()) {
            const json& exp = s["expected"];
            if (!exp.is_object()) throw TraceError(where + ": \"expected\" must be an object or null");
            for (const auto& [key, _] : exp.items())
                if (std::none_of(model.observe.begin(), model.observe.end(),
                                 [&](const ObserveOutput& o) { return o.name == key; }))
                    throw TraceError(where + ": model has no observable " + key);
            ObsEnv obs;
            for (const auto& [name, type] : observeTypes(model)) {
                if (!exp.contains(name)) throw TraceError(where + ": expected value for " + name + " is missing");
                obs.set(name, decodeValue(exp[name], type, model, where + " expected " + name));
            }
            step.expectedObs = std::move(obs);
        }
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

ActionInstance readAction(const Model& model, const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw TraceError(std::string("malformed JSON: ") + e.what());
    }
    return decodeAction(doc, model, "request");
}

Trace readTraceFile(const Model& model, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return readTrace(model, buf.str());
}

std::string writeTrace(const Model& model, const Trace& trace) {
    json doc;
    doc["model"] = trace.model.empty() ? model.name : trace.model;
    doc["steps"] = json::array();
    for (const auto& step : trace.steps) {
        json s;
        s["action"] = step.action.name;
        json args = json::object();
        if (const ActionSig* sig = model.findAction(step.action.name))
            for (std::size_t i = 0; i < sig->params.size() && i < step.action.args.size(); ++i)
                args[sig->params[i].name] = encodeValue(step.action.args[i]);
        s["args"] = std::move(args);
        if (step.expectedObs) {
            json exp = json::object();
            for (const auto& [name, value] : step.expectedObs->bindings()) exp[name] = encodeValue(value);
            s["expected"] = std::move(exp);
        } else {
            s["expected"] = nullptr;
        }
        doc["steps"].push_back(std::move(s));
    }
    return doc.dump(2) + "\n";
}

Session::Session(std::shared_ptr<const Model> model)
    : model_(std::move(model)), current_(initialState(*model_)), recorded_{model_->name, {}} {}

StepOutcome Session::fire(const ActionInstance& action) {
    checkAction(*model_, action);
    StepOutcome outcome = step(*model_, current_, action);
    if (outcome.fired()) {
        history_.push_back({action, current_});
        recorded_.steps.push_back({action, std::nullopt});
        current_ = outcome.get().nextState;
    }
    return outcome;
}

void Session::undo() {
    if (history_.empty()) throw EmptyHistory();
    current_ = std::move(history_.back().prior);
    history_.pop_back();
    recorded_.steps.pop_back();
}

void Session::reset() {
    current_ = initialState(*model_);
    history_.clear();
    recorded_.steps.clear();
}

ReplayResult replay(const Model& model, const Trace& trace) {
    if (trace.steps.size() > kMaxTraceSteps)
        throw TraceError("trace has " + std::to_string(trace.steps.size()) + " steps; the limit is " +
                         std::to_string(kMaxTraceSteps));
    ReplayResult result;
    StateEnv state = initialState(model);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const ActionInstance& action = trace.steps[i].action;
        checkAction(model, action);
        try {
            StepOutcome outcome = step(model, state, action);
            if (outcome.undefined()) {
                result.halt = ReplayHalt{i, ReplayHalt::Reason::Undefined,
                                         "no rule for " + action.canonical() + " in state " + state.canonical()};
                break;
            }
            const Fired& fired = outcome.get();
            state = fired.nextState;
            result.steps.push_back({fired.ruleLabel, fired.nextState, fired.observable});
        } catch (const EvalError& e) {
            result.halt = ReplayHalt{i, ReplayHalt::Reason::EvalError, e.what()};
            break;
        }
    }
    result.finalState = std::move(state);
    return result;
}

} // namespace tsm
