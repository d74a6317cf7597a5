#include "tsm/analysis.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace tsm {

namespace {

bool exceedsListBound(const StateEnv& state, std::size_t maxLen) {
    for (const auto& [_, value] : state.bindings())
        if (value.isList() && value.asList().items.size() > maxLen) return true;
    return false;
}

std::vector<ActionInstance> pathTo(const std::vector<std::pair<std::size_t, ActionInstance>>& parents,
                                   std::size_t state) {
    std::vector<ActionInstance> path;
    while (state != 0) {
        path.push_back(parents[state].second);
        state = parents[state].first;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace

std::optional<std::size_t> ExplorationResult::indexOf(const std::string& canonicalState) const {
    auto it = std::find(canonical.begin(), canonical.end(), canonicalState);
    if (it == canonical.end()) return std::nullopt;
    return static_cast<std::size_t>(it - canonical.begin());
}

ExplorationResult explore(const Model& model, const Universe& universe, std::size_t maxStates) {
    if (maxStates == 0) throw std::invalid_argument("maxStates must be positive");
    ExplorationResult result;
    result.modelFingerprint = model.fingerprint();
    result.universe = universe;
    for (const auto& a : model.actions) {
        auto& names = result.actionParams[a.name];
        for (const auto& p : a.params) names.push_back(p.name);
    }
    const std::vector<ActionInstance> instances = actionInstances(model, universe);

    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::pair<std::size_t, ActionInstance>> parents;

    auto checkInvariants = [&](std::size_t id) {
        Bindings env;
        for (const auto& [name, value] : result.states[id].bindings()) env.bind(name, value);
        for (const auto& inv : model.invariants) {
            bool holds = false;
            try {
                Value v = eval(*inv.condition, env);
                holds = v.isBool() && v.asBool();
            } catch (const EvalError&) {
                holds = false;
            }
            if (!holds) result.invariantViolations.push_back({inv.name, id, pathTo(parents, id)});
        }
    };
    auto addState = [&](StateEnv state, std::string key, std::size_t parent, const ActionInstance* via) {
        const std::size_t id = result.states.size();
        index.emplace(key, id);
        result.states.push_back(std::move(state));
        result.canonical.push_back(std::move(key));
        parents.emplace_back(parent, via ? *via : ActionInstance{});
        checkInvariants(id);
        return id;
    };

    StateEnv init = initialState(model);
    std::string initKey = init.canonical();
    addState(std::move(init), std::move(initKey), 0, nullptr);

    for (std::size_t current = 0; current < result.states.size(); ++current) {
        bool anyEnabled = false;
        std::set<std::string> undefinedHere;
        for (const auto& inst : instances) {
            std::optional<StepOutcome> outcome;
            try {
                outcome = step(model, result.states[current], inst);
            } catch (const EvalError& e) {
                result.evalFailures.push_back({current, inst, e.what()});
                continue;
            }
            if (outcome->undefined()) {
                if (undefinedHere.insert(inst.name).second) result.undefinedPairs.push_back({current, inst.name, inst});
                continue;
            }
            anyEnabled = true;
            const Fired& fired = outcome->get();
            if (exceedsListBound(fired.nextState, universe.maxListLen)) {
                ++result.listBoundPruned;
                continue;
            }
            std::string key = fired.nextState.canonical();
            std::size_t target;
            if (auto it = index.find(key); it != index.end()) {
                target = it->second;
            } else if (result.states.size() >= maxStates) {
                result.frontierTruncated = true;
                continue;
            } else {
                target = addState(fired.nextState, std::move(key), current, &inst);
            }
            result.transitions.push_back({current, inst, fired.ruleLabel, target});
        }
        if (!anyEnabled) result.deadlocks.push_back(current);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Conformance
// ---------------------------------------------------------------------------

const char* toString(DivergenceReport::Status status) {
    switch (status) {
        case DivergenceReport::Status::Conformant: return "conformant";
        case DivergenceReport::Status::Diverged: return "diverged";
        case DivergenceReport::Status::ModelUndefined: return "modelUndefined";
    }
    return "?";
}

namespace {

bool idKeyedList(const Value& v) {
    if (!v.isList()) return false;
    const ListVal& list = v.asList();
    if (list.elementType.kind() != TypeExpr::Kind::Record) return false;
    return std::all_of(list.items.begin(), list.items.end(),
                       [](const Value& item) { return item.isRecord() && item.asRecord().field("id"); });
}

std::vector<std::string> sortedRenderings(const ListVal& list) {
    std::vector<std::string> out;
    out.reserve(list.items.size());
    for (const auto& item : list.items) out.push_back(render(item));
    std::sort(out.begin(), out.end());
    return out;
}

bool valuesMatch(const Value& expected, const Value& actual, bool strictOrder) {
    if (strictOrder || !idKeyedList(expected) || !idKeyedList(actual)) return expected == actual;
    const ListVal& e = expected.asList();
    const ListVal& a = actual.asList();
    return e.elementType == a.elementType && sortedRenderings(e) == sortedRenderings(a);
}

} // namespace

bool observablesMatch(const ObsEnv& expected, const ObsEnv& actual, bool strictOrder) {
    if (expected.size() != actual.size()) return false;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto& [name, value] = expected.bindings()[i];
        const Value* other = actual.find(name);
        if (!other || !valuesMatch(value, *other, strictOrder)) return false;
    }
    return true;
}

DivergenceReport checkConformance(const Model& model, const Trace& observed, const ConformanceOptions& options) {
    for (std::size_t i = 0; i < observed.steps.size(); ++i)
        if (!observed.steps[i].expectedObs)
            throw PreconditionError("step " + std::to_string(i) + " has no expected observable");

    DivergenceReport report;
    StateEnv state = initialState(model);
    for (std::size_t i = 0; i < observed.steps.size(); ++i) {
        const TraceStep& s = observed.steps[i];
        checkAction(model, s.action);
        std::optional<StepOutcome> outcome;
        try {
            outcome = step(model, state, s.action);
        } catch (const EvalError& e) {
            report.detail = e.what();
        }
        if (!outcome || outcome->undefined()) {
            report.status = DivergenceReport::Status::ModelUndefined;
            report.stepIndex = i;
            report.expected = s.expectedObs;
            report.stateAtDivergence = state;
            return report;
        }
        const Fired& fired = outcome->get();
        if (!observablesMatch(*s.expectedObs, fired.observable, options.strictOrder)) {
            report.status = DivergenceReport::Status::Diverged;
            report.stepIndex = i;
            report.expected = s.expectedObs;
            report.actual = fired.observable;
            report.stateAtDivergence = fired.nextState;
            report.firedRule = fired.ruleLabel;
            return report;
        }
        state = fired.nextState;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Diff
// ---------------------------------------------------------------------------

namespace {

template <typename T, typename KeyFn, typename DescribeFn>
void diffNamed(const std::vector<T>& before, const std::vector<T>& after, KeyFn key, DescribeFn describe,
               CategoryDiff& out) {
    auto find = [&](const std::vector<T>& items, const std::string& k) -> const T* {
        for (const auto& item : items)
            if (key(item) == k) return &item;
        return nullptr;
    };
    for (const auto& item : before)
        if (!find(after, key(item))) out.removed.push_back(key(item));
    for (const auto& item : after) {
        const T* old = find(before, key(item));
        if (!old) {
            out.added.push_back(key(item));
            continue;
        }
        const std::string was = describe(*old);
        const std::string now = describe(item);
        if (was != now) out.changed.push_back({key(item), was + " -> " + now});
    }
}

std::string joinWords(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) out += (i ? ", " : "") + words[i];
    return out;
}

std::string describeFields(const std::vector<FieldDecl>& fields) {
    std::vector<std::string> parts;
    for (const auto& f : fields) parts.push_back(f.name + ": " + f.type.str());
    return "(" + joinWords(parts) + ")";
}

std::string exprText(const ExprPtr& e) { return e ? formatExpr(*e) : "true"; }

std::string updatesText(const Rule& r) {
    std::vector<std::string> parts;
    for (const auto& u : r.updates) parts.push_back(u.var + " := " + exprText(u.value));
    return joinWords(parts);
}

} // namespace

bool ModelDiff::empty() const {
    return enums.empty() && enumMembers.empty() && records.empty() && recordFields.empty() && stateVars.empty() &&
           init.empty() && actions.empty() && rulesAdded.empty() && rulesRemoved.empty() && rulesChanged.empty() &&
           observe.empty() && invariants.empty();
}

ModelDiff diffModels(const Model& oldModel, const Model& newModel) {
    ModelDiff d;
    diffNamed(
        oldModel.types.enums, newModel.types.enums, [](const EnumDecl& e) { return e.name; },
        [](const EnumDecl& e) { return "{" + joinWords(e.members) + "}"; }, d.enums);
    {
        std::vector<std::pair<std::string, std::string>> before, after;
        for (const auto& e : oldModel.types.enums)
            for (const auto& m : e.members) before.emplace_back(e.name + "." + m, "");
        for (const auto& e : newModel.types.enums)
            for (const auto& m : e.members) after.emplace_back(e.name + "." + m, "");
        auto first = [](const std::pair<std::string, std::string>& p) { return p.first; };
        diffNamed(before, after, first, [](const auto&) { return std::string(); }, d.enumMembers);
    }
    diffNamed(
        oldModel.types.records, newModel.types.records, [](const RecordDecl& r) { return r.name; },
        [](const RecordDecl& r) { return describeFields(r.fields); }, d.records);
    {
        std::vector<std::pair<std::string, std::string>> before, after;
        for (const auto& r : oldModel.types.records)
            for (const auto& f : r.fields) before.emplace_back(r.name + "." + f.name, f.type.str());
        for (const auto& r : newModel.types.records)
            for (const auto& f : r.fields) after.emplace_back(r.name + "." + f.name, f.type.str());
        diffNamed(before, after, [](const auto& p) { return p.first; }, [](const auto& p) { return p.second; },
                  d.recordFields);
    }
    diffNamed(
        oldModel.stateVars, newModel.stateVars, [](const VarDecl& v) { return v.name; },
        [](const VarDecl& v) { return v.type.str(); }, d.stateVars);
    diffNamed(
        oldModel.init, newModel.init, [](const InitAssign& i) { return i.var; },
        [](const InitAssign& i) { return exprText(i.value); }, d.init);
    diffNamed(
        oldModel.actions, newModel.actions, [](const ActionSig& a) { return a.name; },
        [](const ActionSig& a) { return describeFields(a.params); }, d.actions);
    diffNamed(
        oldModel.observe, newModel.observe, [](const ObserveOutput& o) { return o.name; },
        [](const ObserveOutput& o) { return exprText(o.value); }, d.observe);
    diffNamed(
        oldModel.invariants, newModel.invariants, [](const Invariant& i) { return i.name; },
        [](const Invariant& i) { return exprText(i.condition); }, d.invariants);

    // Rules pair up by label; order among surviving labels is compared too.
    std::vector<std::string> oldCommon, newCommon;
    for (const auto& r : oldModel.rules) {
        if (newModel.findRule(r.label))
            oldCommon.push_back(r.label);
        else
            d.rulesRemoved.push_back(r.label);
    }
    for (const auto& r : newModel.rules) {
        if (oldModel.findRule(r.label))
            newCommon.push_back(r.label);
        else
            d.rulesAdded.push_back(r.label);
    }
    for (std::size_t i = 0; i < newCommon.size(); ++i) {
        const Rule& now = *newModel.findRule(newCommon[i]);
        const Rule& was = *oldModel.findRule(newCommon[i]);
        RuleChange c;
        c.label = now.label;
        c.actionChanged = was.action != now.action;
        c.guardChanged = exprText(was.guard) != exprText(now.guard);
        c.updatesChanged = updatesText(was) != updatesText(now);
        c.implChanged = was.implLink != now.implLink;
        c.moved = oldCommon[i] != newCommon[i];
        if (c.actionChanged || c.guardChanged || c.updatesChanged || c.implChanged || c.moved)
            d.rulesChanged.push_back(std::move(c));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Questions
// ---------------------------------------------------------------------------

const char* toString(QuestionItem::Kind kind) {
    switch (kind) {
        case QuestionItem::Kind::UndefinedTransition: return "undefinedTransition";
        case QuestionItem::Kind::OverlappingRules: return "overlappingRules";
        case QuestionItem::Kind::UnreachableEnumMember: return "unreachableEnumMember";
        case QuestionItem::Kind::UnusedAction: return "unusedAction";
        case QuestionItem::Kind::RuleWithoutImplLink: return "ruleWithoutImplLink";
    }
    return "?";
}

std::size_t UnderspecReport::count(QuestionItem::Kind kind) const {
    return static_cast<std::size_t>(
        std::count_if(questions.begin(), questions.end(), [&](const QuestionItem& q) { return q.kind == kind; }));
}

namespace {

void collectSymbols(const Value& v, std::set<std::string>& out) {
    if (v.isSym()) {
        out.insert(v.asSym().enumName + "." + v.asSym().member);
    } else if (v.isRecord()) {
        for (const auto& field : v.asRecord().values) collectSymbols(field, out);
    } else if (v.isList()) {
        for (const auto& item : v.asList().items) collectSymbols(item, out);
    }
}

void collectEnums(const TypeExpr& t, const TypeTable& types, std::set<std::string>& out) {
    switch (t.kind()) {
        case TypeExpr::Kind::Enum: out.insert(t.name()); break;
        case TypeExpr::Kind::List: collectEnums(t.element(), types, out); break;
        case TypeExpr::Kind::Record:
            if (const RecordDecl* r = types.findRecord(t.name()))
                for (const auto& f : r->fields) collectEnums(f.type, types, out);
            break;
        default: break;
    }
}

} // namespace

UnderspecReport questionsReport(const Model& model, const ExplorationResult& exploration) {
    if (exploration.modelFingerprint != model.fingerprint())
        throw StaleExploration("exploration was computed for a different version of model " + model.name);
    UnderspecReport report;

    for (const auto& pair : exploration.undefinedPairs) {
        QuestionItem q;
        q.kind = QuestionItem::Kind::UndefinedTransition;
        const std::string& state = exploration.canonical[pair.state];
        q.subject = {pair.action, state};
        q.witnessState = state;
        q.witnessAction = pair.witness.canonical();
        if (const ActionSig* sig = model.findAction(pair.action)) q.span = sig->span;
        q.prompt = "What does the system do when " + *q.witnessAction + " occurs in state " + state + "?";
        report.questions.push_back(std::move(q));
    }

    // Empirical overlap: both guards true for the same explored state and
    // action instance. The first witness in exploration order is reported.
    {
        const std::vector<ActionInstance> instances = actionInstances(model, exploration.universe);
        std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, const ActionInstance*>> witnesses;
        std::map<std::string, std::size_t> ruleIndex;
        for (std::size_t i = 0; i < model.rules.size(); ++i) ruleIndex[model.rules[i].label] = i;
        for (std::size_t s = 0; s < exploration.states.size(); ++s) {
            for (const auto& inst : instances) {
                std::vector<std::string> labels;
                try {
                    labels = matchingRules(model, exploration.states[s], inst);
                } catch (const EvalError&) {
                    continue;
                }
                for (std::size_t a = 0; a < labels.size(); ++a)
                    for (std::size_t b = a + 1; b < labels.size(); ++b)
                        witnesses.try_emplace({ruleIndex[labels[a]], ruleIndex[labels[b]]}, s, &inst);
            }
        }
        for (const auto& [rules, witness] : witnesses) {
            const Rule& first = model.rules[rules.first];
            const Rule& second = model.rules[rules.second];
            QuestionItem q;
            q.kind = QuestionItem::Kind::OverlappingRules;
            q.subject = {first.label, second.label};
            q.witnessState = exploration.canonical[witness.first];
            q.witnessAction = witness.second->canonical();
            q.span = second.span;
            q.prompt = "Rules " + first.label + " and " + second.label + " both apply when " + *q.witnessAction +
                       " occurs in state " + *q.witnessState + "; " + first.label +
                       " wins by order. Is that what the system does?";
            report.questions.push_back(std::move(q));
        }
    }

    if (!exploration.frontierTruncated) {
        std::set<std::string> seen;
        for (const auto& state : exploration.states)
            for (const auto& [_, value] : state.bindings()) collectSymbols(value, seen);
        std::set<std::string> stateEnums;
        for (const auto& v : model.stateVars) collectEnums(v.type, model.types, stateEnums);
        for (const auto& e : model.types.enums) {
            if (!stateEnums.count(e.name)) continue;
            for (const auto& m : e.members) {
                const std::string sym = e.name + "." + m;
                if (seen.count(sym)) continue;
                QuestionItem q;
                q.kind = QuestionItem::Kind::UnreachableEnumMember;
                q.subject = {sym};
                q.span = e.span;
                q.prompt = "No explored state contains " + sym + ". Which event makes it appear?";
                report.questions.push_back(std::move(q));
            }
        }
    }

    for (const auto& a : model.actions) {
        const bool used = std::any_of(model.rules.begin(), model.rules.end(),
                                      [&](const Rule& r) { return r.action == a.name; });
        if (used) continue;
        QuestionItem q;
        q.kind = QuestionItem::Kind::UnusedAction;
        q.subject = {a.name};
        q.span = a.span;
        q.prompt = "Action " + a.name + " has no rule. What does the system do when it occurs?";
        report.questions.push_back(std::move(q));
    }

    if (model.meta.count(kImplementationMeta)) {
        for (const auto& r : model.rules) {
            if (r.implLink) continue;
            QuestionItem q;
            q.kind = QuestionItem::Kind::RuleWithoutImplLink;
            q.subject = {r.label};
            q.span = r.span;
            q.prompt = "Where is rule " + r.label + " (on " + r.action + ") implemented?";
            report.questions.push_back(std::move(q));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Graph export
// ---------------------------------------------------------------------------

namespace {

std::string dotEscape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string exportGraph(const ExplorationResult& exploration, GraphFormat format) {
    // Node ids follow canonical order, not discovery order.
    std::vector<std::size_t> order(exploration.states.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return exploration.canonical[a] < exploration.canonical[b]; });
    std::vector<std::size_t> id(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) id[order[i]] = i;

    struct Edge {
        std::size_t from, to;
        std::string action;
        const Transition* t;
    };
    std::vector<Edge> edges;
    for (const auto& t : exploration.transitions) edges.push_back({id[t.from], id[t.to], t.action.canonical(), &t});
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.from, a.action, a.to) < std::tie(b.from, b.action, b.to);
    });
    std::vector<std::pair<std::size_t, std::string>> undefined;
    for (const auto& u : exploration.undefinedPairs) undefined.emplace_back(id[u.state], u.action);
    std::sort(undefined.begin(), undefined.end());

    if (format == GraphFormat::Dot) {
        std::ostringstream out;
        out << "digraph states {\n";
        out << "  node [shape=circle];\n";
        for (std::size_t i = 0; i < order.size(); ++i) {
            out << "  s" << i << " [label=\"" << dotEscape(exploration.canonical[order[i]]) << "\"";
            if (order[i] == 0) out << ", shape=doublecircle";
            out << "];\n";
        }
        for (const auto& e : edges)
            out << "  s" << e.from << " -> s" << e.to << " [label=\"" << dotEscape(e.action + " / " + e.t->rule)
                << "\"];\n";
        out << "}\n";
        return out.str();
    }

    using json = nlohmann::ordered_json;
    json doc;
    doc["states"] = json::array();
    for (std::size_t i = 0; i < order.size(); ++i)
        doc["states"].push_back({{"id", i}, {"canonical", exploration.canonical[order[i]]}, {"initial", order[i] == 0}});
    doc["transitions"] = json::array();
    for (const auto& e : edges) {
        json args = json::object();
        auto params = exploration.actionParams.find(e.t->action.name);
        for (std::size_t k = 0; k < e.t->action.args.size(); ++k) {
            const std::string key = params != exploration.actionParams.end() && k < params->second.size()
                                        ? params->second[k]
                                        : std::to_string(k);
            const Value& v = e.t->action.args[k];
            if (v.isBool())
                args[key] = v.asBool();
            else if (v.isInt())
                args[key] = v.asInt();
            else
                args[key] = render(v);
        }
        doc["transitions"].push_back(
            {{"from", e.from}, {"action", e.t->action.name}, {"args", args}, {"rule", e.t->rule}, {"to", e.to}});
    }
    doc["undefined"] = json::array();
    for (const auto& [state, action] : undefined) doc["undefined"].push_back({{"state", state}, {"action", action}});
    doc["truncated"] = exploration.frontierTruncated;
    return doc.dump(2) + "\n";
}

} // namespace tsm
