#include "commands.hpp"

#include "render.hpp"
#include "server.hpp"
#include "tsm/analysis.hpp"
#include "tsm/frontend.hpp"
#include "tsm/semantics.hpp"
#include "tsm/session.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tsm::cli {

namespace {

struct UniverseFlags {
    std::vector<std::string> ids{"t1", "t2"};
    std::size_t maxList = 3;
    std::size_t maxStates = 10000;

    [[nodiscard]] Universe universe() const {
        Universe u;
        u.idPool = ids;
        u.maxListLen = maxList;
        return u;
    }
};

void addUniverseFlags(CLI::App* cmd, UniverseFlags& flags) {
    cmd->add_option("--ids", flags.ids, "Id pool for action parameters")->delimiter(',')->capture_default_str();
    cmd->add_option("--max-list", flags.maxList, "Prune states whose lists grow beyond this")->capture_default_str();
    cmd->add_option("--max-states", flags.maxStates, "Stop exploring after this many states")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

std::string plural(std::size_t n, const std::string& word) {
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

void printJson(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

/// Loads a model, printing diagnostics on failure.
std::shared_ptr<const Model> load(const std::string& path, Io& io) {
    ParseResult parsed = parseFile(path);
    if (parsed.ok()) return std::make_shared<const Model>(std::move(*parsed.model));
    for (const auto& d : parsed.diagnostics) io.err << d.str() << '\n';
    return nullptr;
}

// ---------------------------------------------------------------------------

int cmdCheck(const std::string& path, bool strict, bool asJson, Io& io) {
    ParseResult parsed = parseFile(path);
    const std::size_t errors = countErrors(parsed.diagnostics);
    const std::size_t warnings = parsed.diagnostics.size() - errors;
    const int status = errors ? kUsage : (strict && warnings ? kFindings : kOk);
    if (asJson) {
        json diags = json::array();
        for (const auto& d : parsed.diagnostics) diags.push_back(diagnosticJson(d));
        json doc = {{"file", path}};
        doc["model"] = parsed.ok() ? json(parsed.model->name) : json(nullptr);
        doc["errors"] = errors;
        doc["warnings"] = warnings;
        doc["diagnostics"] = diags;
        printJson(io.out, doc);
        return status;
    }
    for (const auto& d : parsed.diagnostics) io.out << d.str() << '\n';
    if (parsed.ok()) {
        const Model& m = *parsed.model;
        io.out << m.name << ": " << plural(m.stateVars.size(), "variable") << ", " << plural(m.actions.size(), "action")
               << ", " << plural(m.rules.size(), "rule");
        if (warnings) io.out << ", " << plural(warnings, "warning");
        io.out << '\n';
    } else {
        io.out << plural(errors, "error") << '\n';
    }
    return status;
}

// ---------------------------------------------------------------------------

int cmdSim(const std::string& path, const std::string& tracePath, bool asJson, Io& io) {
    auto model = load(path, io);
    if (!model) return kUsage;
    Trace trace;
    ReplayResult result;
    try {
        trace = readTraceFile(*model, tracePath);
        result = replay(*model, trace);
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << '\n';
        return kUsage;
    }
    const int status = result.halt ? kFindings : kOk;
    if (asJson) {
        json steps = json::array();
        for (std::size_t i = 0; i < result.steps.size(); ++i) {
            const ReplayStep& s = result.steps[i];
            steps.push_back({{"index", i},
                             {"action", trace.steps[i].action.canonical()},
                             {"rule", s.ruleLabel},
                             {"state", envJson(s.state)},
                             {"observable", envJson(s.observable)}});
        }
        json doc = {{"model", model->name}, {"steps", steps}};
        if (result.halt)
            doc["halt"] = {{"index", result.halt->index},
                           {"reason", result.halt->reason == ReplayHalt::Reason::Undefined ? "undefined" : "evalError"},
                           {"detail", result.halt->detail}};
        else
            doc["halt"] = nullptr;
        doc["finalState"] = envJson(result.finalState);
        printJson(io.out, doc);
        return status;
    }
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        const ReplayStep& s = result.steps[i];
        io.out << i << ": " << trace.steps[i].action.canonical() << " -> " << s.ruleLabel << "  "
               << s.observable.canonical() << '\n';
    }
    if (result.halt) {
        io.out << "halted at step " << result.halt->index << ": "
               << (result.halt->reason == ReplayHalt::Reason::Undefined ? "" : "evaluation error: ")
               << result.halt->detail << '\n';
    }
    io.out << "final state " << result.finalState.canonical() << '\n';
    return status;
}

// ---------------------------------------------------------------------------

std::vector<std::string> words(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

void showSession(const Session& s, const Universe& universe, Io& io) {
    io.out << "state: " << s.current().canonical() << '\n';
    io.out << "observable: " << observe(s.model(), s.current()).canonical() << '\n';
    io.out << "enabled:";
    std::vector<ActionInstance> enabled;
    try {
        enabled = enabledActions(s.model(), s.current(), universe);
    } catch (const EvalError& e) {
        io.out << " (evaluation error: " << e.what() << ")";
    }
    if (enabled.empty()) io.out << " none";
    for (const auto& a : enabled) io.out << ' ' << a.canonical();
    io.out << '\n';
}

int cmdStep(const std::string& path, const UniverseFlags& flags, Io& io) {
    auto model = load(path, io);
    if (!model) return kUsage;
    const Universe universe = flags.universe();
    try {
        (void)actionInstances(*model, universe);
    } catch (const UniverseMismatch& e) {
        io.err << "error: " << e.what() << '\n';
        return kUsage;
    }
    Session session(model);
    io.out << model->name << ": fire <action> [args], undo, reset, record <file>, quit\n";
    showSession(session, universe, io);

    std::string line;
    while (true) {
        if (io.interactive) io.out << "> " << std::flush;
        if (!std::getline(io.in, line)) break;
        const auto w = words(line);
        if (w.empty()) continue;
        const std::string& cmd = w[0];
        if (cmd == "quit" || cmd == "exit") break;
        if (cmd == "fire") {
            if (w.size() < 2) {
                io.out << "usage: fire <action> [args]\n";
                continue;
            }
            const ActionSig* sig = model->findAction(w[1]);
            if (!sig) {
                io.out << "unknown action " << w[1] << '\n';
                continue;
            }
            if (w.size() - 2 != sig->params.size()) {
                io.out << w[1] << " takes " << plural(sig->params.size(), "argument") << '\n';
                continue;
            }
            ActionInstance action{w[1], {}};
            std::string problem;
            for (std::size_t i = 0; i < sig->params.size() && problem.empty(); ++i) {
                auto v = parseValue(w[i + 2], sig->params[i].type, model->types, &problem);
                if (v) action.args.push_back(*v);
            }
            if (!problem.empty()) {
                io.out << "bad argument: " << problem << '\n';
                continue;
            }
            const StateEnv before = session.current();
            try {
                StepOutcome outcome = session.fire(action);
                if (outcome.undefined()) {
                    io.out << "undefined: " << undefinedPrompt(action, before) << '\n';
                    continue;
                }
                io.out << "fired " << outcome.get().ruleLabel << '\n';
            } catch (const EvalError& e) {
                io.out << "evaluation error: " << e.what() << '\n';
                continue;
            }
        } else if (cmd == "undo") {
            try {
                session.undo();
            } catch (const EmptyHistory& e) {
                io.out << e.what() << '\n';
                continue;
            }
        } else if (cmd == "reset") {
            session.reset();
        } else if (cmd == "record") {
            if (w.size() != 2) {
                io.out << "usage: record <file>\n";
                continue;
            }
            std::ofstream file(w[1], std::ios::binary);
            file << writeTrace(*model, session.recorded());
            if (!file) {
                io.out << "cannot write " << w[1] << '\n';
                continue;
            }
            io.out << "recorded " << plural(session.recorded().steps.size(), "step") << " to " << w[1] << '\n';
            continue;
        } else {
            io.out << "unknown command " << cmd << '\n';
            continue;
        }
        showSession(session, universe, io);
    }
    return kOk;
}

// ---------------------------------------------------------------------------

int cmdExplore(const std::string& path, const UniverseFlags& flags, const std::string& dotPath,
               const std::string& graphPath, bool asJson, Io& io) {
    auto model = load(path, io);
    if (!model) return kUsage;
    ExplorationResult ex;
    try {
        ex = explore(*model, flags.universe(), flags.maxStates);
    } catch (const UniverseMismatch& e) {
        io.err << "error: " << e.what() << '\n';
        return kUsage;
    }
    auto write = [&](const std::string& file, GraphFormat format) {
        if (file.empty()) return true;
        if (file == "-") {
            io.out << exportGraph(ex, format);
            return true;
        }
        std::ofstream out(file, std::ios::binary);
        out << exportGraph(ex, format);
        if (out) return true;
        io.err << "error: cannot write " << file << '\n';
        return false;
    };
    if (!write(dotPath, GraphFormat::Dot) || !write(graphPath, GraphFormat::Json)) return kUsage;

    const int status = ex.invariantViolations.empty() ? kOk : kFindings;
    if (dotPath == "-" || graphPath == "-") return status;  // stdout carries the graph alone
    auto path2json = [](const std::vector<ActionInstance>& p) {
        json out = json::array();
        for (const auto& a : p) out.push_back(a.canonical());
        return out;
    };
    if (asJson) {
        json deadlocks = json::array();
        for (auto s : ex.deadlocks) deadlocks.push_back(ex.canonical[s]);
        json violations = json::array();
        for (const auto& v : ex.invariantViolations)
            violations.push_back({{"invariant", v.invariant}, {"state", ex.canonical[v.state]}, {"path", path2json(v.path)}});
        json failures = json::array();
        for (const auto& f : ex.evalFailures)
            failures.push_back({{"state", ex.canonical[f.state]}, {"action", f.action.canonical()}, {"detail", f.detail}});
        json undefined = json::array();
        for (const auto& u : ex.undefinedPairs) undefined.push_back({{"state", ex.canonical[u.state]}, {"action", u.action}});
        printJson(io.out, {{"model", model->name},
                           {"states", ex.states.size()},
                           {"transitions", ex.transitions.size()},
                           {"undefined", undefined},
                           {"deadlocks", deadlocks},
                           {"invariantViolations", violations},
                           {"evalFailures", failures},
                           {"truncated", ex.frontierTruncated},
                           {"listBoundPruned", ex.listBoundPruned}});
        return status;
    }
    io.out << plural(ex.states.size(), "state") << ", " << plural(ex.transitions.size(), "transition") << ", "
           << plural(ex.undefinedPairs.size(), "undefined pair") << '\n';
    io.out << plural(ex.deadlocks.size(), "deadlock") << ", "
           << plural(ex.invariantViolations.size(), "invariant violation") << '\n';
    if (ex.frontierTruncated) io.out << "truncated: stopped at " << plural(flags.maxStates, "state") << '\n';
    if (ex.listBoundPruned)
        io.out << "pruned " << plural(ex.listBoundPruned, "successor") << " with lists longer than " << flags.maxList
               << '\n';
    for (auto s : ex.deadlocks) io.out << "deadlock: " << ex.canonical[s] << '\n';
    for (const auto& f : ex.evalFailures)
        io.out << "evaluation error: " << f.action.canonical() << " in " << ex.canonical[f.state] << ": " << f.detail
               << '\n';
    for (const auto& v : ex.invariantViolations) {
        io.out << "invariant " << v.invariant << " fails in " << ex.canonical[v.state] << " via";
        if (v.path.empty()) io.out << " init";
        for (const auto& a : v.path) io.out << ' ' << a.canonical();
        io.out << '\n';
    }
    return status;
}

// ---------------------------------------------------------------------------

int cmdConform(const std::string& path, const std::string& tracePath, bool strictOrder, bool asJson, Io& io) {
    auto model = load(path, io);
    if (!model) return kUsage;
    DivergenceReport report;
    Trace trace;
    try {
        trace = readTraceFile(*model, tracePath);
        report = checkConformance(*model, trace, {strictOrder});
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << '\n';
        return kUsage;
    }
    const int status = report.status == DivergenceReport::Status::Conformant ? kOk : kFindings;
    auto opt = [](const std::optional<Env>& env) { return env ? envJson(*env) : json(nullptr); };
    if (asJson) {
        json doc = {{"status", toString(report.status)}};
        doc["stepIndex"] = report.stepIndex ? json(*report.stepIndex) : json(nullptr);
        doc["action"] = report.stepIndex ? json(trace.steps[*report.stepIndex].action.canonical()) : json(nullptr);
        doc["expected"] = opt(report.expected);
        doc["actual"] = opt(report.actual);
        doc["stateAtDivergence"] = opt(report.stateAtDivergence);
        doc["firedRule"] = report.firedRule ? json(*report.firedRule) : json(nullptr);
        doc["detail"] = report.detail ? json(*report.detail) : json(nullptr);
        printJson(io.out, doc);
        return status;
    }
    switch (report.status) {
        case DivergenceReport::Status::Conformant:
            io.out << "conformant: " << plural(trace.steps.size(), "step") << '\n';
            break;
        case DivergenceReport::Status::Diverged:
            io.out << "diverged at step " << *report.stepIndex << ": "
                   << trace.steps[*report.stepIndex].action.canonical() << " fired " << *report.firedRule << '\n';
            io.out << "  expected " << report.expected->canonical() << '\n';
            io.out << "  actual   " << report.actual->canonical() << '\n';
            io.out << "  state    " << report.stateAtDivergence->canonical() << '\n';
            break;
        case DivergenceReport::Status::ModelUndefined:
            io.out << "model undefined at step " << *report.stepIndex << ": "
                   << trace.steps[*report.stepIndex].action.canonical() << " in "
                   << report.stateAtDivergence->canonical();
            if (report.detail) io.out << " (" << *report.detail << ")";
            io.out << '\n';
            break;
    }
    return status;
}

// ---------------------------------------------------------------------------

void printCategory(const char* what, const CategoryDiff& c, Io& io) {
    for (const auto& n : c.added) io.out << "+ " << what << ' ' << n << '\n';
    for (const auto& n : c.removed) io.out << "- " << what << ' ' << n << '\n';
    for (const auto& ch : c.changed) io.out << "~ " << what << ' ' << ch.name << ": " << ch.detail << '\n';
}

int cmdDiff(const std::string& oldPath, const std::string& newPath, bool asJson, Io& io) {
    auto before = load(oldPath, io);
    auto after = load(newPath, io);
    if (!before || !after) return kUsage;
    const ModelDiff d = diffModels(*before, *after);
    const int status = d.empty() ? kOk : kFindings;
    if (asJson) {
        printJson(io.out, diffJson(d));
        return status;
    }
    if (d.empty()) {
        io.out << "no differences\n";
        return status;
    }
    printCategory("enum", d.enums, io);
    printCategory("member", d.enumMembers, io);
    printCategory("record", d.records, io);
    printCategory("field", d.recordFields, io);
    printCategory("var", d.stateVars, io);
    printCategory("init", d.init, io);
    printCategory("action", d.actions, io);
    for (const auto& r : d.rulesAdded) io.out << "+ rule " << r << '\n';
    for (const auto& r : d.rulesRemoved) io.out << "- rule " << r << '\n';
    for (const auto& r : d.rulesChanged) {
        io.out << "~ rule " << r.label << ':';
        if (r.actionChanged) io.out << " action";
        if (r.guardChanged) io.out << " guard";
        if (r.updatesChanged) io.out << " updates";
        if (r.implChanged) io.out << " impl";
        if (r.moved) io.out << " moved";
        io.out << '\n';
    }
    printCategory("observe", d.observe, io);
    printCategory("invariant", d.invariants, io);
    return status;
}

// ---------------------------------------------------------------------------

int cmdQuestions(const std::string& path, const UniverseFlags& flags, bool asJson, Io& io) {
    auto model = load(path, io);
    if (!model) return kUsage;
    UnderspecReport report;
    bool truncated = false;
    try {
        const ExplorationResult ex = explore(*model, flags.universe(), flags.maxStates);
        truncated = ex.frontierTruncated;
        report = questionsReport(*model, ex);
    } catch (const UniverseMismatch& e) {
        io.err << "error: " << e.what() << '\n';
        return kUsage;
    }
    const int status = report.questions.empty() ? kOk : kFindings;
    if (asJson) {
        json items = json::array();
        for (const auto& q : report.questions) items.push_back(questionJson(q));
        printJson(io.out, {{"model", model->name}, {"questions", items}, {"truncated", truncated}});
        return status;
    }
    for (std::size_t i = 0; i < report.questions.size(); ++i) {
        const QuestionItem& q = report.questions[i];
        io.out << i + 1 << ". [" << toString(q.kind) << "] " << q.prompt << '\n';
        if (q.span && q.span->valid()) io.out << "   at " << q.span->str() << '\n';
    }
    io.out << plural(report.questions.size(), "question");
    if (truncated) io.out << " (exploration truncated)";
    io.out << '\n';
    return status;
}

// ---------------------------------------------------------------------------

ExplorerServer* runningServer = nullptr;

extern "C" void onSignal(int) {
    if (runningServer) runningServer->stop();
}

int cmdServe(const std::string& path, ServerOptions options, Io& io) {
    auto model = load(path, io);
    if (!model) return kUsage;
    if (options.uiDir && !std::filesystem::is_directory(*options.uiDir)) {
        io.err << "error: " << options.uiDir->string() << " is not a directory\n";
        return kUsage;
    }
    ExplorerServer server(model, options);
    if (!server.bind()) {
        io.err << "error: cannot listen on " << options.host << ':' << options.port << '\n';
        return kUsage;
    }
    io.out << "serving " << model->name << " on http://" << options.host << ':' << server.port() << std::endl;
    runningServer = &server;
    auto previousInt = std::signal(SIGINT, onSignal);
    auto previousTerm = std::signal(SIGTERM, onSignal);
    server.run();
    std::signal(SIGINT, previousInt);
    std::signal(SIGTERM, previousTerm);
    runningServer = nullptr;
    return kOk;
}

} // namespace

int runCli(const std::vector<std::string>& args, Io io) {
    CLI::App app{"Transition-system models: check, simulate, explore and question them", "tsm"};
    app.require_subcommand(1);
    bool asJson = false;
    app.add_flag("--json", asJson, "Machine-readable output");

    std::string model, other;
    bool strict = false, strictOrder = false;
    UniverseFlags flags;
    std::string dotPath, graphPath;
    ServerOptions serve;
    std::string uiDir;

    auto* check = app.add_subcommand("check", "Parse and validate a model");
    check->add_option("model", model, "Model file")->required();
    check->add_flag("--strict", strict, "Treat warnings as findings");
    check->add_flag("--json", asJson);

    auto* sim = app.add_subcommand("sim", "Replay a trace and print each observable");
    sim->add_option("model", model, "Model file")->required();
    sim->add_option("trace", other, "Trace JSON file")->required();
    sim->add_flag("--json", asJson);

    auto* step = app.add_subcommand("step", "Interactive stepping");
    step->add_option("model", model, "Model file")->required();
    addUniverseFlags(step, flags);

    auto* exploreCmd = app.add_subcommand("explore", "Enumerate reachable states");
    exploreCmd->add_option("model", model, "Model file")->required();
    addUniverseFlags(exploreCmd, flags);
    exploreCmd->add_option("--dot", dotPath, "Write the state graph as DOT (- for stdout)");
    exploreCmd->add_option("--graph-json", graphPath, "Write the state graph as JSON (- for stdout)");
    exploreCmd->add_flag("--json", asJson);

    auto* conform = app.add_subcommand("conform", "Compare a model with an observed trace");
    conform->add_option("model", model, "Model file")->required();
    conform->add_option("trace", other, "Observed trace JSON file")->required();
    conform->add_flag("--strict-order", strictOrder, "Compare lists in order");
    conform->add_flag("--json", asJson);

    auto* diff = app.add_subcommand("diff", "Structural difference between two models");
    diff->add_option("old", model, "Old model file")->required();
    diff->add_option("new", other, "New model file")->required();
    diff->add_flag("--json", asJson);

    auto* questions = app.add_subcommand("questions", "Generate questions about gaps in a model");
    questions->add_option("model", model, "Model file")->required();
    addUniverseFlags(questions, flags);
    questions->add_flag("--json", asJson);

    auto* serveCmd = app.add_subcommand("serve", "Serve the explorer HTTP API");
    serveCmd->add_option("model", model, "Model file")->required();
    serveCmd->add_option("--host", serve.host)->capture_default_str();
    serveCmd->add_option("--port", serve.port)->check(CLI::Range(0, 65535))->capture_default_str();
    serveCmd->add_option("--ui-dir", uiDir, "Static files for the web explorer");

    std::vector<const char*> argv{"tsm"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, io.out, io.err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, io.out, io.err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, io.out, io.err);
        return kUsage;
    }

    if (check->parsed()) return cmdCheck(model, strict, asJson, io);
    if (sim->parsed()) return cmdSim(model, other, asJson, io);
    if (step->parsed()) return cmdStep(model, flags, io);
    if (exploreCmd->parsed()) return cmdExplore(model, flags, dotPath, graphPath, asJson, io);
    if (conform->parsed()) return cmdConform(model, other, strictOrder, asJson, io);
    if (diff->parsed()) return cmdDiff(model, other, asJson, io);
    if (questions->parsed()) return cmdQuestions(model, flags, asJson, io);
    if (!uiDir.empty()) serve.uiDir = uiDir;
    return cmdServe(model, serve, io);
}

} // namespace tsm::cli
