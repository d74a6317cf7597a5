#include "server.hpp"

#include "render.hpp"
#include "tsm/analysis.hpp"

#include <httplib.h>

#include <sstream>

namespace tsm::cli {

namespace {

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void error(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, {{"error", message}});
}

std::size_t positiveParam(const httplib::Request& req, const char* name, std::size_t fallback) {
    if (!req.has_param(name)) return fallback;
    const std::string text = req.get_param_value(name);
    std::size_t used = 0;
    unsigned long long n = 0;
    try {
        n = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || text.front() == '-')
        throw std::invalid_argument(std::string(name) + " must be a non-negative integer");
    return static_cast<std::size_t>(n);
}

Universe universeFrom(const httplib::Request& req) {
    Universe u;
    if (req.has_param("ids")) {
        u.idPool.clear();
        std::stringstream in(req.get_param_value("ids"));
        for (std::string id; std::getline(in, id, ',');) u.idPool.push_back(id);
    }
    u.maxListLen = positiveParam(req, "maxList", u.maxListLen);
    return u;
}

json sessionJson(const Session& s) {
    json enabled = json::array();
    for (const auto& a : enabledActions(s.model(), s.current(), Universe{})) enabled.push_back(actionJson(s.model(), a));
    return {{"state", envJson(s.current())},
            {"observable", envJson(observe(s.model(), s.current()))},
            {"enabled", enabled},
            {"historyLength", s.historySize()}};
}

constexpr std::size_t kDefaultMaxStates = 10000;

} // namespace

ExplorerServer::ExplorerServer(std::shared_ptr<const Model> model, ServerOptions options)
    : model_(std::move(model)), options_(std::move(options)), http_(std::make_unique<httplib::Server>()),
      rng_(std::random_device{}()) {
    // SO_REUSEADDR only, not httplib's default SO_REUSEPORT.
    http_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    routes();
}

ExplorerServer::~ExplorerServer() { stop(); }

bool ExplorerServer::bind() {
    if (options_.port == 0) {
        port_ = http_->bind_to_any_port(options_.host);
        return port_ > 0;
    }
    if (!http_->bind_to_port(options_.host, options_.port)) return false;
    port_ = options_.port;
    return true;
}

void ExplorerServer::run() { http_->listen_after_bind(); }
void ExplorerServer::stop() {
    if (http_) http_->stop();
}
void ExplorerServer::waitUntilReady() const { http_->wait_until_ready(); }

std::size_t ExplorerServer::sessionCount() {
    std::lock_guard lock(sessionsMutex_);
    return sessions_.size();
}

std::string ExplorerServer::newId() {
    std::ostringstream out;
    out << std::hex << rng_() << rng_();
    return out.str();
}

void ExplorerServer::expireIdle() {
    const auto now = std::chrono::steady_clock::now();
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        std::unique_lock slot(it->second->mutex, std::try_to_lock);
        if (slot && now - it->second->lastUsed > options_.idleTimeout)
            it = sessions_.erase(it);
        else
            ++it;
    }
}

std::shared_ptr<ExplorerServer::Slot> ExplorerServer::find(const std::string& id) {
    std::lock_guard lock(sessionsMutex_);
    expireIdle();
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

void ExplorerServer::routes() {
    auto& srv = *http_;

    srv.Get("/api/model", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, modelSummaryJson(*model_));
    });

    srv.Post("/api/sessions", [this](const httplib::Request&, httplib::Response& res) {
        auto slot = std::make_shared<Slot>(model_);
        std::string id;
        {
            std::lock_guard lock(sessionsMutex_);
            expireIdle();
            do id = newId();
            while (sessions_.count(id));
            sessions_.emplace(id, slot);
        }
        reply(res, 201, {{"sessionId", id}});
    });

    srv.Get(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto slot = find(req.matches[1]);
        if (!slot) return error(res, 404, "unknown session");
        std::lock_guard lock(slot->mutex);
        slot->lastUsed = std::chrono::steady_clock::now();
        reply(res, 200, sessionJson(slot->session));
    });

    // Mutations never wait; a busy session answers 409.
    auto mutate = [this](const httplib::Request& req, httplib::Response& res, auto&& body) {
        auto slot = find(req.matches[1]);
        if (!slot) return error(res, 404, "unknown session");
        std::unique_lock lock(slot->mutex, std::try_to_lock);
        if (!lock) return error(res, 409, "session is busy");
        slot->lastUsed = std::chrono::steady_clock::now();
        body(slot->session);
    };

    srv.Post(R"(/api/sessions/([^/]+)/fire)", [this, mutate](const httplib::Request& req, httplib::Response& res) {
        ActionInstance action;
        try {
            action = readAction(*model_, req.body);
        } catch (const TraceError& e) {
            return error(res, 400, e.what());
        }
        mutate(req, res, [&](Session& session) {
            const StateEnv before = session.current();
            try {
                StepOutcome outcome = session.fire(action);
                if (outcome.undefined()) {
                    reply(res, 200, {{"outcome", "undefined"}, {"question", undefinedPrompt(action, before)}});
                    return;
                }
                const Fired& fired = outcome.get();
                reply(res, 200,
                      {{"outcome", "fired"},
                       {"rule", fired.ruleLabel},
                       {"state", envJson(fired.nextState)},
                       {"observable", envJson(fired.observable)}});
            } catch (const EvalError& e) {
                error(res, 422, e.what());
            } catch (const ModelError& e) {
                error(res, 400, e.what());
            }
        });
    });

    srv.Post(R"(/api/sessions/([^/]+)/undo)", [mutate](const httplib::Request& req, httplib::Response& res) {
        mutate(req, res, [&](Session& session) {
            try {
                session.undo();
            } catch (const EmptyHistory& e) {
                return error(res, 409, e.what());
            }
            reply(res, 200, sessionJson(session));
        });
    });

    srv.Post(R"(/api/sessions/([^/]+)/reset)", [mutate](const httplib::Request& req, httplib::Response& res) {
        mutate(req, res, [&](Session& session) {
            session.reset();
            reply(res, 200, sessionJson(session));
        });
    });

    srv.Get("/api/graph", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            const Universe u = universeFrom(req);
            const std::size_t maxStates = positiveParam(req, "maxStates", kDefaultMaxStates);
            if (maxStates == 0) return error(res, 400, "maxStates must be positive");
            res.status = 200;
            res.set_content(exportGraph(explore(*model_, u, maxStates), GraphFormat::Json), "application/json");
        } catch (const std::invalid_argument& e) {
            error(res, 400, e.what());
        }
    });

    srv.Get("/api/questions", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            const Universe u = universeFrom(req);
            const std::size_t maxStates = positiveParam(req, "maxStates", kDefaultMaxStates);
            if (maxStates == 0) return error(res, 400, "maxStates must be positive");
            const ExplorationResult ex = explore(*model_, u, maxStates);
            json items = json::array();
            for (const auto& q : questionsReport(*model_, ex).questions) items.push_back(questionJson(q));
            reply(res, 200, {{"questions", items}, {"truncated", ex.frontierTruncated}});
        } catch (const std::invalid_argument& e) {
            error(res, 400, e.what());
        }
    });

    if (options_.uiDir) srv.set_mount_point("/", options_.uiDir->string());
}

} // namespace tsm::cli
