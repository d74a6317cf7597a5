#include "check.hpp"

#include "helpers.hpp"

#include "commands.hpp"
#include "render.hpp"
#include "server.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <random>
#include <thread>

using namespace tsm;
using tsm::cli::ExplorerServer;
using tsm::cli::ServerOptions;
using json = nlohmann::ordered_json;

namespace {

/// Server on a free port, running on its own thread for the fixture's lifetime.
struct Running {
    explicit Running(const std::string& fixture, ServerOptions options = {})
        : model(testing::shared(testing::fixture(fixture))), server(model, [&] {
              options.port = 0;
              return options;
          }()) {
        REQUIRE(server.bind());
        thread = std::thread([this] { server.run(); });
        server.waitUntilReady();
        client = std::make_unique<httplib::Client>("127.0.0.1", server.port());
    }
    ~Running() {
        server.stop();
        thread.join();
    }

    std::shared_ptr<const Model> model;
    ExplorerServer server;
    std::thread thread;
    std::unique_ptr<httplib::Client> client;
};

json body(const httplib::Result& r) {
    REQUIRE(r);
    return json::parse(r->body);
}

std::string newSession(httplib::Client& c) {
    auto r = c.Post("/api/sessions");
    REQUIRE(r);
    REQUIRE(r->status == 201);
    return body(r)["sessionId"].get<std::string>();
}

httplib::Result fire(httplib::Client& c, const std::string& id, const json& action) {
    return c.Post("/api/sessions/" + id + "/fire", action.dump(), "application/json");
}

} // namespace

TEST_CASE("model summary") {
    Running s("trafficlight.tsm");
    const json m = body(s.client->Get("/api/model"));
    CHECK(m["name"] == "TrafficLight");
    CHECK(m["rules"].size() == 5);
    CHECK(m.dump().find("manualswitch") != std::string::npos);
}

TEST_CASE("session lifecycle") {
    Running s("trafficlight.tsm");
    auto& c = *s.client;
    const std::string id = newSession(c);
    json st = body(c.Get("/api/sessions/" + id));
    CHECK(st["state"]["s"] == "Color.Black");
    CHECK(st["observable"]["y"] == "Color.Black");
    CHECK(st["historyLength"] == 0);
    CHECK(st["enabled"].size() == 1);

    auto r = fire(c, id, {{"action", "timerflip"}});
    REQUIRE(r);
    CHECK(r->status == 200);
    json f = json::parse(r->body);
    CHECK(f["outcome"] == "fired");
    CHECK(f["rule"] == "r4");
    CHECK(f["state"]["s"] == "Color.Red");

    r = c.Post("/api/sessions/" + id + "/undo");
    CHECK(r->status == 200);
    CHECK(body(r)["state"]["s"] == "Color.Black");
    r = c.Post("/api/sessions/" + id + "/undo");
    CHECK(r->status == 409);
    CHECK(body(r).contains("error"));

    r = fire(c, id, {{"action", "manualswitch"}});
    CHECK(r->status == 200);
    f = body(r);
    CHECK(f["outcome"] == "undefined");
    CHECK(f["question"] == "What does the system do when manualswitch occurs in state {s: Color.Black}?");
    CHECK(body(c.Get("/api/sessions/" + id))["historyLength"] == 0);

    (void)fire(c, id, {{"action", "timerflip"}});
    (void)fire(c, id, {{"action", "timerflip"}});
    r = c.Post("/api/sessions/" + id + "/reset");
    CHECK(r->status == 200);
    CHECK(body(r)["state"]["s"] == "Color.Black");
    CHECK(body(r)["historyLength"] == 0);

    const std::string other = newSession(c);
    CHECK(other != id);
    (void)fire(c, id, {{"action", "timerflip"}});
    CHECK(body(c.Get("/api/sessions/" + other))["state"]["s"] == "Color.Black");
    CHECK(s.server.sessionCount() == 2);
}

TEST_CASE("request errors") {
    Running s("mytodo.tsm");
    auto& c = *s.client;
    const std::string id = newSession(c);
    CHECK(c.Get("/api/sessions/nope")->status == 404);
    CHECK(fire(c, "nope", {{"action", "Add"}, {"args", {{"t", "t1"}}}})->status == 404);
    CHECK(c.Post("/api/sessions/nope/undo")->status == 404);
    CHECK(c.Post("/api/sessions/nope/reset")->status == 404);

    auto bad = c.Post("/api/sessions/" + id + "/fire", "{not json", "application/json");
    CHECK(bad->status == 400);
    CHECK(body(bad).contains("error"));
    CHECK(fire(c, id, {{"action", "Zap"}})->status == 400);
    CHECK(fire(c, id, {{"action", "Add"}})->status == 400);
    CHECK(fire(c, id, {{"action", "Add"}, {"args", {{"t", 4}}}})->status == 400);
    CHECK(fire(c, id, {{"action", "Add"}, {"args", {{"t", "t1"}, {"u", "t2"}}}})->status == 400);

    CHECK(c.Get("/api/graph?maxList=lots")->status == 400);
    CHECK(c.Get("/api/graph?maxStates=0")->status == 400);
    CHECK(c.Get("/api/graph?maxStates=-3")->status == 400);
    CHECK(c.Get("/api/graph?ids=none")->status == 400);
    CHECK(c.Get("/api/graph?ids=")->status == 400);
    CHECK(c.Get("/api/questions?ids=t1,t1")->status == 400);
    CHECK(c.Get("/api/nothing")->status == 404);
}

TEST_CASE("graph and questions") {
    Running s("trafficlight.tsm");
    auto& c = *s.client;
    json g = body(c.Get("/api/graph"));
    CHECK(g["states"].size() == 4);
    CHECK(g["transitions"].size() == 7);
    g = body(c.Get("/api/graph?maxStates=1"));
    CHECK(g["states"].size() == 1);
    CHECK(g["transitions"].empty());

    const json q = body(c.Get("/api/questions"));
    REQUIRE(q["questions"].size() == 1);
    CHECK(q["questions"][0]["kind"] == "undefinedTransition");
    CHECK(q["truncated"] == false);

    // same bytes as the library export
    const auto r = c.Get("/api/graph");
    CHECK(r->body == exportGraph(explore(*s.model, Universe{}, 10000), GraphFormat::Json));
}

TEST_CASE("API fires agree with the library") {
    Running s("mytodo.tsm");
    auto& c = *s.client;
    std::mt19937_64 rng(31);
    const auto instances = actionInstances(*s.model, Universe{});
    for (int round = 0; round < 10; ++round) {
        const std::string id = newSession(c);
        Session local(s.model);
        for (int k = 0; k < 30; ++k) {
            const int pick = static_cast<int>(rng() % 10);
            if (pick == 0) {
                auto r = c.Post("/api/sessions/" + id + "/undo");
                if (local.historySize() == 0) {
                    CHECK(r->status == 409);
                } else {
                    CHECK(r->status == 200);
                    local.undo();
                }
                continue;
            }
            const ActionInstance& a = instances[rng() % instances.size()];
            json request{{"action", a.name}, {"args", json::object()}};
            request["args"]["t"] = render(a.args[0]);
            const StateEnv before = local.current();
            const StepOutcome expected = local.fire(a);
            const json got = body(fire(c, id, request));
            if (expected.undefined()) {
                CHECK(got["outcome"] == "undefined");
                CHECK(got["question"] == cli::undefinedPrompt(a, before));
            } else {
                CHECK(got["outcome"] == "fired");
                CHECK(got["rule"] == expected.get().ruleLabel);
                CHECK(got["state"] == cli::envJson(expected.get().nextState));
                CHECK(got["observable"] == cli::envJson(expected.get().observable));
            }
        }
        const json st = body(c.Get("/api/sessions/" + id));
        CHECK(st["state"] == cli::envJson(local.current()));
        CHECK(st["historyLength"] == local.historySize());
    }
}

TEST_CASE("concurrent fires on one session stay consistent") {
    Running s("trafficlight.tsm");
    const std::string id = newSession(*s.client);
    std::atomic<int> fired{0}, busy{0}, other{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < 8; ++w)
        workers.emplace_back([&] {
            httplib::Client c("127.0.0.1", s.server.port());
            for (int k = 0; k < 25; ++k) {
                auto r = fire(c, id, {{"action", "timerflip"}});
                if (r && r->status == 200)
                    ++fired;
                else if (r && r->status == 409)
                    ++busy;
                else
                    ++other;
            }
        });
    for (auto& t : workers) t.join();
    CHECK(other == 0);
    CHECK(fired + busy == 200);
    const json st = body(s.client->Get("/api/sessions/" + id));
    CHECK(st["historyLength"] == fired.load());
    // Black -> Red, then the three-colour cycle
    static const char* cycle[] = {"Color.Red", "Color.Yellow", "Color.Green"};
    CHECK(st["state"]["s"] == cycle[(fired - 1) % 3]);
}

TEST_CASE("idle sessions expire") {
    ServerOptions options;
    options.idleTimeout = std::chrono::seconds(0);
    Running s("trafficlight.tsm", options);
    const std::string id = newSession(*s.client);
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    CHECK(s.client->Get("/api/sessions/" + id)->status == 404);
    CHECK(s.server.sessionCount() == 0);
}

TEST_CASE("static files from the ui directory") {
    const auto dir = std::filesystem::temp_directory_path() / "tsm_server_ui";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "index.html") << "<p>explorer</p>";
    ServerOptions options;
    options.uiDir = dir;
    Running s("trafficlight.tsm", options);
    auto r = s.client->Get("/index.html");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->body == "<p>explorer</p>");
    CHECK(body(s.client->Get("/api/model"))["name"] == "TrafficLight");
}

TEST_CASE("serve on a busy port exits 2") {
    Running s("trafficlight.tsm");
    std::istringstream in;
    std::ostringstream out, err;
    const int code = cli::runCli({"serve", testing::fixturePath("trafficlight.tsm"), "--port", std::to_string(s.server.port())},
                                 {in, out, err, false});
    CHECK(code == 2);
    CHECK(err.str().find("cannot listen on 127.0.0.1:" + std::to_string(s.server.port())) != std::string::npos);
}
