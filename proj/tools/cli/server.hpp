#pragma once

#include "tsm/model.hpp"
#include "tsm/session.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>

namespace httplib {
class Server;
}

namespace tsm::cli {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::optional<std::filesystem::path> uiDir;
    std::chrono::seconds idleTimeout{30 * 60};
};

/// HTTP front end over one model. Sessions live in memory; each has its own
/// mutex, and a mutation that finds it held is rejected with 409.
class ExplorerServer {
public:
    ExplorerServer(std::shared_ptr<const Model> model, ServerOptions options);
    ~ExplorerServer();
    ExplorerServer(const ExplorerServer&) = delete;
    ExplorerServer& operator=(const ExplorerServer&) = delete;

    /// Returns false if the address is unavailable.
    bool bind();
    [[nodiscard]] int port() const { return port_; }
    /// Blocks until stop().
    void run();
    void stop();
    void waitUntilReady() const;

    [[nodiscard]] std::size_t sessionCount();

private:
    struct Slot {
        explicit Slot(std::shared_ptr<const Model> model) : session(std::move(model)) {}
        std::mutex mutex;
        Session session;
        std::chrono::steady_clock::time_point lastUsed = std::chrono::steady_clock::now();
    };

    void routes();
    std::shared_ptr<Slot> find(const std::string& id);
    std::string newId();
    void expireIdle();

    std::shared_ptr<const Model> model_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> http_;
    int port_ = 0;

    std::mutex sessionsMutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::mt19937_64 rng_;
};

} // namespace tsm::cli
