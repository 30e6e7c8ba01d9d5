#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace factcheck {

/// Replays fixture search results over HTTP, for tests and offline runs.
///
/// Fixture JSON:
///   {"delay_ms": 0,
///    "routes": [{"match": ["einstein"], "status": 200, "hits": [...]}]}
/// A request is answered by the first route whose match terms all occur
/// (case-insensitively) in the q parameter; unmatched queries get [].
class MockSearchServer {
  public:
    explicit MockSearchServer(nlohmann::json fixture);
    static MockSearchServer from_file(const std::filesystem::path& path);
    static nlohmann::json read_fixture(const std::filesystem::path& path);
    ~MockSearchServer();

    MockSearchServer(const MockSearchServer&) = delete;
    MockSearchServer& operator=(const MockSearchServer&) = delete;

    /// Binds (port 0 picks a free port) and serves on a background thread.
    void start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();

    int port() const { return port_; }
    std::string url() const;

    void set_delay(std::chrono::milliseconds d) { delay_ms_ = d.count(); }
    std::size_t requests_served() const { return served_; }

  private:
    nlohmann::json fixture_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<long long> delay_ms_{0};
    std::atomic<std::size_t> served_{0};
};

}  // namespace factcheck
