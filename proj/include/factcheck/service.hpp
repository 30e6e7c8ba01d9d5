#pragma once

#include <functional>
#include <memory>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include "factcheck/config.hpp"

namespace httplib {
class Server;
}

namespace factcheck {

class BindFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// "host:port" -> (host, port). Throws std::invalid_argument.
std::pair<std::string, int> parse_bind_address(std::string_view bind);

using RuntimeLoader = std::function<std::shared_ptr<Runtime>()>;

/// HTTP front end:
///   POST /verify        VerifiedResponse JSON (400 with an error envelope on bad input)
///   GET  /health        per-source status; 200 even when degraded
///   GET  /config        effective configuration
///   POST /admin/reload  rebuilds the runtime via the loader and swaps it in
/// Requests in flight keep the runtime they started with.
class VerificationService {
  public:
    VerificationService(std::shared_ptr<Runtime> runtime, RuntimeLoader loader = {});
    ~VerificationService();

    VerificationService(const VerificationService&) = delete;
    VerificationService& operator=(const VerificationService&) = delete;

    /// Port 0 picks a free port. Returns the bound port. Throws BindFailure.
    int bind(const std::string& host, int port);
    /// Serves until stop(); requires bind().
    void listen();
    /// bind() then listen() on a background thread.
    int start(const std::string& host, int port);
    /// Stops accepting and waits for in-flight requests.
    void stop();

    int port() const { return port_; }
    std::shared_ptr<Runtime> runtime() const;
    /// Throws whatever the loader throws; the old runtime stays on failure.
    void reload();

  private:
    void install_routes();

    std::unique_ptr<httplib::Server> server_;
    mutable std::shared_mutex mu_;
    std::shared_ptr<Runtime> runtime_;
    RuntimeLoader loader_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace factcheck
