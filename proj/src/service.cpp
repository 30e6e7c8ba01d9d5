#include "factcheck/service.hpp"

#include <charconv>
#include <mutex>

#include <fmt/format.h>
#include <httplib.h>

#include "factcheck/json_codec.hpp"

namespace factcheck {

namespace {

void send_json(httplib::Response& res, int status, const ojson& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
    send_json(res, status, error_envelope(code, message));
}

// httplib defaults to SO_REUSEPORT, which lets a second server bind a port
// that is already serving instead of failing.
void exclusive_port(httplib::Server& server) {
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
}

}  // namespace

std::pair<std::string, int> parse_bind_address(std::string_view bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
        throw std::invalid_argument(fmt::format("bind address '{}' is not host:port", bind));
    int port = -1;
    const auto digits = bind.substr(colon + 1);
    const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc() || p != digits.data() + digits.size() || port < 0 || port > 65535)
        throw std::invalid_argument(fmt::format("bind address '{}' has an invalid port", bind));
    return {std::string(bind.substr(0, colon)), port};
}

VerificationService::VerificationService(std::shared_ptr<Runtime> runtime, RuntimeLoader loader)
    : server_(std::make_unique<httplib::Server>()), runtime_(std::move(runtime)), loader_(std::move(loader)) {
    if (!runtime_) throw std::invalid_argument("service needs a runtime");
    const auto workers = runtime_->config().max_concurrent;
    server_->new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
    exclusive_port(*server_);
    install_routes();
}

VerificationService::~VerificationService() { stop(); }

std::shared_ptr<Runtime> VerificationService::runtime() const {
    std::shared_lock lock(mu_);
    return runtime_;
}

void VerificationService::reload() {
    if (!loader_) throw std::runtime_error("no configuration source to reload from");
    auto fresh = loader_();
    std::unique_lock lock(mu_);
    runtime_ = std::move(fresh);
}

void VerificationService::install_routes() {
    server_->Post("/verify", [this](const httplib::Request& req, httplib::Response& res) {
        VerifyRequest vr;
        try {
            vr = parse_verify_request(req.body);
        } catch (const RequestInvalid& e) {
            send_error(res, 400, e.code(), e.what());
            return;
        }
        const auto rt = runtime();
        const auto result = rt->pipeline()->verify(vr.text, vr.request);
        res.set_header("Server-Timing", server_timing_header(result.timings));
        send_json(res, 200, to_json(result, vr.diagnostics));
    });

    server_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, to_json(runtime()->pipeline()->health()));
    });

    server_->Get("/config", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, to_json(runtime()->config()));
    });

    server_->Post("/admin/reload", [this](const httplib::Request&, httplib::Response& res) {
        try {
            reload();
        } catch (const ConfigInvalid& e) {
            send_error(res, 400, "config_invalid", e.what());
            return;
        } catch (const std::exception& e) {
            send_error(res, 500, "reload_failed", e.what());
            return;
        }
        ojson ok;
        ok["status"] = "reloaded";
        send_json(res, 200, ok);
    });

    server_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string msg = "unknown error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            msg = e.what();
        } catch (...) {
        }
        send_error(res, 500, "internal", msg);
    });
}

int VerificationService::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
        if (port_ < 0) throw BindFailure(fmt::format("cannot bind {}:<any>", host));
    } else {
        if (!server_->bind_to_port(host, port)) throw BindFailure(fmt::format("cannot bind {}:{}", host, port));
        port_ = port;
    }
    return port_;
}

void VerificationService::listen() { server_->listen_after_bind(); }

int VerificationService::start(const std::string& host, int port) {
    const int bound = bind(host, port);
    thread_ = std::thread([this] { listen(); });
    server_->wait_until_ready();
    return bound;
}

void VerificationService::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace factcheck
