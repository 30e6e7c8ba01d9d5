#include "factcheck/mock_search_server.hpp"

#include <fstream>

#include <fmt/format.h>
#include <httplib.h>

#include "factcheck/text.hpp"

namespace factcheck {

using json = nlohmann::json;

MockSearchServer::MockSearchServer(json fixture) : fixture_(std::move(fixture)) {
    delay_ms_ = fixture_.value("delay_ms", 0LL);
}

json MockSearchServer::read_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open mock fixture {}", path.string()));
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
    }
}

MockSearchServer MockSearchServer::from_file(const std::filesystem::path& path) {
    return MockSearchServer(read_fixture(path));
}

MockSearchServer::~MockSearchServer() { stop(); }

void MockSearchServer::start(const std::string& host, int port) {
    server_ = std::make_unique<httplib::Server>();
    server_->new_task_queue = [] { return new httplib::ThreadPool(32); };
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    server_->Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
        if (auto d = delay_ms_.load(); d > 0) std::this_thread::sleep_for(std::chrono::milliseconds(d));
        const std::string q = text::to_lower(req.get_param_value("q"));
        std::size_t k = 10;
        if (req.has_param("k")) k = static_cast<std::size_t>(std::max(0, std::stoi(req.get_param_value("k"))));
        json hits = json::array();
        int status = 200;
        for (const auto& route : fixture_.value("routes", json::array())) {
            bool match = true;
            for (const auto& term : route.value("match", json::array()))
                match = match && q.find(text::to_lower(term.get<std::string>())) != std::string::npos;
            if (!match) continue;
            status = route.value("status", 200);
            hits = route.value("hits", json::array());
            break;
        }
        if (hits.is_array() && hits.size() > k) hits.erase(hits.begin() + static_cast<long>(k), hits.end());
        ++served_;
        res.status = status;
        res.set_content(status == 200 ? hits.dump() : json{{"error", "mock failure"}}.dump(), "application/json");
    });
    port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (port_ <= 0) throw std::runtime_error(fmt::format("mock search server: cannot bind {}:{}", host, port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void MockSearchServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
    server_.reset();
}

std::string MockSearchServer::url() const { return fmt::format("http://127.0.0.1:{}/search", port_); }

}  // namespace factcheck
