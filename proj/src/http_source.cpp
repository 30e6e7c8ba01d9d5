#include "factcheck/http_source.hpp"

#include <chrono>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "factcheck/text.hpp"

namespace factcheck {

using json = nlohmann::json;

HttpEndpoint HttpEndpoint::parse(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) throw std::invalid_argument(fmt::format("bad endpoint url '{}'", url));
    const auto path_start = url.find('/', scheme_end + 3);
    HttpEndpoint e;
    if (path_start == std::string_view::npos) {
        e.scheme_host_port = std::string(url);
        e.path = "/";
    } else {
        e.scheme_host_port = std::string(url.substr(0, path_start));
        e.path = std::string(url.substr(path_start));
    }
    if (e.scheme_host_port.size() <= scheme_end + 3)
        throw std::invalid_argument(fmt::format("bad endpoint url '{}'", url));
    return e;
}

std::vector<Hit> parse_hit_list(std::string_view body, const AliasTable* aliases) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw SourceUnavailable(fmt::format("malformed hit list: {}", e.what()));
    }
    if (!j.is_array()) throw SourceUnavailable("malformed hit list: expected a JSON array");
    std::vector<Hit> hits;
    for (const auto& item : j) {
        try {
            Hit h;
            const auto& v = item.at("value");
            std::string value = v.is_string() ? v.get<std::string>() : v.dump();
            if (item.contains("unit")) value += " " + item.at("unit").get<std::string>();
            h.value = parse_claim_value(item.at("value_type").get<std::string>(), value, aliases);
            h.authority = item.value("authority", 1.0);
            if (!(h.authority >= 0.0 && h.authority <= 1.0)) throw std::invalid_argument("authority out of [0,1]");
            if (item.contains("published") && !item.at("published").is_null())
                h.published = *parse_claim_value("date", item.at("published").get<std::string>()).get_if<Date>();
            h.citations = item.value("citations", std::uint64_t{0});
            h.snippet = item.value("snippet", "");
            if (item.contains("label")) h.label = item.at("label").get<std::string>();
            hits.push_back(std::move(h));
        } catch (const std::exception& e) {
            throw SourceUnavailable(fmt::format("malformed hit: {}", e.what()));
        }
    }
    return hits;
}

HttpSearchSource::HttpSearchSource(SourceProfile profile, HttpEndpoint endpoint, ScoringContext ctx,
                                   std::shared_ptr<const AliasTable> aliases)
    : profile_(std::move(profile)), endpoint_(std::move(endpoint)), ctx_(ctx), aliases_(std::move(aliases)) {
    profile_.validate();
}

Evidence HttpSearchSource::query(const Claim& claim) const {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    httplib::Client cli(endpoint_.scheme_host_port);
    const auto timeout = profile_.timeout;
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    cli.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    const std::string target =
        fmt::format("{}?q={}&k={}", endpoint_.path, text::url_encode(claim.raw_text), profile_.max_results);
    auto res = cli.Get(target);
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);
    if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout || elapsed >= timeout - std::chrono::milliseconds{5})
            throw SourceTimeout(fmt::format("{}: no response within {} ms", profile_.source_id, timeout.count()));
        throw SourceUnavailable(fmt::format("{}: {}", profile_.source_id, httplib::to_string(err)));
    }
    if (res->status < 200 || res->status >= 300)
        throw SourceUnavailable(fmt::format("{}: HTTP {}", profile_.source_id, res->status));

    auto hits = parse_hit_list(res->body, aliases_.get());
    if (hits.size() > static_cast<std::size_t>(profile_.max_results)) hits.resize(profile_.max_results);
    Evidence e = aggregate_hits(claim, profile_, hits, ctx_, profile_.citation_reference);
    e.latency = elapsed;
    return e;
}

SourceHealth HttpSearchSource::health() const {
    httplib::Client cli(endpoint_.scheme_host_port);
    cli.set_connection_timeout(std::chrono::milliseconds{300});
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(profile_.timeout));
    auto res = cli.Get(endpoint_.path + "?q=&k=1");
    if (!res) return {false, httplib::to_string(res.error())};
    if (res->status >= 500) return {false, fmt::format("HTTP {}", res->status)};
    return {true, "ok"};
}

}  // namespace factcheck
