#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/alias_table.hpp"
#include "factcheck/evidence.hpp"

namespace factcheck {

struct HttpEndpoint {
    std::string scheme_host_port;  // "http://127.0.0.1:8089"
    std::string path;              // "/search"

    /// Splits "http://host:port/path". Throws std::invalid_argument.
    static HttpEndpoint parse(std::string_view url);
    std::string url() const { return scheme_host_port + path; }
};

/// Parses the JSON hit list returned by a search endpoint:
///   [{snippet, value, value_type, authority, published, citations, label?, unit?}]
/// Throws SourceUnavailable on malformed bodies.
std::vector<Hit> parse_hit_list(std::string_view body, const AliasTable* aliases = nullptr);

/// Generic search adapter: GET <endpoint>?q=<claim text>&k=<max_results>.
/// The hit list is folded into evidence with the same authority-weighted rule
/// as the document corpus.
class HttpSearchSource final : public KnowledgeSource {
  public:
    HttpSearchSource(SourceProfile profile, HttpEndpoint endpoint, ScoringContext ctx,
                     std::shared_ptr<const AliasTable> aliases = nullptr);

    const SourceProfile& profile() const override { return profile_; }
    Evidence query(const Claim& claim) const override;
    /// Probes the endpoint with a short timeout.
    SourceHealth health() const override;

    const HttpEndpoint& endpoint() const { return endpoint_; }

  private:
    SourceProfile profile_;
    HttpEndpoint endpoint_;
    ScoringContext ctx_;
    std::shared_ptr<const AliasTable> aliases_;
};

}  // namespace factcheck
