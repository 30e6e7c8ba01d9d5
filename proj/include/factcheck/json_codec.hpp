#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "factcheck/config.hpp"
#include "factcheck/confidence.hpp"
#include "factcheck/pipeline.hpp"

namespace factcheck {

using ojson = nlohmann::ordered_json;

/// Rounds to 6 significant digits so serialized numbers are stable.
double round6(double v);

ojson to_json(const ClaimValue& v);
ojson to_json(const Claim& c);
ojson to_json(const ValueDistribution& d);
ojson to_json(const Correction& c);

/// Field order is fixed. Run-dependent diagnostics (stage timings, source
/// latencies, cache hits) are only included when `diagnostics` is set, so
/// two runs over the same fixtures serialize to identical bytes.
ojson to_json(const VerifiedResponse& r, bool diagnostics = false);

ojson to_json(const StageTimings& t);
ojson to_json(const std::vector<SourceStatus>& health);
ojson to_json(const AppConfig& c);

/// Value for an HTTP Server-Timing header.
std::string server_timing_header(const StageTimings& t);

class RequestInvalid : public std::invalid_argument {
  public:
    RequestInvalid(std::string code, const std::string& message)
        : std::invalid_argument(message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

struct VerifyRequest {
    std::string text;
    std::string context;
    RequestContext request;
    bool diagnostics = false;
};

/// {text, context?, intrinsic_confidences?: {claim id or text: p},
///  samples?: [text], timings?: bool}. Throws RequestInvalid.
VerifyRequest parse_verify_request(std::string_view body);
VerifyRequest verify_request_from_json(const nlohmann::json& j);

ojson error_envelope(std::string_view code, std::string_view message);

}  // namespace factcheck
