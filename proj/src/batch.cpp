#include "factcheck/batch.hpp"

#include <fstream>

#include <fmt/format.h>

#include "factcheck/text.hpp"

namespace factcheck {

BatchSummary run_batch(const Pipeline& pipeline, std::istream& in, std::ostream& out, bool diagnostics) {
    BatchSummary s;
    std::vector<double> latencies;
    double e_sum = 0.0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        VerifyRequest req;
        try {
            const auto j = nlohmann::json::parse(line);
            if (j.is_string()) req.text = j.get<std::string>();
            else req = verify_request_from_json(j);
        } catch (const std::exception& e) {
            ++s.errors;
            s.error_lines.push_back(fmt::format("line {}: {}", lineno, e.what()));
            auto err = error_envelope("invalid_line", e.what());
            err["error"]["line"] = lineno;
            out << err.dump() << '\n';
            continue;
        }
        const auto r = pipeline.verify(req.text, req.request);
        out << to_json(r, diagnostics || req.diagnostics).dump() << '\n';
        ++s.count;
        e_sum += r.e_score;
        latencies.push_back(r.timings.total);
        for (const auto& c : r.corrections) {
            ++s.corrections_by_strategy[std::string(to_string(c.strategy))];
            if (c.rolled_back) ++s.rolled_back;
        }
    }
    if (s.count > 0) s.mean_e_score = e_sum / static_cast<double>(s.count);
    s.latency_p50_ms = percentile(latencies, 50);
    s.latency_p95_ms = percentile(latencies, 95);
    s.latency_p99_ms = percentile(latencies, 99);
    return s;
}

BatchSummary run_batch(const Pipeline& pipeline, const std::filesystem::path& input,
                       const std::filesystem::path& output, bool diagnostics) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error(fmt::format("cannot open input {}", input.string()));
    std::ofstream out(output);
    if (!out) throw std::runtime_error(fmt::format("cannot open output {}", output.string()));
    return run_batch(pipeline, in, out, diagnostics);
}

ojson to_json(const BatchSummary& s) {
    ojson j;
    j["count"] = s.count;
    j["errors"] = s.errors;
    j["mean_e_score"] = round6(s.mean_e_score);
    j["latency_ms"] = {{"p50", round6(s.latency_p50_ms)},
                       {"p95", round6(s.latency_p95_ms)},
                       {"p99", round6(s.latency_p99_ms)}};
    ojson by = ojson::object();
    for (const auto& [k, v] : s.corrections_by_strategy) by[k] = v;
    j["corrections"] = by;
    j["rolled_back"] = s.rolled_back;
    if (!s.error_lines.empty()) j["error_lines"] = s.error_lines;
    return j;
}

}  // namespace factcheck
