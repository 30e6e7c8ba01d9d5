#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "factcheck/json_codec.hpp"
#include "factcheck/pipeline.hpp"

namespace factcheck {

struct BatchSummary {
    std::size_t count = 0;
    std::size_t errors = 0;
    double mean_e_score = 0.0;
    double latency_p50_ms = 0.0;
    double latency_p95_ms = 0.0;
    double latency_p99_ms = 0.0;
    std::map<std::string, std::size_t> corrections_by_strategy;
    std::size_t rolled_back = 0;
    /// "line N: message" for every rejected input line.
    std::vector<std::string> error_lines;
};

/// Reads JSON lines (request objects or bare strings) and writes one line per
/// non-blank input line: the VerifiedResponse, or an error object carrying
/// the line number. Bad lines never stop the run.
BatchSummary run_batch(const Pipeline& pipeline, std::istream& in, std::ostream& out, bool diagnostics = false);

/// Throws std::runtime_error when a file cannot be opened.
BatchSummary run_batch(const Pipeline& pipeline, const std::filesystem::path& input,
                       const std::filesystem::path& output, bool diagnostics = false);

ojson to_json(const BatchSummary& s);

}  // namespace factcheck
