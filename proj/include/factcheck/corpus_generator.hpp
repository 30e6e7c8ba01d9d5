#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "factcheck/claim.hpp"

namespace factcheck {

/// Synthetic evaluation world: templated one-sentence answers about made-up
/// entities, the gold facts planted into a triple file, a document corpus and
/// a search fixture, and some answers with an injected error.
///
/// Sources are assigned per example in repeating blocks of 20:
///   kg+web+db 4, kg 4, web 3, db 2, kg+web 2, kg+db 2, web+db 3
/// so any two sources cover at least 80% of the facts and no single source
/// more than 60%.
struct GeneratorOptions {
    std::uint64_t seed = 7;
    std::size_t examples = 200;
    /// Share of blocks whose examples carry an injected error.
    double hallucination_rate = 0.5;
    /// Share of knowledge-graph facts whose validity ended before the
    /// reference date (hidden when the graph is queried as of that date).
    double staleness = 0.0;
    Date reference_date{2024, 1, 1};
};

struct GeneratedFiles {
    std::filesystem::path corpus;  // eval.jsonl
    std::filesystem::path config;  // config.yaml
    std::size_t examples = 0;
    std::size_t injected_errors = 0;
};

/// Writes eval.jsonl, aliases.tsv, vocab.txt, kg.tsv, db.jsonl, web.json and
/// config.yaml into `out_dir` (created if missing). Same options, same bytes.
GeneratedFiles generate_corpus(const GeneratorOptions& opts, const std::filesystem::path& out_dir);

/// Sources covering example `index`, as a subset of {"kg", "web", "db"}.
std::vector<std::string> coverage_of(std::size_t index);

}  // namespace factcheck
