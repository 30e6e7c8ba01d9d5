#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "factcheck/calibration.hpp"
#include "factcheck/claim.hpp"
#include "factcheck/config.hpp"
#include "factcheck/json_codec.hpp"
#include "factcheck/pipeline.hpp"

namespace factcheck {

class EmptyCorpus : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class ExampleLabel { Factual, Hallucinated };

struct GoldClaim {
    std::string subject_id;
    std::string predicate;
    ClaimValue value;
};

struct LabeledExample {
    std::string id;
    std::string input_text;
    std::vector<GoldClaim> gold_claims;
    ExampleLabel label = ExampleLabel::Factual;
    /// Gold rendering of the text, for BLEU.
    std::optional<std::string> reference;
};

/// JSON lines: {"id", "text", "label": "FACTUAL"|"HALLUCINATED",
///   "gold": [{"subject", "predicate", "type", "value"}], "reference"?}
std::vector<LabeledExample> load_corpus(const std::filesystem::path& path, const AliasTable* aliases = nullptr);
std::vector<LabeledExample> parse_corpus(std::istream& in, const AliasTable* aliases = nullptr,
                                         std::string_view origin = "<stream>");

struct EvalReport {
    std::string configuration = "all";
    std::size_t examples = 0;
    std::size_t gold_claims = 0;
    /// Gold claims the extractor did not find; they count as errors.
    std::size_t unmatched_gold = 0;
    double accuracy = 0.0;
    double pre_accuracy = 0.0;
    std::size_t pre_errors = 0;
    std::size_t post_errors = 0;
    /// 1 - post_errors / pre_errors; 0 when there were no errors to fix.
    double hallucination_reduction = 0.0;
    double ece = 0.0;
    std::optional<CalibrationReport> calibration;
    double mean_latency_ms = 0.0;
    double p95_latency_ms = 0.0;
    /// Mean over examples with a reference; 0 when none has one.
    double bleu4 = 0.0;
    std::size_t corrections = 0;
    std::size_t rolled_back = 0;
};

struct EvalOptions {
    std::string configuration = "all";
    /// Worker threads across examples; counts do not depend on it.
    unsigned threads = 1;
    std::size_t ece_bins = kDefaultEceBins;
};

/// Runs every example through the pipeline and scores the gold claims.
/// A gold claim is matched to the first extracted claim with the same
/// subject id and predicate; it is correct before correction when the claim
/// asserts the gold value, and after correction when an accepted
/// substitution includes it (or, without one, when it was correct before).
/// Throws EmptyCorpus.
EvalReport evaluate(const Pipeline& pipeline, std::span<const LabeledExample> corpus, const EvalOptions& opts = {});

/// "kg+web" -> {"kg", "web"}; "all" -> every configured source. Throws
/// UnknownSource, or std::invalid_argument for an empty subset.
std::vector<std::string> parse_subset(const std::string& spec, const AppConfig& config);

/// One evaluate() per subset, each with a fresh pipeline over just those
/// sources. Rows follow the order of `subsets`.
std::vector<EvalReport> ablate(const Runtime& runtime, std::span<const LabeledExample> corpus,
                               const std::vector<std::string>& subsets, unsigned threads = 1);

/// Header "Configuration,Acc.,Halluc. Red.,Latency".
void write_ablation_csv(std::ostream& out, std::span<const EvalReport> rows);

ojson to_json(const EvalReport& r);

}  // namespace factcheck
