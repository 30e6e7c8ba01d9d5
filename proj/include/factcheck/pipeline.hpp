#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/claim.hpp"
#include "factcheck/confidence.hpp"
#include "factcheck/correction.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/extractor.hpp"
#include "factcheck/fusion.hpp"
#include "factcheck/verdict_cache.hpp"

namespace factcheck {

class UnknownSource : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct PipelineConfig {
    double tau = 0.7;
    std::chrono::milliseconds evidence_budget{800};
    /// Source ids to query; empty means every configured source.
    std::vector<std::string> enabled_sources;
    /// Pool weights default to each source's profile weight.
    FusionConfig fusion;
    ConfidenceWeights weights;
    CorrectionConfig correction;
    std::chrono::seconds cache_ttl{300};
    std::size_t cache_capacity = 1000;

    /// Throws std::invalid_argument naming the field.
    void validate() const;
};

struct PipelineParts {
    std::shared_ptr<const Extractor> extractor;
    std::vector<std::shared_ptr<const KnowledgeSource>> sources;
    std::shared_ptr<const IntrinsicProvider> intrinsic;
    std::shared_ptr<const SimilarityProvider> similarity;
};

enum class GateDecision { Pass, Corrected, Hedged, Attributed, RolledBack };

std::string_view to_string(GateDecision g);

struct ClaimVerdict {
    Claim claim;
    std::vector<Evidence> evidence;
    ConsistencyReport report;
    ConfidenceBreakdown confidence;
    GateDecision gate = GateDecision::Pass;
    bool cached = false;
};

/// Wall-clock milliseconds per stage.
struct StageTimings {
    double extract = 0.0;
    double evidence = 0.0;
    double fusion = 0.0;
    double confidence = 0.0;
    double correction = 0.0;
    double reverify = 0.0;
    double total = 0.0;
};

struct Reverification {
    double e_score = 1.0;
    std::vector<Claim> claims;
    std::vector<ConsistencyReport> reports;
};

struct VerifiedResponse {
    std::string original_text;
    std::string final_text;
    /// E_s of final_text: the re-verified score when corrections were kept,
    /// the initial score otherwise.
    double e_score = 1.0;
    double initial_e_score = 1.0;
    std::vector<ClaimVerdict> verdicts;
    std::vector<Correction> corrections;
    std::optional<Reverification> reverification;
    StageTimings timings;
    /// Sources that timed out, missed the budget or failed, sorted.
    std::vector<std::string> degraded_sources;
    /// Set when no source answered for any claim; the text is returned as is.
    bool unverified = false;
    std::string annotation;
};

struct SourceStatus {
    std::string source_id;
    SourceKind kind = SourceKind::KnowledgeGraph;
    bool up = true;
    std::string detail;
};

/// Runs extraction, evidence gathering, fusion, confidence, the gate,
/// correction and one re-verification pass. verify() may be called
/// concurrently.
class Pipeline {
  public:
    /// Throws std::invalid_argument for an invalid config and UnknownSource
    /// for an enabled id that is not among the parts' sources.
    Pipeline(PipelineConfig config, PipelineParts parts);
    ~Pipeline();

    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    VerifiedResponse verify(std::string_view text, const RequestContext& ctx = {}) const;

    std::vector<SourceStatus> health() const;
    const PipelineConfig& config() const { return config_; }
    const std::vector<std::shared_ptr<const KnowledgeSource>>& sources() const { return sources_; }
    const Extractor& extractor() const { return *parts_.extractor; }
    std::size_t cache_size() const { return cache_.size(); }

  private:
    struct Gathered {
        std::vector<std::vector<Evidence>> evidence;
        std::vector<bool> cached;
        std::vector<std::string> degraded;
        bool all_failed = false;
    };

    Gathered gather(const std::vector<Claim>& claims) const;
    std::string cache_key(const Claim& claim) const;

    PipelineConfig config_;
    PipelineParts parts_;
    std::vector<std::shared_ptr<const KnowledgeSource>> sources_;
    mutable LruTtlCache<std::string, std::vector<Evidence>> cache_;

    // Source queries run on detached threads that may outlive a request; the
    // destructor waits for them.
    struct InFlight {
        std::mutex mu;
        std::condition_variable cv;
        std::size_t count = 0;
    };
    std::shared_ptr<InFlight> in_flight_;
};

/// Percentile by nearest rank; 0 for an empty sample.
double percentile(std::vector<double> values, double p);

}  // namespace factcheck
