#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/claim.hpp"

namespace factcheck {

enum class Stance { Supports, Refutes, Insufficient };
enum class SourceKind { KnowledgeGraph, WebSearch, DomainDb };

std::string_view to_string(Stance s);
std::string_view to_string(SourceKind k);
SourceKind parse_source_kind(std::string_view s);

using ValueDistribution = std::map<ClaimValue, double>;

struct SourceProfile {
    std::string source_id;
    SourceKind kind = SourceKind::KnowledgeGraph;
    double base_reliability = 1.0;
    double fusion_weight = 1.0;
    std::chrono::milliseconds timeout{500};
    int max_results = 10;
    /// Citation count that maps to citation_norm 1.0. Zero means "largest
    /// count seen by this source" (corpus maximum, or the hit list maximum
    /// for remote sources).
    std::uint64_t citation_reference = 0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// One source's finding about one claim.
struct Evidence {
    std::string source_id;
    std::string claim_id;
    Stance stance = Stance::Insufficient;
    /// Empty iff stance is Insufficient; otherwise sums to 1.
    ValueDistribution value_distribution;
    /// Optional human labels per value ("special relativity" for 1905).
    std::map<ClaimValue, std::string> value_labels;
    double authority = 0.0;
    double reliability = 0.0;
    std::optional<Date> recency;
    double recency_score = 0.0;
    std::uint64_t citation_count = 0;
    double citation_norm = 0.0;
    std::chrono::milliseconds latency{0};
    std::string snippet;

    bool responded() const { return stance != Stance::Insufficient; }
};

/// Evidence for a source that had nothing to say (no facts, or timed out).
Evidence insufficient_evidence(const SourceProfile& profile, const Claim& claim,
                               std::chrono::milliseconds latency = std::chrono::milliseconds{0});

class SourceTimeout : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SourceUnavailable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shared knobs for turning raw hits into evidence.
struct ScoringContext {
    /// "Now" for recency; pinned in configuration so output is reproducible.
    Date reference_date{2024, 1, 1};
    double recency_half_life_days = 365.0;
    /// Values within this much posterior mass of the top value count as tied
    /// with it when deciding stance.
    double stance_margin = 0.05;
};

/// exp(-age_days / half_life_days); dates in the future score 1.
double recency_score(const Date& published, const Date& reference, double half_life_days);

/// log1p(count) / log1p(reference), 0 when reference is 0.
double citation_norm(std::uint64_t count, std::uint64_t reference);

/// SUPPORTS when some asserted value of the claim is within `margin` of the
/// largest mass, REFUTES when the distribution is non-empty otherwise,
/// INSUFFICIENT when it is empty.
Stance decide_stance(const Claim& claim, const ValueDistribution& dist, double margin);

/// Rescales to sum 1. Entries with non-positive mass are dropped.
ValueDistribution normalized(const ValueDistribution& raw);

/// One retrieved item asserting a value for the claim.
struct Hit {
    ClaimValue value;
    double authority = 1.0;
    std::optional<Date> published;
    std::uint64_t citations = 0;
    std::string snippet;
    std::optional<std::string> label;
};

enum class HitWeighting { Count, Authority };

/// Mass of each value: sum of hit weights (1 per hit, or its authority).
ValueDistribution hit_distribution(std::span<const Hit> hits, HitWeighting weighting);

/// Folds a hit list into a single Evidence. Hits whose value type differs
/// from the claim's object type are ignored. Metadata: authority is the mean
/// over hits, recency the newest publication date, citations the maximum.
Evidence aggregate_hits(const Claim& claim, const SourceProfile& profile, std::span<const Hit> hits,
                        const ScoringContext& ctx, std::uint64_t citation_reference,
                        HitWeighting weighting = HitWeighting::Authority);

struct SourceHealth {
    bool up = true;
    std::string detail;
};

/// A knowledge source. Implementations must tolerate concurrent query()
/// calls.
class KnowledgeSource {
  public:
    virtual ~KnowledgeSource() = default;

    virtual const SourceProfile& profile() const = 0;

    /// Exactly one Evidence per call. Throws SourceTimeout or
    /// SourceUnavailable.
    virtual Evidence query(const Claim& claim) const = 0;

    virtual SourceHealth health() const { return {}; }
};

}  // namespace factcheck
