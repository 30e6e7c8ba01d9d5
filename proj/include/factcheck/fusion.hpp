#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "factcheck/claim.hpp"
#include "factcheck/evidence.hpp"

namespace factcheck {

/// Coefficients of the per-evidence quality score
///   quality = authority * a + recency_score * r + citation_norm * c.
struct StrengthCoefficients {
    double authority = 0.5;
    double recency = 0.3;
    double citations = 0.2;

    void validate() const;
};

struct FusionConfig {
    /// Claims whose consistency falls below this are flagged as contradicted.
    double tau_consistency = 0.5;
    /// Per-source pool weights; renormalized over responding sources.
    std::map<std::string, double> weights;
    StrengthCoefficients strength;

    void validate() const;
};

class NegativeWeight : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct ConsistencyReport {
    std::string claim_id;
    double consistency = 0.5;
    double strength = 0.0;
    ValueDistribution fused_posterior;
    bool contradiction = false;
    std::vector<std::string> contributing_sources;
    /// Value labels gathered from the evidence (first source wins).
    std::map<ClaimValue, std::string> value_labels;
};

/// Linear opinion pool over responding sources:
///   posterior(v) = sum_i w~_i P_i(v),  w~ = w / sum(w over responders).
/// Empty when no source responded. Throws NegativeWeight, or
/// std::invalid_argument when a responding source has no weight. An empty
/// weight map means equal weights. If every responding weight is zero the
/// responders are pooled uniformly.
ValueDistribution fuse_posterior(std::span<const Evidence> evidence, const std::map<std::string, double>& weights);

/// Reliability-weighted fraction of responding evidence that supports the
/// claim; 0.5 when nothing responded.
double check_consistency(const Claim& claim, std::span<const Evidence> evidence);

double evidence_quality(const Evidence& e, const StrengthCoefficients& k = {});

/// Mean evidence_quality over responding evidence; 0 when nothing responded.
double weight_evidence(std::span<const Evidence> evidence, const StrengthCoefficients& k = {});

ConsistencyReport assess_claim(const Claim& claim, std::span<const Evidence> evidence, const FusionConfig& cfg);

struct ValidationResult {
    /// Mean of consistency * strength over claims; 1.0 for claim-free text.
    double e_score = 1.0;
    std::vector<ConsistencyReport> reports;
    /// Claim ids with consistency < tau_consistency, in claim order.
    std::vector<std::string> flagged;
};

/// Response-level evidence score. `per_claim_evidence[i]` belongs to
/// `claims[i]`.
ValidationResult validate_response(std::span<const Claim> claims,
                                   const std::vector<std::vector<Evidence>>& per_claim_evidence,
                                   const FusionConfig& cfg);

/// Same score from reports already computed.
double evidence_score(std::span<const ConsistencyReport> reports);

}  // namespace factcheck
