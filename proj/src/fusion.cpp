#include "factcheck/fusion.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace factcheck {

void StrengthCoefficients::validate() const {
    if (authority < 0.0 || recency < 0.0 || citations < 0.0)
        throw std::invalid_argument("fusion.strength: coefficients must be non-negative");
    if (std::abs(authority + recency + citations - 1.0) > 1e-9)
        throw std::invalid_argument("fusion.strength: coefficients must sum to 1");
}

void FusionConfig::validate() const {
    if (!(tau_consistency >= 0.0 && tau_consistency <= 1.0))
        throw std::invalid_argument("fusion.tau_consistency: must be in [0,1]");
    for (const auto& [id, w] : weights)
        if (w < 0.0) throw NegativeWeight(fmt::format("fusion weight for '{}' is negative", id));
    strength.validate();
}

ValueDistribution fuse_posterior(std::span<const Evidence> evidence, const std::map<std::string, double>& weights) {
    for (const auto& [id, w] : weights)
        if (w < 0.0) throw NegativeWeight(fmt::format("fusion weight for '{}' is negative", id));

    std::vector<std::pair<const Evidence*, double>> responders;
    double total = 0.0;
    for (const auto& e : evidence) {
        if (!e.responded()) continue;
        double w = 1.0;
        if (!weights.empty()) {
            auto it = weights.find(e.source_id);
            if (it == weights.end())
                throw std::invalid_argument(fmt::format("no fusion weight for source '{}'", e.source_id));
            w = it->second;
        }
        responders.emplace_back(&e, w);
        total += w;
    }
    ValueDistribution posterior;
    if (responders.empty()) return posterior;
    if (total <= 0.0) {
        for (auto& r : responders) r.second = 1.0;
        total = static_cast<double>(responders.size());
    }
    for (const auto& [e, w] : responders)
        for (const auto& [v, p] : e->value_distribution) posterior[v] += (w / total) * p;
    return posterior;
}

double check_consistency(const Claim& claim, std::span<const Evidence> evidence) {
    (void)claim;  // stance already encodes agreement with the claim
    double num = 0.0, den = 0.0;
    bool any = false;
    for (const auto& e : evidence) {
        if (!e.responded()) continue;
        any = true;
        den += e.reliability;
        if (e.stance == Stance::Supports) num += e.reliability;
    }
    if (!any || den <= 0.0) return 0.5;
    return std::clamp(num / den, 0.0, 1.0);
}

double evidence_quality(const Evidence& e, const StrengthCoefficients& k) {
    return k.authority * e.authority + k.recency * e.recency_score + k.citations * e.citation_norm;
}

double weight_evidence(std::span<const Evidence> evidence, const StrengthCoefficients& k) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& e : evidence) {
        if (!e.responded()) continue;
        sum += evidence_quality(e, k);
        ++n;
    }
    return n == 0 ? 0.0 : std::clamp(sum / static_cast<double>(n), 0.0, 1.0);
}

ConsistencyReport assess_claim(const Claim& claim, std::span<const Evidence> evidence, const FusionConfig& cfg) {
    ConsistencyReport r;
    r.claim_id = claim.id;
    r.consistency = check_consistency(claim, evidence);
    r.strength = weight_evidence(evidence, cfg.strength);
    r.fused_posterior = fuse_posterior(evidence, cfg.weights);
    r.contradiction = r.consistency < cfg.tau_consistency;
    for (const auto& e : evidence) {
        if (!e.responded()) continue;
        r.contributing_sources.push_back(e.source_id);
        for (const auto& [v, label] : e.value_labels) r.value_labels.try_emplace(v, label);
    }
    return r;
}

double evidence_score(std::span<const ConsistencyReport> reports) {
    if (reports.empty()) return 1.0;
    double sum = 0.0;
    for (const auto& r : reports) sum += r.consistency * r.strength;
    return sum / static_cast<double>(reports.size());
}

ValidationResult validate_response(std::span<const Claim> claims,
                                   const std::vector<std::vector<Evidence>>& per_claim_evidence,
                                   const FusionConfig& cfg) {
    if (per_claim_evidence.size() != claims.size())
        throw std::invalid_argument("claims and evidence lists are not aligned");
    ValidationResult out;
    for (std::size_t i = 0; i < claims.size(); ++i) {
        auto r = assess_claim(claims[i], per_claim_evidence[i], cfg);
        if (r.contradiction) out.flagged.push_back(r.claim_id);
        out.reports.push_back(std::move(r));
    }
    out.e_score = evidence_score(out.reports);
    return out;
}

}  // namespace factcheck
